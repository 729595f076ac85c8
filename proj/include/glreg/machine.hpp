// Evaluation-context machinery shared by the region and global evaluators.
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "glreg/syntax.hpp"

namespace glreg {

/// R: region name ↦ variables in allocation order.
class RegionContext {
 public:
  RegionContext() = default;
  explicit RegionContext(std::map<RegionName, std::vector<Var>> m) : regions_(std::move(m)) {}

  bool contains(RegionName r) const { return regions_.count(r) != 0; }
  const std::vector<Var>* find(RegionName r) const;
  std::optional<RegionName> region_of(const Var& x) const;
  const std::map<RegionName, std::vector<Var>>& regions() const { return regions_; }
  std::map<RegionName, std::vector<Var>>& regions() { return regions_; }
  bool empty() const { return regions_.empty(); }

  friend bool operator==(const RegionContext&, const RegionContext&) = default;

 private:
  std::map<RegionName, std::vector<Var>> regions_;
};

enum class Rule { Ela, Eop, EifTrue, EifFalse, Ele, Eap, Ene, Ede };
const char* to_string(Rule r);
std::optional<Rule> rule_from_string(const std::string& s);

enum class StuckReason {
  UnboundVariable,
  NotAFunction,
  NotABool,
  DanglingRegion,
  DanglingValue,
  ShapeMismatch,
  RuntimeError,
  NotInLanguage,
};
const char* to_string(StuckReason r);

struct Stuck {
  StuckReason reason;
  std::string detail;
  ExprPtr redex;
};

/// Position of a subexpression: child indices from the root.
using Path = std::vector<std::size_t>;

struct Redex {
  Path path;
  ExprPtr expr;
};

struct AlreadyCanonical {};

/// Unique decomposition e = E[e0] per the evaluation-context grammar.
/// `allow_new` enables the `new σ. E` context of the region language.
std::variant<Redex, AlreadyCanonical, Stuck> decompose(const ExprPtr& e, bool allow_new);

/// Rebuilds `e` with the subexpression at `path` replaced.
ExprPtr plug(const ExprPtr& e, const Path& path, ExprPtr replacement);

struct Snapshot {
  RegionContext regions;
  Store store;
  ExprPtr expr;
};

struct StoreDelta {
  std::vector<Binding> added;  // includes rebindings
  std::vector<Var> removed;
};

struct RegionDelta {
  std::vector<std::pair<RegionName, Var>> added;
  std::vector<RegionName> created;
  std::vector<RegionName> removed;
};

struct TraceStep {
  std::size_t index = 0;
  Rule rule = Rule::Ele;
  Path path;
  StoreDelta store_delta;
  RegionDelta region_delta;
  std::string note;  // diagnostics emitted by the step, if any
  std::shared_ptr<const Snapshot> before;  // only with full snapshots
  std::shared_ptr<const Snapshot> after;
};

enum class Outcome { Terminal, Stuck, OutOfFuel };
const char* to_string(Outcome o);

/// Per-step callback: the step record and the state it produced.
using StepObserver = std::function<void(const TraceStep&, const Snapshot&)>;

struct RunOptions {
  std::size_t fuel = 100000;
  bool record_trace = true;
  bool full_snapshots = false;
  StepObserver observer;
};

/// Picks the next reserved name strictly above both the store's names and
/// every name handed out before (so evicted names are never reused).
Var next_fresh(const Store& s, std::uint64_t& counter);

}  // namespace glreg
