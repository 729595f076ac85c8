// Small-step semantics of the region calculus.
#pragma once

#include <optional>
#include <variant>

#include "glreg/machine.hpp"

namespace glreg {

/// R, x ↪ r. Throws UnknownRegion / DuplicateLocation.
RegionContext region_add(const RegionContext& r, RegionName n, const Var& x);
/// R ∼ r, together with the evicted variables R r.
std::pair<RegionContext, std::vector<Var>> region_remove(const RegionContext& r, RegionName n);
/// Smallest name above every existing region (0 stays reserved).
RegionName new_region(const RegionContext& r);

struct RegionConfig {
  RegionContext regions;
  Store store;
  ExprPtr expr;
  std::uint64_t fresh_counter = 0;
};

struct Terminal {};
using StepResult = std::variant<TraceStep, Terminal, Stuck>;

/// Performs one step in place. On Terminal/Stuck the configuration is untouched.
StepResult step_in_place(RegionConfig& c);
/// Pure variant of `step_in_place`.
std::variant<std::pair<RegionConfig, TraceStep>, Terminal, Stuck> step(const RegionConfig& c);

struct RunResult {
  Outcome outcome = Outcome::Terminal;
  RegionConfig final;
  std::optional<Stuck> stuck;
  std::vector<TraceStep> trace;
  std::size_t steps = 0;
};

RunResult run(RegionConfig c, const RunOptions& opts = {});

/// Initial configuration of a region program.
RegionConfig initial_config(const RegionContext& r, const Program& p);

/// Checks that every store variable lies in exactly one region, and every
/// region variable is bound in the store.
std::optional<std::string> partition_violation(const RegionContext& r, const Store& s);

}  // namespace glreg
