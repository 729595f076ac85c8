// Small-step semantics of the global calculus.
#pragma once

#include <optional>
#include <variant>

#include "glreg/machine.hpp"
#include "glreg/region_eval.hpp"

namespace glreg {

struct GlobalConfig {
  Store store;
  ExprPtr expr;
  std::uint64_t fresh_counter = 0;
};

StepResult gstep_in_place(GlobalConfig& c);
std::variant<std::pair<GlobalConfig, TraceStep>, Terminal, Stuck> gstep(const GlobalConfig& c);

struct GlobalRunResult {
  Outcome outcome = Outcome::Terminal;
  GlobalConfig final;
  std::optional<Stuck> stuck;
  std::vector<TraceStep> trace;
  std::size_t steps = 0;
  std::vector<std::string> diagnostics;
};

GlobalRunResult grun(GlobalConfig c, const RunOptions& opts = {});

inline GlobalConfig initial_global_config(const Program& p) { return GlobalConfig{p.store, p.main, 0}; }

}  // namespace glreg
