// Trace serialization (text and JSON) and replay.
#pragma once

#include <string>
#include <vector>

#include "glreg/frontend.hpp"
#include "glreg/global_eval.hpp"
#include "glreg/region_eval.hpp"
#include "json.hpp"

namespace glreg {

/// {index, rule, path, store_delta: {added: [{name, value}], removed}, region_delta: {added: [[r, x]], created, removed}}
/// plus `note`, and `before`/`after` snapshots when they were recorded.
nlohmann::json step_to_json(const TraceStep& s, Mode mode);
nlohmann::json trace_to_json(const std::vector<TraceStep>& trace, Mode mode);
std::string step_to_text(const TraceStep& s, Mode mode);

struct DeltaState {
  RegionContext regions;
  Store store;
};

/// Rebuilds store and region context by applying the serialized deltas in order.
DeltaState apply_deltas(DeltaState init, const nlohmann::json& records, Mode mode);

/// Re-executes from `init`, checking each step against the recorded rule and
/// path; throws Error(Syntax) on the first disagreement.
RegionConfig replay_region(RegionConfig init, const nlohmann::json& records);
GlobalConfig replay_global(GlobalConfig init, const nlohmann::json& records);

}  // namespace glreg
