#include "glreg/trace.hpp"

namespace glreg {

namespace {

nlohmann::json snapshot_json(const Snapshot& s, Mode mode) {
  nlohmann::json regions = nlohmann::json::object();
  for (const auto& [r, xs] : s.regions.regions()) regions[std::to_string(r)] = xs;
  nlohmann::json store = nlohmann::json::array();
  for (const auto& b : s.store.bindings()) store.push_back({{"name", b.name}, {"value", print_value(b.value, {mode})}});
  return {{"regions", regions}, {"store", store}, {"expr", print_expr(*s.expr, {mode})}};
}

StorableValue parse_value(const std::string& text, Mode mode) {
  auto f = parse_program("v = " + text + ";\nmain = v", {mode, true});
  return *f.program.store.find("v");
}

[[noreturn]] void replay_error(const std::string& msg) { throw Error(ErrorKind::Syntax, "replay: " + msg); }

}  // namespace

nlohmann::json step_to_json(const TraceStep& s, Mode mode) {
  nlohmann::json added = nlohmann::json::array();
  for (const auto& b : s.store_delta.added) added.push_back({{"name", b.name}, {"value", print_value(b.value, {mode})}});
  nlohmann::json radded = nlohmann::json::array();
  for (const auto& [r, x] : s.region_delta.added) radded.push_back({r, x});
  nlohmann::json j = {
      {"index", s.index},
      {"rule", to_string(s.rule)},
      {"path", s.path},
      {"store_delta", {{"added", added}, {"removed", s.store_delta.removed}}},
      {"region_delta", {{"added", radded}, {"created", s.region_delta.created}, {"removed", s.region_delta.removed}}},
  };
  if (!s.note.empty()) j["note"] = s.note;
  if (s.before) j["before"] = snapshot_json(*s.before, mode);
  if (s.after) j["after"] = snapshot_json(*s.after, mode);
  return j;
}

nlohmann::json trace_to_json(const std::vector<TraceStep>& trace, Mode mode) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : trace) out.push_back(step_to_json(s, mode));
  return out;
}

std::string step_to_text(const TraceStep& s, Mode mode) {
  std::string out = std::to_string(s.index) + " " + to_string(s.rule) + " [";
  for (std::size_t i = 0; i < s.path.size(); ++i) out += (i ? "," : "") + std::to_string(s.path[i]);
  out += "]";
  for (const auto& b : s.store_delta.added) out += " +" + b.name + "=" + print_value(b.value, {mode});
  for (const auto& x : s.store_delta.removed) out += " -" + x;
  for (const auto& r : s.region_delta.created) out += " new " + std::to_string(r);
  for (const auto& [r, x] : s.region_delta.added) out += " " + x + "@" + std::to_string(r);
  for (const auto& r : s.region_delta.removed) out += " drop " + std::to_string(r);
  if (!s.note.empty()) out += "  # " + s.note;
  return out;
}

DeltaState apply_deltas(DeltaState st, const nlohmann::json& records, Mode mode) {
  for (const auto& rec : records) {
    const auto& sd = rec.at("store_delta");
    for (const auto& x : sd.at("removed")) st.store.remove(x.get<std::string>());
    for (const auto& a : sd.at("added")) {
      st.store.rebind(a.at("name").get<std::string>(), parse_value(a.at("value").get<std::string>(), mode));
    }
    const auto& rd = rec.at("region_delta");
    for (const auto& r : rd.at("created")) st.regions.regions()[r.get<RegionName>()];
    for (const auto& p : rd.at("added")) st.regions.regions()[p.at(0).get<RegionName>()].push_back(p.at(1).get<std::string>());
    for (const auto& r : rd.at("removed")) st.regions.regions().erase(r.get<RegionName>());
  }
  return st;
}

namespace {

template <class Config, class StepFn>
Config replay(Config c, const nlohmann::json& records, StepFn step_fn) {
  for (const auto& rec : records) {
    auto r = step_fn(c);
    auto* ts = std::get_if<TraceStep>(&r);
    if (!ts) replay_error("record " + rec.at("index").dump() + " has no matching step");
    if (to_string(ts->rule) != rec.at("rule").get<std::string>()) {
      replay_error("record " + rec.at("index").dump() + " expects rule " + rec.at("rule").get<std::string>() +
                   ", got " + to_string(ts->rule));
    }
    if (ts->path != rec.at("path").get<Path>()) replay_error("record " + rec.at("index").dump() + " path differs");
  }
  return c;
}

}  // namespace

RegionConfig replay_region(RegionConfig init, const nlohmann::json& records) {
  return replay(std::move(init), records, [](RegionConfig& c) { return step_in_place(c); });
}

GlobalConfig replay_global(GlobalConfig init, const nlohmann::json& records) {
  return replay(std::move(init), records, [](GlobalConfig& c) { return gstep_in_place(c); });
}

}  // namespace glreg
