#include "glreg/harness.hpp"

#include <algorithm>
#include <random>

#include "glreg/frontend.hpp"
#include "glreg/global_types.hpp"
#include "glreg/region_types.hpp"

namespace glreg {

std::vector<StorableValue> region_slice(const Store& s, const RegionContext& r, RegionName region) {
  std::vector<StorableValue> out;
  const auto* xs = r.find(region);
  if (!xs) throw Error(ErrorKind::UnknownRegion, "region " + std::to_string(region) + " does not exist");
  for (const auto& x : *xs) {
    const StorableValue* v = s.find(x);
    if (!v) throw Error(ErrorKind::DanglingEntry, x + " is listed in region " + std::to_string(region) + " but unbound");
    out.push_back(*v);
  }
  return out;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::GlobalStuck: return "global-stuck";
    case Verdict::RegionStuck: return "region-stuck";
    case Verdict::OutOfFuel: return "out-of-fuel";
    case Verdict::Rejected: return "rejected";
  }
  return "?";
}

std::vector<Var> CorrespondenceReport::failing() const {
  std::vector<Var> out;
  for (const auto& v : variables) {
    if (!v.ok) out.push_back(v.name);
  }
  return out;
}

namespace {

std::string show(const StorableValue& v) { return print_value(v, {Mode::Region}); }

// Leafwise comparison of the two result patterns.
bool compare_results(const Store& gs, const Pattern& gp, const Store& rs, const Pattern& rp, std::string& detail) {
  if (gp.is_var != rp.is_var || gp.elems.size() != rp.elems.size()) {
    detail = "result shapes differ: " + print_pattern(gp) + " vs " + print_pattern(rp);
    return false;
  }
  if (!gp.is_var) {
    for (std::size_t i = 0; i < gp.elems.size(); ++i) {
      if (!compare_results(gs, gp.elems[i], rs, rp.elems[i], detail)) return false;
    }
    return true;
  }
  const StorableValue* g = gs.find(gp.name);
  const StorableValue* r = rs.find(rp.name);
  if (!g || !r) {
    detail = "result leaf " + (g ? rp.name : gp.name) + " is unbound";
    return false;
  }
  if (g->is_closure() || r->is_closure()) {
    if (g->is_closure() != r->is_closure()) {
      detail = "result leaf " + gp.name + " is a function on one side only";
      return false;
    }
    return true;
  }
  if (!value_equal(*g, *r)) {
    detail = "result leaf " + gp.name + " = " + show(*g) + " but " + rp.name + " = " + show(*r);
    return false;
  }
  return true;
}

}  // namespace

std::size_t count_free_occurrences(const Expr& e, const Var& x) {
  auto binds = [&](const Pattern& p) {
    auto vs = pattern_vars(p);
    return std::find(vs.begin(), vs.end(), x) != vs.end();
  };
  switch (e.kind) {
    case Expr::Kind::Var:
      return e.name == x ? 1 : 0;
    case Expr::Kind::Lam:
      return binds(e.pat) ? 0 : count_free_occurrences(*e.kids[0], x);
    case Expr::Kind::Let:
      return count_free_occurrences(*e.kids[0], x) + (binds(e.pat) ? 0 : count_free_occurrences(*e.kids[1], x));
    default:
      break;
  }
  std::size_t n = e.kind == Expr::Kind::App && e.name == x ? 1 : 0;
  for (const auto& k : e.kids) n += count_free_occurrences(*k, x);
  return n;
}

namespace {

// Observer body shared by find_stale_write and check_correspondence.
void note_stale(const TraceStep& step, const Snapshot& after, std::optional<std::string>& stale) {
  if (stale || (step.rule != Rule::Eop && step.rule != Rule::Ela)) return;
  for (const auto& b : step.store_delta.added) {
    if (count_free_occurrences(*after.expr, b.name) > 1) {
      stale = "step " + std::to_string(step.index) + " overwrites " + b.name + " while it is still referenced";
    }
  }
}

}  // namespace

std::optional<std::string> find_stale_write(const Program& p, std::size_t fuel) {
  std::optional<std::string> stale;
  RunOptions opts;
  opts.fuel = fuel;
  opts.record_trace = false;
  opts.observer = [&](const TraceStep& s, const Snapshot& after) { note_stale(s, after, stale); };
  grun(initial_global_config(p), opts);
  return stale;
}

CorrespondenceReport check_correspondence(const TypeContext& hints, const Program& p, std::size_t fuel,
                                          const Tamper& tamper) {
  CorrespondenceReport rep;
  RegionizedProgram rp;
  try {
    gcheck_program(p, hints);
    rp = regionize_program(hints, p);
  } catch (const Error& e) {
    rep.error = e.what();
    return rep;
  }
  if (tamper) tamper(rp);
  try {
    check_program(rp.regions, rp.program, rp.hints);
    rep.region_typed = true;
  } catch (const Error&) {
    rep.region_typed = false;
  }

  RunOptions opts;
  opts.fuel = fuel;
  opts.record_trace = false;
  std::optional<std::string> stale;
  RunOptions gopts = opts;
  std::map<Var, std::size_t> gwrites;
  std::map<RegionName, std::size_t> rwrites;
  gopts.observer = [&](const TraceStep& s, const Snapshot& after) {
    note_stale(s, after, stale);
    for (const auto& b : s.store_delta.added) ++gwrites[b.name];
  };
  auto gres = grun(initial_global_config(p), gopts);
  rep.protected_run = !stale;
  rep.stale_detail = stale.value_or("");
  rep.global_steps = gres.steps;
  RunOptions ropts = opts;
  ropts.observer = [&](const TraceStep& s, const Snapshot&) {
    for (const auto& [r, x] : s.region_delta.added) ++rwrites[r];
  };
  auto rres = run(initial_config(rp.regions, rp.program), ropts);
  rep.region_steps = rres.steps;
  if (gres.outcome == Outcome::Stuck) {
    rep.verdict = Verdict::GlobalStuck;
    rep.error = std::string(to_string(gres.stuck->reason)) + ": " + gres.stuck->detail;
    return rep;
  }
  if (rres.outcome == Outcome::Stuck) {
    rep.verdict = Verdict::RegionStuck;
    rep.error = std::string(to_string(rres.stuck->reason)) + ": " + rres.stuck->detail;
    return rep;
  }
  if (gres.outcome == Outcome::OutOfFuel || rres.outcome == Outcome::OutOfFuel) {
    rep.verdict = Verdict::OutOfFuel;
    return rep;
  }

  const Store& gs = gres.final.store;
  const Store& rs = rres.final.store;
  const RegionContext& rr = rres.final.regions;
  std::map<RegionName, Var> by_region;
  for (const auto& [x, n] : rp.assignment.numbering) by_region[n] = x;
  rep.variables_ok = true;
  rep.structure_ok = true;
  for (const auto& [n, x] : by_region) {
    VariableCheck vc;
    vc.name = x;
    vc.region = n;
    vc.global_writes = gwrites[x];
    vc.region_writes = rwrites[n];
    rep.structure_ok = rep.structure_ok && vc.global_writes == vc.region_writes;
    if (const StorableValue* v = gs.find(x)) vc.global_final = *v;
    try {
      vc.region_values = rr.contains(n) ? region_slice(rs, rr, n) : std::vector<StorableValue>{};
    } catch (const Error& e) {
      vc.detail = e.what();
    }
    if (!vc.global_final) {
      vc.detail = x + " is unbound after global evaluation";
    } else if (vc.detail.empty() && vc.region_values.empty()) {
      vc.no_write = true;
      const StorableValue* init = p.store.find(x);
      vc.ok = init && value_equal(*init, *vc.global_final);
      if (!vc.ok) vc.detail = "region " + std::to_string(n) + " is empty but " + x + " was written";
    } else if (vc.detail.empty() && (vc.global_final->is_closure() || vc.region_values.back().is_closure())) {
      vc.basic = false;  // functions differ after translation; both sides must hold one
      vc.ok = vc.global_final->is_closure() && vc.region_values.back().is_closure();
      if (!vc.ok) vc.detail = x + " holds a function on one side only";
    } else if (vc.detail.empty()) {
      vc.ok = value_equal(*vc.global_final, vc.region_values.back());
      if (!vc.ok) {
        vc.detail = x + " = " + show(*vc.global_final) + " but region " + std::to_string(n) + " ends with " +
                    show(vc.region_values.back());
      }
    }
    rep.variables_ok = rep.variables_ok && vc.ok;
    rep.variables.push_back(std::move(vc));
  }
  for (const auto& b : p.store.bindings()) {
    if (!b.value.is_closure()) continue;
    VariableCheck vc;
    vc.name = b.name;
    vc.basic = false;
    if (const StorableValue* v = gs.find(b.name)) vc.global_final = *v;
    vc.ok = vc.global_final && rs.contains(b.name);
    if (!vc.ok) vc.detail = "function " + b.name + " is missing on one side";
    rep.variables_ok = rep.variables_ok && vc.ok;
    rep.variables.push_back(std::move(vc));
  }

  if (!is_canonical(*gres.final.expr) || !is_canonical(*rres.final.expr)) {
    rep.result_detail = "a final expression is not canonical";
  } else {
    rep.result_ok = compare_results(gs, canonical_pattern(*gres.final.expr), rs, canonical_pattern(*rres.final.expr),
                                    rep.result_detail);
  }
  rep.verdict = rep.variables_ok && rep.result_ok ? Verdict::Pass : Verdict::Fail;
  return rep;
}

std::string format_report(const CorrespondenceReport& r) {
  std::string s;
  for (const auto& v : r.variables) {
    s += v.ok ? "ok   " : "FAIL ";
    s += v.name;
    if (v.region != 0 && !v.basic) {
      s += " region " + std::to_string(v.region) + " (function, presence only)";
    } else if (v.basic) {
      s += " region " + std::to_string(v.region) + ": ";
      s += v.global_final ? show(*v.global_final) : "<unbound>";
      s += v.no_write ? " (no write)" : " = last " + (v.region_values.empty() ? "-" : show(v.region_values.back()));
    } else {
      s += " (function, presence only)";
    }
    if (v.region != 0) s += " (writes " + std::to_string(v.global_writes) + "/" + std::to_string(v.region_writes) + ")";
    if (!v.detail.empty()) s += "  [" + v.detail + "]";
    s += "\n";
  }
  if (r.verdict == Verdict::Pass || r.verdict == Verdict::Fail) {
    s += std::string(r.result_ok ? "ok   " : "FAIL ") + "result" + (r.result_detail.empty() ? "" : "  [" + r.result_detail + "]") + "\n";
  }
  s += "verdict: " + std::string(to_string(r.verdict));
  s += " (global " + std::to_string(r.global_steps) + " steps, region " + std::to_string(r.region_steps) + " steps";
  s += r.region_typed ? ", region-typed)" : ")";
  if (!r.error.empty()) s += "\n" + r.error;
  return s + "\n";
}

namespace {

struct Scope {
  std::vector<Var> ints;
  std::vector<Var> bools;
  std::vector<Qual> int_places;   // qualifiers allowed on int results
  std::vector<Qual> bool_places;  // qualifiers allowed on bool results
  bool may_call = true;
};

class Gen {
 public:
  Gen(std::uint64_t seed, int size) : rng_(seed), size_(size) {}

  GeneratedProgram program() {
    GeneratedProgram g;
    static const char* const kNames[] = {"a", "b", "c", "d"};
    int n_globals = 1 + pick(4);
    Scope top;
    top.int_places.push_back(Qual::lo());
    top.bool_places.push_back(Qual::lo());
    for (int k = 0; k < n_globals; ++k) {
      Var x = kNames[k];
      bool is_bool = k > 0 && coin(0.25);
      g.program.store.append(x, StorableValue{is_bool ? Ground::boolean(coin(0.5)) : Ground::integer(pick(10))});
      g.hints.push(x, Type::value(is_bool ? BaseType::Bool : BaseType::Int, Qual::var(x)));
      (is_bool ? top.bools : top.ints).push_back(x);
      (is_bool ? top.bool_places : top.int_places).push_back(Qual::var(x));
    }
    if (coin(0.3)) {
      std::vector<std::int64_t> xs;
      for (int k = 0; k < 3; ++k) xs.push_back(pick(10));
      g.program.store.append("v", StorableValue{Ground::array(xs)});
      g.hints.push("v", Type::value(BaseType::Array, Qual::var("v")));
      array_ = "v";
    }
    if (coin(0.5)) add_inc(g);
    if (!top.ints.empty() && coin(0.5)) add_loop(g, top);
    g.program.main = main_expr(top);
    return g;
  }

 private:
  std::mt19937_64 rng_;
  int size_;
  int locals_ = 0;
  std::optional<Var> array_;
  bool has_inc_ = false;
  std::optional<Var> loop_global_;

  int pick(int n) { return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(rng_)); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  template <class T>
  const T& choose(const std::vector<T>& xs) { return xs[pick(static_cast<int>(xs.size()))]; }

  static Type int_at(const Qual& q) { return Type::value(BaseType::Int, q); }

  // inc = fn y : (int, y) => E @ y
  void add_inc(GeneratedProgram& g) {
    Scope s;
    s.ints = {"y"};
    s.int_places = {Qual::lo(), Qual::var("y")};
    s.bool_places = {Qual::lo()};
    s.may_call = false;
    ExprPtr e = coin(0.5) ? Expr::op_at("+1", {Expr::var("y")}, Qual::var("y"))
                          : Expr::op_at("+", {Expr::var("y"), int_expr(s, 1)}, Qual::var("y"));
    g.program.store.append("inc", StorableValue{Closure{std::nullopt, Pattern::var("y"), int_at(Qual::var("y")), e}});
    g.hints.push("inc", Type::global_fun(Pattern::var("y"), int_at(Qual::var("y")), {Qual::var("y")},
                                         int_at(Qual::var("y")), Qual::lo()));
    has_inc_ = true;
  }

  // h = fn (n, x) : ((int, lo), (int, x)) =>
  //       if n < 1 then (n, x) else h ((-1)(n), E @ x)
  void add_loop(GeneratedProgram& g, const Scope& top) {
    Var glob = choose(top.ints);
    Var x = coin(0.5) ? glob : "p";
    Scope s;
    s.ints = {"n", x};
    s.int_places = {Qual::lo(), Qual::var(x)};
    s.bool_places = {Qual::lo()};
    s.may_call = has_inc_;
    auto step = Expr::op_at(coin(0.5) ? "+" : "-", {Expr::var(x), int_expr(s, size_ - 1)}, Qual::var(x));
    auto guard = Expr::op_at("<", {Expr::var("n"), Expr::lit(Ground::integer(1))});
    auto rec = Expr::app("h", Expr::tuple({Expr::op_at("-1", {Expr::var("n")}), step}));
    auto body = Expr::if_(guard, Expr::tuple({Expr::var("n"), Expr::var(x)}), rec);
    Pattern param = Pattern::tuple({Pattern::var("n"), Pattern::var(x)});
    Type dom = Type::tuple({int_at(Qual::lo()), int_at(Qual::var(x))});
    g.program.store.append("h", StorableValue{Closure{std::nullopt, param, dom, body}});
    g.hints.push("h", Type::global_fun(param, dom, {Qual::var(x)}, dom, Qual::lo()));
    loop_global_ = glob;
  }

  ExprPtr main_expr(Scope& top) {
    if (loop_global_ && coin(0.7)) {
      Var g = *loop_global_;
      auto count = Expr::lit(Ground::integer(pick(4)));
      ExprPtr arg = coin(0.5) ? Expr::var(g) : int_expr(top, size_ - 1, Qual::var(g));
      auto call = Expr::app("h", Expr::tuple({count, arg}));
      if (coin(0.5)) return call;
      Var m = fresh_local(), r = fresh_local();
      Scope inner = top;
      inner.ints.push_back(m);
      inner.ints.push_back(r);
      return Expr::let(Pattern::tuple({Pattern::var(m), Pattern::var(r)}), call, result(inner));
    }
    return result(top);
  }

  ExprPtr result(Scope& s) {
    int n = 1 + pick(2);
    if (n == 1) return int_expr(s, size_);
    return Expr::tuple({int_expr(s, size_), coin(0.5) ? bool_expr(s, size_ - 1) : int_expr(s, size_ - 1)});
  }

  Var fresh_local() { return "y" + std::to_string(++locals_); }

  ExprPtr int_expr(Scope& s, int depth, std::optional<Qual> at = std::nullopt) {
    Qual q = at ? *at : choose(s.int_places);
    int choices = depth <= 0 ? 2 : 8;
    switch (pick(choices)) {
      case 0:
        return Expr::lit(Ground::integer(pick(10)), q);
      case 1:
        if (!s.ints.empty() && !at) return Expr::var(choose(s.ints));
        return Expr::lit(Ground::integer(pick(10)), q);
      case 2:
        return Expr::op_at(coin(0.5) ? "+" : "-", {int_expr(s, depth - 1), int_expr(s, depth - 1)}, q);
      case 3:
        return Expr::op_at(coin(0.5) ? "+1" : "-1", {int_expr(s, depth - 1)}, q);
      case 4:
        return Expr::if_(bool_expr(s, depth - 1), int_expr(s, depth - 1, q), int_expr(s, depth - 1, q));
      case 5: {
        Var y = fresh_local();
        auto rhs = int_expr(s, depth - 1);
        Scope inner = s;
        inner.ints.push_back(y);
        return Expr::let(Pattern::var(y), rhs, int_expr(inner, depth - 1, at));
      }
      case 6:
        if (array_) {
          auto idx = Expr::lit(Ground::integer(pick(3)));
          return Expr::op_at("index", {Expr::var(*array_), idx}, q);
        }
        return Expr::op_at("+1", {int_expr(s, depth - 1)}, q);
      default:
        if (has_inc_ && s.may_call) return Expr::app("inc", int_expr(s, depth - 1, q));
        return Expr::op_at("-", {int_expr(s, depth - 1), int_expr(s, depth - 1)}, q);
    }
  }

  ExprPtr bool_expr(Scope& s, int depth) {
    Qual q = choose(s.bool_places);
    switch (depth <= 0 ? pick(2) : pick(4)) {
      case 0:
        return Expr::lit(Ground::boolean(coin(0.5)), q);
      case 1:
        if (!s.bools.empty()) return Expr::var(choose(s.bools));
        return Expr::lit(Ground::boolean(coin(0.5)), q);
      case 2:
        return Expr::op_at(coin(0.5) ? "<" : "==", {int_expr(s, depth - 1), int_expr(s, depth - 1)}, q);
      default:
        return Expr::op_at("not", {bool_expr(s, depth - 1)}, q);
    }
  }
};

}  // namespace

GeneratedProgram generate_candidate(std::uint64_t program_seed, int size_bound) {
  auto g = Gen(program_seed, std::max(size_bound, 1)).program();
  g.seed = program_seed;
  return g;
}

std::vector<GeneratedProgram> generate_programs(std::uint64_t seed, int size_bound, std::size_t count) {
  std::vector<GeneratedProgram> out;
  std::mt19937_64 seeds(seed);
  for (std::size_t attempts = 0; out.size() < count && attempts < count * 50; ++attempts) {
    auto g = generate_candidate(seeds(), size_bound);
    try {
      gcheck_program(g.program, g.hints);
    } catch (const Error&) {
      continue;
    }
    out.push_back(std::move(g));
  }
  return out;
}

namespace {

void collect_paths(const ExprPtr& e, Path& cur, std::vector<std::pair<Path, ExprPtr>>& out) {
  out.push_back({cur, e});
  for (std::size_t i = 0; i < e->kids.size(); ++i) {
    cur.push_back(i);
    collect_paths(e->kids[i], cur, out);
    cur.pop_back();
  }
}

std::vector<ExprPtr> smaller(const ExprPtr& e) {
  std::vector<ExprPtr> out;
  for (const auto& k : e->kids) out.push_back(k);
  if (e->kind == Expr::Kind::Op && !e->literal) {
    out.push_back(Expr::lit(Ground::integer(0), e->qual));
    out.push_back(Expr::lit(Ground::boolean(false), e->qual));
  }
  if (e->kind == Expr::Kind::Op && e->literal && e->literal->base() == BaseType::Int &&
      std::get<std::int64_t>(e->literal->v) != 0) {
    out.push_back(Expr::lit(Ground::integer(0), e->qual));
  }
  return out;
}

std::vector<GeneratedProgram> candidates(const GeneratedProgram& g) {
  std::vector<GeneratedProgram> out;
  std::vector<std::pair<Path, ExprPtr>> nodes;
  Path cur;
  collect_paths(g.program.main, cur, nodes);
  for (const auto& [path, node] : nodes) {
    for (auto& repl : smaller(node)) {
      GeneratedProgram c = g;
      c.program.main = plug(g.program.main, path, repl);
      out.push_back(std::move(c));
    }
  }
  std::set<Var> used = free_vars(*g.program.main);
  for (const auto& b : g.program.store.bindings()) {
    if (b.value.is_closure()) {
      auto lam = Expr::lam(b.value.closure().param, std::nullopt, b.value.closure().body);
      for (const auto& v : free_vars(*lam)) {
        if (v != b.name) used.insert(v);
      }
    }
    for (const auto& [x, t] : g.hints.entries()) {
      if (x != b.name) {
        for (const auto& v : free_type_vars(t)) used.insert(v);
      }
    }
  }
  for (const auto& b : g.program.store.bindings()) {
    if (used.count(b.name)) continue;
    GeneratedProgram c = g;
    c.program.store = store_remove(g.program.store, {b.name});
    c.hints.erase(b.name);
    out.push_back(std::move(c));
  }
  return out;
}

bool well_typed(const GeneratedProgram& g) {
  try {
    gcheck_program(g.program, g.hints);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

GeneratedProgram shrink(const GeneratedProgram& g, const std::function<bool(const GeneratedProgram&)>& still_fails) {
  GeneratedProgram best = g;
  for (int round = 0; round < 1000; ++round) {
    bool progressed = false;
    for (auto& c : candidates(best)) {
      if (well_typed(c) && still_fails(c)) {
        best = std::move(c);
        progressed = true;
        break;
      }
    }
    if (!progressed) break;
  }
  return best;
}

std::string print_generated(const GeneratedProgram& g) {
  SourceFile f{Mode::Global, g.program, g.hints, std::nullopt};
  return "# seed " + std::to_string(g.seed) + "\n" + print_program(f, {Mode::Global});
}

}  // namespace glreg
