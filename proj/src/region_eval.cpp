#include "glreg/region_eval.hpp"

#include <algorithm>

namespace glreg {

RegionContext region_add(const RegionContext& r, RegionName n, const Var& x) {
  if (!r.contains(n)) throw Error(ErrorKind::UnknownRegion, "region " + std::to_string(n) + " does not exist");
  if (r.region_of(x)) throw Error(ErrorKind::DuplicateLocation, x + " already lives in a region");
  RegionContext out = r;
  out.regions()[n].push_back(x);
  return out;
}

std::pair<RegionContext, std::vector<Var>> region_remove(const RegionContext& r, RegionName n) {
  RegionContext out = r;
  std::vector<Var> evicted;
  auto it = out.regions().find(n);
  if (it == out.regions().end()) throw Error(ErrorKind::UnknownRegion, "region " + std::to_string(n) + " does not exist");
  evicted = std::move(it->second);
  out.regions().erase(it);
  return {std::move(out), std::move(evicted)};
}

RegionName new_region(const RegionContext& r) {
  if (r.regions().empty()) return 1;
  return std::max<RegionName>(1, r.regions().rbegin()->first + 1);
}

namespace {

Stuck stuck(StuckReason why, std::string detail, const ExprPtr& at) { return Stuck{why, std::move(detail), at}; }

// Resolves the place of an allocation, or explains why it cannot happen.
std::optional<Stuck> check_place(const RegionConfig& c, const ExprPtr& e) {
  if (e->qual.is_region_var()) {
    return stuck(StuckReason::DanglingRegion, "allocation at unbound region variable " + e->qual.name, e);
  }
  if (!e->qual.is_region() || !c.regions.contains(e->qual.region)) {
    return stuck(StuckReason::DanglingRegion, "allocation at missing region " + to_string(e->qual), e);
  }
  return std::nullopt;
}

}  // namespace

StepResult step_in_place(RegionConfig& c) {
  auto d = decompose(c.expr, true);
  if (std::holds_alternative<AlreadyCanonical>(d)) return Terminal{};
  if (auto* s = std::get_if<Stuck>(&d)) return *s;
  auto& redex = std::get<Redex>(d);
  const ExprPtr& e = redex.expr;

  TraceStep ts;
  ts.path = redex.path;
  ExprPtr replacement;

  auto allocate = [&](StorableValue v) {
    Var x = next_fresh(c.store, c.fresh_counter);
    c.store.append(x, v);
    c.regions.regions()[e->qual.region].push_back(x);
    ts.store_delta.added.push_back({x, std::move(v)});
    ts.region_delta.added.emplace_back(e->qual.region, x);
    replacement = Expr::var(x);
  };

  switch (e->kind) {
    case Expr::Kind::Op: {
      if (auto s = check_place(c, e)) return *s;
      Ground g;
      if (e->literal) {
        g = *e->literal;
      } else {
        std::vector<Ground> args;
        for (const auto& k : e->kids) {
          const auto* v = c.store.find(k->name);
          if (!v) return stuck(StuckReason::UnboundVariable, k->name + " is not in the store", e);
          if (v->is_closure()) return stuck(StuckReason::RuntimeError, k->name + " is a function, not an operand", e);
          args.push_back(v->ground());
        }
        try {
          g = apply_op(e->op, args);
        } catch (const Error& err) {
          return stuck(StuckReason::RuntimeError, err.what(), e);
        }
      }
      ts.rule = Rule::Eop;
      allocate(StorableValue{g});
      break;
    }
    case Expr::Kind::Lam: {
      if (auto s = check_place(c, e)) return *s;
      ts.rule = Rule::Ela;
      Closure cl{e->region_binder.value_or(std::vector<std::string>{}), e->pat, e->annot, e->kids[0]};
      allocate(StorableValue{cl});
      break;
    }
    case Expr::Kind::If: {
      const auto& cv = e->kids[0]->name;
      const auto* v = c.store.find(cv);
      if (!v) return stuck(StuckReason::UnboundVariable, cv + " is not in the store", e);
      if (v->is_closure() || v->ground().base() != BaseType::Bool) {
        return stuck(StuckReason::NotABool, cv + " is not a boolean", e);
      }
      bool b = std::get<bool>(v->ground().v);
      ts.rule = b ? Rule::EifTrue : Rule::EifFalse;
      replacement = e->kids[b ? 1 : 2];
      break;
    }
    case Expr::Kind::Let: {
      VarMap m;
      try {
        m = subst_builder(e->pat, canonical_pattern(*e->kids[0]));
      } catch (const Error& err) {
        return stuck(StuckReason::ShapeMismatch, err.what(), e);
      }
      ts.rule = Rule::Ele;
      replacement = apply_subst(m, e->kids[1]);
      break;
    }
    case Expr::Kind::App: {
      const auto* v = c.store.find(e->name);
      if (!v) return stuck(StuckReason::UnboundVariable, e->name + " is not in the store", e);
      if (!v->is_closure()) return stuck(StuckReason::NotAFunction, e->name + " is not a function", e);
      const Closure& cl = v->closure();
      RegionMap rm;
      const auto binder = cl.region_binder.value_or(std::vector<std::string>{});
      if (!binder.empty()) {
        if (binder.size() != e->region_args.size()) {
          return stuck(StuckReason::ShapeMismatch, "region argument count differs from binder of " + e->name, e);
        }
        for (std::size_t i = 0; i < binder.size(); ++i) rm[binder[i]] = e->region_args[i];
      }
      VarMap m;
      try {
        m = subst_builder(cl.param, canonical_pattern(*e->kids[0]));
      } catch (const Error& err) {
        return stuck(StuckReason::ShapeMismatch, err.what(), e);
      }
      ts.rule = Rule::Eap;
      replacement = apply_region_subst(rm, apply_subst(m, cl.body));
      break;
    }
    case Expr::Kind::New: {
      if (e->qual.is_region_var()) {
        RegionName r = new_region(c.regions);
        c.regions.regions()[r];
        ts.rule = Rule::Ene;
        ts.region_delta.created.push_back(r);
        replacement = Expr::new_(Qual::region_name(r), apply_region_subst({{e->qual.name, Qual::region_name(r)}}, e->kids[0]));
        break;
      }
      if (!e->qual.is_region() || !c.regions.contains(e->qual.region)) {
        return stuck(StuckReason::DanglingRegion, "deallocating missing region " + to_string(e->qual), e);
      }
      const auto& evicted = *c.regions.find(e->qual.region);
      std::set<Var> gone(evicted.begin(), evicted.end());
      for (const auto& x : pattern_vars(canonical_pattern(*e->kids[0]))) {
        if (gone.count(x)) return stuck(StuckReason::DanglingValue, "result " + x + " lives in the evicted region", e);
      }
      ts.rule = Rule::Ede;
      ts.region_delta.removed.push_back(e->qual.region);
      for (const auto& x : evicted) {
        if (c.store.contains(x)) {
          c.store.remove(x);
          ts.store_delta.removed.push_back(x);
        }
      }
      c.regions.regions().erase(e->qual.region);
      replacement = e->kids[0];
      break;
    }
    case Expr::Kind::Var:
    case Expr::Kind::Tuple:
      return stuck(StuckReason::NotInLanguage, "no rule applies", e);
  }
  c.expr = plug(c.expr, redex.path, replacement);
  return ts;
}

std::variant<std::pair<RegionConfig, TraceStep>, Terminal, Stuck> step(const RegionConfig& c) {
  RegionConfig next = c;
  auto r = step_in_place(next);
  if (auto* ts = std::get_if<TraceStep>(&r)) return std::pair{std::move(next), std::move(*ts)};
  if (auto* s = std::get_if<Stuck>(&r)) return *s;
  return Terminal{};
}

RunResult run(RegionConfig c, const RunOptions& opts) {
  RunResult out;
  for (;;) {
    if (out.steps >= opts.fuel) {
      if (std::holds_alternative<AlreadyCanonical>(decompose(c.expr, true))) break;
      out.outcome = Outcome::OutOfFuel;
      break;
    }
    std::shared_ptr<const Snapshot> before;
    if (opts.full_snapshots) before = std::make_shared<Snapshot>(Snapshot{c.regions, c.store, c.expr});
    auto r = step_in_place(c);
    if (std::holds_alternative<Terminal>(r)) break;
    if (auto* s = std::get_if<Stuck>(&r)) {
      out.outcome = Outcome::Stuck;
      out.stuck = *s;
      break;
    }
    auto& ts = std::get<TraceStep>(r);
    ts.index = out.steps++;
    if (opts.full_snapshots) {
      ts.before = before;
      ts.after = std::make_shared<Snapshot>(Snapshot{c.regions, c.store, c.expr});
    }
    if (opts.observer) opts.observer(ts, ts.after ? *ts.after : Snapshot{c.regions, c.store, c.expr});
    if (opts.record_trace) out.trace.push_back(std::move(ts));
  }
  out.final = std::move(c);
  return out;
}

RegionConfig initial_config(const RegionContext& r, const Program& p) {
  return RegionConfig{r, p.store, p.main, 0};
}

std::optional<std::string> partition_violation(const RegionContext& r, const Store& s) {
  std::set<Var> seen;
  for (const auto& [n, xs] : r.regions()) {
    for (const auto& x : xs) {
      if (!seen.insert(x).second) return x + " occurs in two regions";
      if (!s.contains(x)) return x + " is in region " + std::to_string(n) + " but not in the store";
    }
  }
  for (const auto& b : s.bindings()) {
    if (!seen.count(b.name)) return b.name + " is in the store but in no region";
  }
  return std::nullopt;
}

}  // namespace glreg
