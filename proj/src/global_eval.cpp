#include "glreg/global_eval.hpp"

namespace glreg {

namespace {

Stuck stuck(StuckReason why, std::string detail, const ExprPtr& at) { return Stuck{why, std::move(detail), at}; }

}  // namespace

StepResult gstep_in_place(GlobalConfig& c) {
  auto d = decompose(c.expr, false);
  if (std::holds_alternative<AlreadyCanonical>(d)) return Terminal{};
  if (auto* s = std::get_if<Stuck>(&d)) return *s;
  auto& redex = std::get<Redex>(d);
  const ExprPtr& e = redex.expr;

  TraceStep ts;
  ts.path = redex.path;
  ExprPtr replacement;

  // Writes at the qualifier x (rebinding it at the tail) or at a fresh name.
  auto write = [&](StorableValue v) {
    Var x;
    if (e->qual.is_var() && c.store.contains(e->qual.name)) {
      x = e->qual.name;
      c.store.rebind(x, v);
    } else {
      if (e->qual.is_var()) ts.note = "qualifier " + e->qual.name + " is not in the store; allocating fresh";
      x = next_fresh(c.store, c.fresh_counter);
      c.store.append(x, v);
    }
    ts.store_delta.added.push_back({x, std::move(v)});
    replacement = Expr::var(x);
  };

  switch (e->kind) {
    case Expr::Kind::Op: {
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
      write(StorableValue{g});
      break;
    }
    case Expr::Kind::Lam:
      ts.rule = Rule::Ela;
      write(StorableValue{Closure{std::nullopt, e->pat, e->annot, e->kids[0]}});
      break;
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
      VarMap m;
      try {
        m = subst_builder(cl.param, canonical_pattern(*e->kids[0]));
      } catch (const Error& err) {
        return stuck(StuckReason::ShapeMismatch, err.what(), e);
      }
      ts.rule = Rule::Eap;
      replacement = apply_subst(m, cl.body);
      break;
    }
    case Expr::Kind::New:
    case Expr::Kind::Var:
    case Expr::Kind::Tuple:
      return stuck(StuckReason::NotInLanguage, "no rule applies", e);
  }
  c.expr = plug(c.expr, redex.path, replacement);
  return ts;
}

std::variant<std::pair<GlobalConfig, TraceStep>, Terminal, Stuck> gstep(const GlobalConfig& c) {
  GlobalConfig next = c;
  auto r = gstep_in_place(next);
  if (auto* ts = std::get_if<TraceStep>(&r)) return std::pair{std::move(next), std::move(*ts)};
  if (auto* s = std::get_if<Stuck>(&r)) return *s;
  return Terminal{};
}

GlobalRunResult grun(GlobalConfig c, const RunOptions& opts) {
  GlobalRunResult out;
  for (;;) {
    if (out.steps >= opts.fuel) {
      if (std::holds_alternative<AlreadyCanonical>(decompose(c.expr, false))) break;
      out.outcome = Outcome::OutOfFuel;
      break;
    }
    std::shared_ptr<const Snapshot> before;
    if (opts.full_snapshots) before = std::make_shared<Snapshot>(Snapshot{{}, c.store, c.expr});
    auto r = gstep_in_place(c);
    if (std::holds_alternative<Terminal>(r)) break;
    if (auto* s = std::get_if<Stuck>(&r)) {
      out.outcome = Outcome::Stuck;
      out.stuck = *s;
      break;
    }
    auto& ts = std::get<TraceStep>(r);
    ts.index = out.steps++;
    if (!ts.note.empty()) out.diagnostics.push_back(ts.note);
    if (opts.full_snapshots) {
      ts.before = before;
      ts.after = std::make_shared<Snapshot>(Snapshot{{}, c.store, c.expr});
    }
    if (opts.observer) opts.observer(ts, ts.after ? *ts.after : Snapshot{{}, c.store, c.expr});
    if (opts.record_trace) out.trace.push_back(std::move(ts));
  }
  out.final = std::move(c);
  return out;
}

}  // namespace glreg
