#include "glreg/imperative.hpp"

#include <sstream>

namespace glreg {

std::set<Var> globals_of(const TypeContext& g) { return gl(g); }

namespace {

bool has_assignment(const Expr& e) {
  if ((e.kind == Expr::Kind::Op || e.kind == Expr::Kind::Lam) && e.qual.is_var()) return true;
  for (const auto& k : e.kids) {
    if (has_assignment(*k)) return true;
  }
  return false;
}

ImpPtr make(ImpExpr e) { return std::make_shared<const ImpExpr>(std::move(e)); }

ImpPtr assign_if(const Qual& q, ImpPtr rhs) {
  if (!q.is_var()) return rhs;
  ImpExpr a;
  a.kind = ImpExpr::Kind::Assign;
  a.name = q.name;
  a.kids = {std::move(rhs)};
  return make(std::move(a));
}

// Binder of a closure hint renamed to the closure's own parameter.
TypeContext closure_params(const Type& hint, const Pattern& param) {
  VarMap m = subst_builder(*hint.binder, param);
  return flatten_pattern(param, apply_subst(m, hint.dom()));
}

}  // namespace

std::set<Var> globalization_set(const TypeContext& g, const Store& s) {
  std::set<Var> out = globals_of(g);
  for (const auto& b : s.bindings()) {
    if (b.value.is_closure() && has_assignment(*b.value.closure().body)) out.insert(b.name);
  }
  return out;
}

Pattern erase_pattern(const std::set<Var>& G, const Pattern& p) {
  if (p.is_var) return G.count(p.name) ? Pattern::tuple({}) : p;
  std::vector<Pattern> es;
  for (const auto& q : p.elems) es.push_back(erase_pattern(G, q));
  return Pattern::tuple(std::move(es));
}

ImpPtr imperative_expr(const std::set<Var>& G, const TypeContext& g, const ExprPtr& e) {
  auto rec = [&](const ExprPtr& k) { return imperative_expr(G, g, k); };
  ImpExpr out;
  switch (e->kind) {
    case Expr::Kind::Var:
      out.name = e->name;
      return make(std::move(out));
    case Expr::Kind::Op:
      out.kind = ImpExpr::Kind::Op;
      out.op = e->op;
      out.literal = e->literal;
      for (const auto& k : e->kids) out.kids.push_back(rec(k));
      return assign_if(e->qual, make(std::move(out)));
    case Expr::Kind::Tuple:
    case Expr::Kind::If:
      out.kind = e->kind == Expr::Kind::Tuple ? ImpExpr::Kind::Tuple : ImpExpr::Kind::If;
      for (const auto& k : e->kids) out.kids.push_back(rec(k));
      return make(std::move(out));
    case Expr::Kind::App: {
      out.kind = ImpExpr::Kind::App;
      out.name = e->name;
      out.kids = {rec(e->kids[0])};
      const Type* f = g.find(e->name);
      out.unit_call = f && f->is_fun() && f->binder && pattern_vars(erase_pattern(G, *f->binder)).empty();
      return make(std::move(out));
    }
    case Expr::Kind::Let: {
      Type t = gsynth(g, e->kids[0]).type;
      out.kind = ImpExpr::Kind::Let;
      out.pat = erase_pattern(G, e->pat);
      out.kids = {rec(e->kids[0]), imperative_expr(G, ctx_join(g, flatten_pattern(e->pat, t)), e->kids[1])};
      return make(std::move(out));
    }
    case Expr::Kind::Lam: {
      Type dom = e->annot ? *e->annot : Type::tuple({});
      out.kind = ImpExpr::Kind::Lam;
      out.pat = erase_pattern(G, e->pat);
      out.kids = {imperative_expr(G, ctx_join(g, flatten_pattern(e->pat, dom)), e->kids[0])};
      return assign_if(e->qual, make(std::move(out)));
    }
    case Expr::Kind::New:
      break;
  }
  throw Error(ErrorKind::TypeMismatch, "'new' has no imperative form");
}

ImpProgram imperative_program(const std::set<Var>& G, const TypeContext& g, const Program& p) {
  ImpProgram out;
  for (const auto& b : p.store.bindings()) {
    ImpExpr v;
    if (!b.value.is_closure()) {
      v.kind = ImpExpr::Kind::Op;
      v.op = "lit";
      v.literal = b.value.ground();
    } else {
      const Closure& c = b.value.closure();
      TypeContext body_ctx = g;
      if (const Type* hint = g.find(b.name); hint && hint->is_fun() && hint->binder) {
        TypeContext params = closure_params(*hint, c.param);
        for (const auto& [x, t] : params.entries()) body_ctx.extend(x, t);
      }
      v.kind = ImpExpr::Kind::Lam;
      v.pat = erase_pattern(G, c.param);
      v.kids = {imperative_expr(G, body_ctx, c.body)};
    }
    out.store.push_back({b.name, make(std::move(v))});
  }
  out.main = imperative_expr(G, g, p.main);
  return out;
}

ImpProgram imperative_program(const TypeContext& hints, const Program& p) {
  auto typing = gcheck_program(p, hints);
  return imperative_program(globalization_set(typing.gamma, p.store), typing.gamma, p);
}

ImpPtr apply_sugar(const ImpPtr& e) {
  auto out = std::make_shared<ImpExpr>(*e);
  for (auto& k : out->kids) k = apply_sugar(k);
  if (e->kind == ImpExpr::Kind::Let && pattern_vars(e->pat).empty()) {
    out->kind = ImpExpr::Kind::Seq;
    out->pat = {};
    return out;
  }
  if (e->kind == ImpExpr::Kind::App && e->unit_call) {
    const ImpExpr& arg = *out->kids[0];
    bool plain = arg.kind == ImpExpr::Kind::Var;
    if (arg.kind == ImpExpr::Kind::Tuple) {
      plain = true;
      for (const auto& k : arg.kids) plain = plain && k->kind == ImpExpr::Kind::Var;
    }
    if (!plain) {
      ImpExpr unit;
      unit.kind = ImpExpr::Kind::Tuple;
      ImpExpr call = *out;
      call.kids = {make(std::move(unit))};
      ImpExpr seq;
      seq.kind = ImpExpr::Kind::Seq;
      seq.kids = {out->kids[0], make(std::move(call))};
      return make(std::move(seq));
    }
  }
  return out;
}

ImpProgram apply_sugar(ImpProgram p) {
  for (auto& b : p.store) b.value = apply_sugar(b.value);
  p.main = apply_sugar(p.main);
  return p;
}

}  // namespace glreg
