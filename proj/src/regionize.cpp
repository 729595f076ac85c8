#include "glreg/regionize.hpp"

#include "glreg/frontend.hpp"

namespace glreg {

RegionName RegionAssignment::n(const Var& x) const {
  auto it = numbering.find(x);
  return it == numbering.end() ? 0 : it->second;
}

std::optional<Var> RegionAssignment::global_of(RegionName r) const {
  for (const auto& [x, n] : numbering) {
    if (n == r) return x;
  }
  return std::nullopt;
}

RegionAssignment make_assignment(const TypeContext& store_gamma) {
  RegionAssignment a;
  for (const auto& [x, t] : store_gamma.entries()) {
    if (t.is_value() && t.qual == Qual::var(x) && !a.numbering.count(x)) a.numbering[x] = ++a.max_region;
  }
  return a;
}

RegionName n_gamma(const TypeContext& g, const Var& x) {
  if (!g.find(x)) throw Error(ErrorKind::UnknownVariable, x + " is not declared");
  return make_assignment(g).n(x);
}

std::string alpha_name(const Var& x) { return "'" + x; }

Qual q_place(const RegionAssignment& a, const ConcreteSet& s, const Qual& g) {
  if (!g.is_var()) return Qual::region_name(0);
  if (s.count(g.name)) return Qual::region_name(a.n(g.name));
  return Qual::region_var(alpha_name(g.name));
}

std::vector<Qual> q_pattern(const RegionAssignment& a, const ConcreteSet& s, const Type& t, const Pattern& p) {
  if (t.is_tuple()) {
    if (t.parts.empty()) return p.is_var ? std::vector<Qual>{Qual::region_name(0)} : std::vector<Qual>{};
    if (p.is_var || p.elems.size() != t.parts.size()) {
      throw Error(ErrorKind::ShapeMismatch, "pattern " + print_pattern(p) + " does not match " + print_type(t));
    }
    std::vector<Qual> out;
    for (std::size_t i = 0; i < p.elems.size(); ++i) {
      auto part = q_pattern(a, s, t.parts[i], p.elems[i]);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  if (!p.is_var) throw Error(ErrorKind::ShapeMismatch, "tuple pattern " + print_pattern(p) + " for " + print_type(t));
  return {q_place(a, s, t.qual)};
}

std::vector<std::string> alpha_vars(const Type& t, const Pattern& p) {
  std::vector<std::string> out;
  for (const auto& q : q_pattern(RegionAssignment{}, {}, t, p)) {
    if (q.is_region_var()) out.push_back(q.name);
  }
  return out;
}

namespace {

bool lo_leaf(const Type& t) { return !t.is_tuple() && t.qual.is_lo(); }

void check_shadowing(const RegionAssignment& a, const TypeContext& binds) {
  for (const auto& [x, t] : binds.entries()) {
    if (lo_leaf(t) && a.n(x) != 0) {
      throw Error(ErrorKind::GlobalShadowing, "local binder " + x + " shadows the global of region " + std::to_string(a.n(x)));
    }
  }
}

}  // namespace

ConcreteSet s_prime(const RegionAssignment& a, const ConcreteSet& s, const Pattern& p, const Type& t) {
  ConcreteSet out = s;
  TypeContext binds = flatten_pattern(p, t);
  for (const auto& x : pattern_vars(p)) {
    if (a.n(x) != 0) out.erase(x);
  }
  for (const auto& [x, tx] : binds.entries()) {
    if (lo_leaf(tx)) out.insert(x);
  }
  return out;
}

Type regionize_type(const RegionAssignment& a, const ConcreteSet& s, const Type& t) {
  switch (t.kind) {
    case Type::Kind::Value:
      return Type::value(t.base, q_place(a, s, t.qual));
    case Type::Kind::Tuple: {
      std::vector<Type> parts;
      for (const auto& p : t.parts) parts.push_back(regionize_type(a, s, p));
      return Type::tuple(std::move(parts));
    }
    case Type::Kind::Fun:
      break;
  }
  if (!t.binder) throw Error(ErrorKind::TypeMismatch, "expected a global function type");
  ConcreteSet inner = s_prime(a, s, *t.binder, t.dom());
  Effect eff{Qual::region_name(0)};  // locals live in region 0
  for (const auto& q : t.effect) {
    if (q.is_var()) eff.insert(q_place(a, inner, q));
  }
  return Type::region_fun(alpha_vars(t.dom(), *t.binder), regionize_type(a, inner, t.dom()), eff,
                          regionize_type(a, inner, t.cod()), q_place(a, s, t.qual));
}

namespace {

struct LeafPlace {
  bool alpha;
  Qual place;
};

// Walks the callee binder, its domain type and the argument information together.
void arg_places(const RegionAssignment& a, const ConcreteSet& s, const Pattern& p, const Type& t, const PatInfo& info,
                std::vector<LeafPlace>& out) {
  if (!p.is_var) {
    if (info.is_leaf() || info.elems.size() != p.elems.size() || !t.is_tuple() || t.parts.size() != p.elems.size()) {
      throw Error(ErrorKind::PatternShape, "argument information " + to_string(info) + " does not match " + print_pattern(p));
    }
    for (std::size_t i = 0; i < p.elems.size(); ++i) arg_places(a, s, p.elems[i], t.parts[i], info.elems[i], out);
    return;
  }
  bool alpha = !t.is_tuple() && t.qual.is_var();
  if (t.is_tuple()) {
    out.push_back({false, Qual::region_name(0)});
    return;
  }
  out.push_back({alpha, q_place(a, s, info.as_qual())});
}

}  // namespace

ExprPtr regionize_expr(const RegionAssignment& a, const ConcreteSet& s, const TypeContext& g, const ExprPtr& e) {
  auto rec = [&](const ExprPtr& k) { return regionize_expr(a, s, g, k); };
  switch (e->kind) {
    case Expr::Kind::Var:
      return e;
    case Expr::Kind::Op: {
      auto out = std::make_shared<Expr>(*e);
      out->qual = q_place(a, s, e->qual);
      for (auto& k : out->kids) k = rec(k);
      return out;
    }
    case Expr::Kind::Tuple:
    case Expr::Kind::If: {
      auto out = std::make_shared<Expr>(*e);
      for (auto& k : out->kids) k = rec(k);
      return out;
    }
    case Expr::Kind::App: {
      const Type* f = g.find(e->name);
      if (!f) throw Error(ErrorKind::UnknownVariable, e->name + " is not in the context");
      if (!f->is_fun() || !f->binder) throw Error(ErrorKind::HeadNotAFunction, e->name + " is not a function");
      std::vector<LeafPlace> leaves;
      arg_places(a, s, *f->binder, f->dom(), p_gamma(g, e->kids[0]), leaves);
      bool any_alpha = false;
      for (const auto& l : leaves) any_alpha = any_alpha || l.alpha;
      std::vector<Qual> args;
      for (const auto& l : leaves) {
        if (l.alpha || !any_alpha) args.push_back(l.place);
      }
      return Expr::app(e->name, rec(e->kids[0]), std::move(args));
    }
    case Expr::Kind::Let: {
      Type t = gsynth(g, e->kids[0]).type;
      TypeContext binds = flatten_pattern(e->pat, t);
      check_shadowing(a, binds);
      ConcreteSet inner = s;
      for (const auto& [x, tx] : binds.entries()) {
        if (lo_leaf(tx)) inner.insert(x);
      }
      return Expr::let(e->pat, rec(e->kids[0]), regionize_expr(a, inner, ctx_join(g, binds), e->kids[1]));
    }
    case Expr::Kind::Lam: {
      Type dom = e->annot ? *e->annot : Type::tuple({});
      TypeContext binds = flatten_pattern(e->pat, dom);
      check_shadowing(a, binds);
      ConcreteSet inner = s_prime(a, s, e->pat, dom);
      std::optional<Type> annot;
      if (e->annot) annot = regionize_type(a, inner, dom);
      return Expr::lam(e->pat, annot, regionize_expr(a, inner, ctx_join(g, binds), e->kids[0]), q_place(a, s, e->qual),
                       alpha_vars(dom, e->pat));
    }
    case Expr::Kind::New:
      break;
  }
  throw Error(ErrorKind::TypeMismatch, "'new' is not a global-language form");
}

RegionizedProgram regionize_program(const TypeContext& hints, const Program& p) {
  auto typing = gcheck_program(p, hints);
  const TypeContext& g = typing.gamma;
  RegionizedProgram out;
  out.assignment = make_assignment(g);
  const auto& a = out.assignment;

  ConcreteSet s;
  for (const auto& b : p.store.bindings()) s.insert(b.name);

  std::set<Var> used = free_vars(*p.main);
  for (const auto& v : free_type_vars(typing.result.type)) used.insert(v);
  for (const auto& b : p.store.bindings()) {
    if (!b.value.is_closure()) continue;
    const Closure& c = b.value.closure();
    auto lam = Expr::lam(c.param, std::nullopt, c.body);
    for (const auto& v : free_vars(*lam)) used.insert(v);
  }

  for (RegionName r = 0; r <= a.max_region; ++r) out.regions.regions()[r];

  for (const auto& b : p.store.bindings()) {
    if (!b.value.is_closure()) {
      if (!used.count(b.name)) {
        out.omitted.push_back(b.name);
        continue;
      }
      out.program.store.append(b.name, b.value);
      out.regions.regions()[a.n(b.name)].push_back(b.name);
      continue;
    }
    const Closure& c = b.value.closure();
    const Type& hint = *g.find(b.name);
    VarMap m = subst_builder(*hint.binder, c.param);
    Type dom = apply_subst(m, hint.dom());
    Type renamed = apply_subst(m, hint);
    renamed.binder = c.param;
    renamed.parts = {dom, apply_subst(m, hint.cod())};
    TypeContext binds = flatten_pattern(c.param, dom);
    check_shadowing(a, binds);
    ConcreteSet inner = s_prime(a, s, c.param, dom);
    TypeContext body_ctx = g;
    for (const auto& [x, t] : binds.entries()) body_ctx.extend(x, t);
    Closure rc{alpha_vars(dom, c.param), c.param, std::nullopt, regionize_expr(a, inner, body_ctx, c.body)};
    if (c.annot) rc.annot = regionize_type(a, inner, dom);
    out.program.store.append(b.name, StorableValue{rc});
    out.hints.push(b.name, regionize_type(a, s, renamed));
    out.regions.regions()[a.n(b.name)].push_back(b.name);
  }
  out.program.main = regionize_expr(a, s, g, p.main);

  auto check_closed = [](const std::set<std::string>& free, const std::string& where) {
    if (!free.empty()) {
      throw Error(ErrorKind::UnboundRegionVariable, "region variable " + *free.begin() + " is unbound in " + where);
    }
  };
  check_closed(free_region_vars(*out.program.main), "main");
  for (const auto& b : out.program.store.bindings()) {
    if (!b.value.is_closure()) continue;
    const Closure& c = b.value.closure();
    auto lam = Expr::lam(c.param, c.annot, c.body, Qual::region_name(0), c.region_binder);
    check_closed(free_region_vars(*lam), b.name);
  }
  return out;
}

namespace {

Qual erase_place(const RegionAssignment& a, const Qual& q) {
  if (q.is_region_var()) return Qual::var(q.name.substr(q.name.rfind('\'') == 0 ? 1 : 0));
  if (q.is_region() && q.region != 0) {
    if (auto x = a.global_of(q.region)) return Qual::var(*x);
  }
  return Qual::lo();
}

}  // namespace

ExprPtr erase_regions(const RegionAssignment& a, const ExprPtr& e) {
  auto out = std::make_shared<Expr>(*e);
  for (auto& k : out->kids) k = erase_regions(a, k);
  if (e->kind == Expr::Kind::Op || e->kind == Expr::Kind::Lam) out->qual = erase_place(a, e->qual);
  out->region_args.clear();
  out->region_binder.reset();
  out->annot.reset();
  return out;
}

ExprPtr erasure_normal_form(const RegionAssignment& a, const ConcreteSet& s, const TypeContext& g, const ExprPtr& e) {
  auto out = std::make_shared<Expr>(*e);
  auto norm = [&](const Qual& q) {
    return q.is_var() && s.count(q.name) && a.n(q.name) == 0 ? Qual::lo() : q;
  };
  switch (e->kind) {
    case Expr::Kind::Let: {
      Type t = gsynth(g, e->kids[0]).type;
      TypeContext binds = flatten_pattern(e->pat, t);
      ConcreteSet inner = s;
      for (const auto& [x, tx] : binds.entries()) {
        if (lo_leaf(tx)) inner.insert(x);
      }
      out->kids = {erasure_normal_form(a, s, g, e->kids[0]), erasure_normal_form(a, inner, ctx_join(g, binds), e->kids[1])};
      return out;
    }
    case Expr::Kind::Lam: {
      Type dom = e->annot ? *e->annot : Type::tuple({});
      ConcreteSet inner = s_prime(a, s, e->pat, dom);
      out->qual = norm(e->qual);
      out->annot.reset();
      out->kids = {erasure_normal_form(a, inner, ctx_join(g, flatten_pattern(e->pat, dom)), e->kids[0])};
      return out;
    }
    default:
      break;
  }
  if (e->kind == Expr::Kind::Op) out->qual = norm(e->qual);
  for (auto& k : out->kids) k = erasure_normal_form(a, s, g, k);
  return out;
}

}  // namespace glreg
