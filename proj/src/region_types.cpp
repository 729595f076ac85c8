#include "glreg/region_types.hpp"

#include <algorithm>

#include "glreg/frontend.hpp"

namespace glreg {

namespace {

[[noreturn]] void mismatch(const std::string& msg) { throw Error(ErrorKind::TypeMismatch, msg); }

void free_places(const Type& t, const std::set<std::string>& bound, Effect& out) {
  auto add = [&](const Qual& q) {
    if (q.is_region_var() && bound.count(q.name)) return;
    if (q.is_region() || q.is_region_var()) out.insert(q);
  };
  switch (t.kind) {
    case Type::Kind::Value:
      add(t.qual);
      break;
    case Type::Kind::Tuple:
      for (const auto& p : t.parts) free_places(p, bound, out);
      break;
    case Type::Kind::Fun: {
      add(t.qual);
      auto inner = bound;
      inner.insert(t.region_binder.begin(), t.region_binder.end());
      for (const auto& q : t.effect) {
        if (!(q.is_region_var() && inner.count(q.name)) && (q.is_region() || q.is_region_var())) out.insert(q);
      }
      free_places(t.dom(), inner, out);
      free_places(t.cod(), inner, out);
      break;
    }
  }
}

Type canonical_binders(const Type& t, std::size_t& counter);

Type canonical_binders(const Type& t, std::size_t& counter) {
  switch (t.kind) {
    case Type::Kind::Value:
      return t;
    case Type::Kind::Tuple: {
      Type out = t;
      for (auto& p : out.parts) p = canonical_binders(p, counter);
      return out;
    }
    case Type::Kind::Fun: {
      RegionMap m;
      std::vector<std::string> names;
      for (const auto& b : t.region_binder) {
        names.push_back("#" + std::to_string(counter++));
        m[b] = Qual::region_var(names.back());
      }
      Type out = t;
      out.region_binder = names;
      out.effect = apply_region_subst(m, t.effect);
      out.parts = {canonical_binders(apply_region_subst(m, t.dom()), counter),
                   canonical_binders(apply_region_subst(m, t.cod()), counter)};
      return out;
    }
  }
  return t;
}

std::string show(const Type& t) { return print_type(t, {Mode::Region}); }

// Γ extended by [p : T], shadowing earlier bindings.
TypeContext extend(const TypeContext& g, const Pattern& p, const Type& t) {
  TypeContext out = g;
  TypeContext binds;
  try {
    binds = flatten_pattern(p, t);
  } catch (const Error& e) {
    throw Error(ErrorKind::PatternShape, e.what());
  }
  for (const auto& [x, tx] : binds.entries()) out.extend(x, tx);
  return out;
}

void require_place(const Qual& q) {
  if (!q.is_region() && !q.is_region_var()) mismatch("annotation " + print_qual(q) + " is not a place");
}

Type lam_type(const TypeContext& g, const std::vector<std::string>& binder, const Pattern& pat, const Type& dom,
              const ExprPtr& body, const Qual& place) {
  Effect ambient = eff(g);
  for (std::size_t i = 0; i < binder.size(); ++i) {
    if (ambient.count(Qual::region_var(binder[i]))) {
      throw Error(ErrorKind::RegionBinderClash, "region binder " + binder[i] + " occurs free in the context");
    }
    if (std::find(binder.begin(), binder.begin() + i, binder[i]) != binder.begin() + i) {
      throw Error(ErrorKind::RegionBinderClash, "region binder " + binder[i] + " is repeated");
    }
  }
  auto r = check_expr(extend(g, pat, dom), body);
  return Type::region_fun(binder, dom, r.effect, r.type, place);
}

}  // namespace

Effect eff(const Type& t) {
  Effect out;
  free_places(t, {}, out);
  return out;
}

Effect eff(const TypeContext& g) {
  Effect out;
  for (const auto& [x, t] : g.entries()) free_places(t, {}, out);
  return out;
}

Effect eff(const TypeContext& g, const Type& t) {
  Effect out = eff(g);
  free_places(t, {}, out);
  return out;
}

bool types_alpha_equal(const Type& a, const Type& b) {
  std::size_t ca = 0, cb = 0;
  return canonical_binders(a, ca) == canonical_binders(b, cb);
}

namespace {

bool canonical_subtype(const Type& a, const Type& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Type::Kind::Value:
      return a == b;
    case Type::Kind::Tuple:
      if (a.parts.size() != b.parts.size()) return false;
      for (std::size_t i = 0; i < a.parts.size(); ++i) {
        if (!canonical_subtype(a.parts[i], b.parts[i])) return false;
      }
      return true;
    case Type::Kind::Fun:
      break;
  }
  return a.qual == b.qual && a.region_binder == b.region_binder && a.dom() == b.dom() &&
         canonical_subtype(a.cod(), b.cod()) && std::includes(b.effect.begin(), b.effect.end(), a.effect.begin(), a.effect.end());
}

}  // namespace

bool region_subtype(const Type& a, const Type& b) {
  std::size_t ca = 0, cb = 0;
  return canonical_subtype(canonical_binders(a, ca), canonical_binders(b, cb));
}

RegionJudgmentResult check_expr(const TypeContext& g, const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Var: {
      const Type* t = g.find(e->name);
      if (!t) throw Error(ErrorKind::UnknownVariable, e->name + " is not in the context");
      return {*t, {}};
    }
    case Expr::Kind::Op: {
      require_place(e->qual);
      if (e->literal) return {Type::value(e->literal->base(), e->qual), {e->qual}};
      auto sig = op_signature(e->op);
      if (!sig) mismatch("unknown operator " + e->op);
      if (sig->args.size() != e->kids.size()) mismatch("operator " + e->op + " applied to the wrong number of arguments");
      Effect phi{e->qual};
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        auto r = check_expr(g, e->kids[i]);
        if (!r.type.is_value() || r.type.base != sig->args[i]) {
          mismatch("argument " + std::to_string(i + 1) + " of " + e->op + " has type " + show(r.type));
        }
        phi.insert(r.effect.begin(), r.effect.end());
      }
      return {Type::value(sig->result, e->qual), phi};
    }
    case Expr::Kind::Tuple: {
      std::vector<Type> ts;
      Effect phi;
      for (const auto& k : e->kids) {
        auto r = check_expr(g, k);
        ts.push_back(std::move(r.type));
        phi.insert(r.effect.begin(), r.effect.end());
      }
      return {Type::tuple(std::move(ts)), phi};
    }
    case Expr::Kind::Lam: {
      require_place(e->qual);
      if (!e->annot) mismatch("lambda needs a domain annotation");
      auto t = lam_type(g, e->region_binder.value_or(std::vector<std::string>{}), e->pat, *e->annot, e->kids[0], e->qual);
      return {t, {e->qual}};
    }
    case Expr::Kind::App: {
      const Type* ft = g.find(e->name);
      if (!ft) throw Error(ErrorKind::UnknownVariable, e->name + " is not in the context");
      if (!ft->is_fun()) throw Error(ErrorKind::HeadNotAFunction, e->name + " has type " + show(*ft));
      RegionMap m;
      if (!ft->region_binder.empty()) {
        if (ft->region_binder.size() != e->region_args.size()) {
          mismatch(e->name + " expects " + std::to_string(ft->region_binder.size()) + " region arguments");
        }
        for (std::size_t i = 0; i < e->region_args.size(); ++i) {
          require_place(e->region_args[i]);
          m[ft->region_binder[i]] = e->region_args[i];
        }
      }
      auto arg = check_expr(g, e->kids[0]);
      Type dom = apply_region_subst(m, ft->dom());
      if (!region_subtype(arg.type, dom)) {
        mismatch("argument of " + e->name + " has type " + show(arg.type) + ", expected " + show(dom));
      }
      Effect phi = arg.effect;
      for (const auto& q : apply_region_subst(m, ft->effect)) phi.insert(q);
      return {apply_region_subst(m, ft->cod()), phi};
    }
    case Expr::Kind::If: {
      auto c = check_expr(g, e->kids[0]);
      if (!c.type.is_value() || c.type.base != BaseType::Bool) mismatch("condition has type " + show(c.type));
      auto t = check_expr(g, e->kids[1]);
      auto f = check_expr(g, e->kids[2]);
      if (!types_alpha_equal(t.type, f.type)) {
        mismatch("branches have types " + show(t.type) + " and " + show(f.type));
      }
      Effect phi = c.effect;
      phi.insert(t.effect.begin(), t.effect.end());
      phi.insert(f.effect.begin(), f.effect.end());
      return {t.type, phi};
    }
    case Expr::Kind::Let: {
      auto rhs = check_expr(g, e->kids[0]);
      auto body = check_expr(extend(g, e->pat, rhs.type), e->kids[1]);
      body.effect.insert(rhs.effect.begin(), rhs.effect.end());
      return body;
    }
    case Expr::Kind::New: {
      auto body = check_expr(g, e->kids[0]);
      if (eff(g, body.type).count(e->qual)) {
        throw Error(ErrorKind::EffectEscape,
                    "region " + print_qual(e->qual) + " escapes through type " + show(body.type) + " or the context");
      }
      body.effect.erase(e->qual);
      return body;
    }
  }
  mismatch("unknown expression form");
}

std::pair<TypeContext, Effect> check_store(const RegionContext& r, const Store& s, const TypeContext& hints) {
  TypeContext g;
  for (const auto& b : s.bindings()) {
    auto n = r.region_of(b.name);
    if (!n) throw Error(ErrorKind::RegionAssignmentMissing, b.name + " lies in no region");
    Qual place = Qual::region_name(*n);
    if (!b.value.is_closure()) {
      g.push(b.name, Type::value(b.value.ground().base(), place));
      continue;
    }
    const Type* declared = hints.find(b.name);
    if (!declared || !declared->is_fun()) mismatch("closure " + b.name + " needs a function type annotation");
    if (declared->qual != place) {
      mismatch(b.name + " is annotated at " + print_qual(declared->qual) + " but lives in region " + std::to_string(*n));
    }
    const Closure& c = b.value.closure();
    auto binder = c.region_binder.value_or(std::vector<std::string>{});
    if (binder.size() != declared->region_binder.size()) mismatch("region binder of " + b.name + " differs from its type");
    RegionMap m;
    for (std::size_t i = 0; i < binder.size(); ++i) m[declared->region_binder[i]] = Qual::region_var(binder[i]);
    Type renamed = declared->region_binder == binder ? *declared : apply_region_subst(m, *declared);
    renamed.region_binder = binder;
    if (c.annot && !types_alpha_equal(*c.annot, renamed.dom())) mismatch("domain annotation of " + b.name + " differs from its type");
    TypeContext rec = g;
    rec.push(b.name, *declared);
    Type got = lam_type(rec, binder, c.param, renamed.dom(), c.body, place);
    if (!region_subtype(got.cod(), renamed.cod())) {
      mismatch(b.name + " returns " + show(got.cod()) + ", annotated " + show(renamed.cod()));
    }
    for (const auto& q : got.effect) {
      if (!renamed.effect.count(q)) mismatch(b.name + " has effect " + print_qual(q) + " missing from its annotation");
    }
    g.push(b.name, *declared);
  }
  Effect phi;
  for (const auto& [n, xs] : r.regions()) phi.insert(Qual::region_name(n));
  return {g, phi};
}

ProgramTyping check_program(const RegionContext& r, const Program& p, const TypeContext& hints) {
  auto [g, phi] = check_store(r, p.store, hints);
  auto free = free_region_vars(*p.main);
  if (!free.empty()) throw Error(ErrorKind::UnboundRegionVariable, "unbound region variable " + *free.begin());
  auto res = check_expr(g, p.main);
  for (const auto& q : res.effect) {
    if (!phi.count(q)) {
      throw Error(ErrorKind::DanglingRegion, "effect " + print_qual(q) + " is not a region of the context");
    }
  }
  return {g, phi, res};
}

}  // namespace glreg
