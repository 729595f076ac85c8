#include "glreg/global_types.hpp"

#include "glreg/frontend.hpp"

namespace glreg {

namespace {

[[noreturn]] void mismatch(const std::string& msg) { throw Error(ErrorKind::TypeMismatch, msg); }

std::string show(const Type& t) { return print_type(t); }

bool is_leaf_type(const Type& t) { return t.is_value() || t.is_fun(); }

}  // namespace

PatInfo PatInfo::leaf(const Qual& q) { return q.is_var() ? gvar(q.name) : lo(); }

PatInfo PatInfo::of_pattern(const Pattern& p) {
  if (p.is_var) return gvar(p.name);
  std::vector<PatInfo> es;
  for (const auto& q : p.elems) es.push_back(of_pattern(q));
  return tuple(std::move(es));
}

Qual PatInfo::as_qual() const {
  if (kind == Kind::Tuple) throw Error(ErrorKind::PatternShape, "tuple information where a leaf is required");
  return kind == Kind::GVar ? Qual::var(name) : Qual::lo();
}

std::string to_string(const PatInfo& p) {
  switch (p.kind) {
    case PatInfo::Kind::Lo: return "lo";
    case PatInfo::Kind::GVar: return p.name;
    case PatInfo::Kind::Tuple: {
      std::string s = "(";
      for (std::size_t i = 0; i < p.elems.size(); ++i) s += (i ? ", " : "") + to_string(p.elems[i]);
      return s + (p.elems.size() == 1 ? ",)" : ")");
    }
  }
  return "?";
}

PatInfo pat_of_type(const Type& t) {
  if (is_leaf_type(t)) return PatInfo::leaf(t.qual);
  std::vector<PatInfo> es;
  for (const auto& p : t.parts) es.push_back(pat_of_type(p));
  return PatInfo::tuple(std::move(es));
}

bool pat_leq(const PatInfo& a, const PatInfo& b) {
  if (a.is_leaf() != b.is_leaf()) return false;
  if (a.is_leaf()) return a.kind == PatInfo::Kind::Lo || a == b;
  if (a.elems.size() != b.elems.size()) return false;
  for (std::size_t i = 0; i < a.elems.size(); ++i) {
    if (!pat_leq(a.elems[i], b.elems[i])) return false;
  }
  return true;
}

namespace {

Effect rename_effect(const VarMap& m, const Effect& e) {
  Effect out;
  for (const auto& q : e) {
    auto it = q.is_var() ? m.find(q.name) : m.end();
    out.insert(it == m.end() ? q : Qual::var(it->second));
  }
  return out;
}

// Renames every Π binder to positional names so equality becomes structural.
Type canonical(const Type& t, std::size_t& counter) {
  Type out = t;
  if (t.is_tuple()) {
    for (auto& p : out.parts) p = canonical(p, counter);
    return out;
  }
  if (!t.is_fun() || !t.binder) return out;
  VarMap m;
  for (const auto& x : pattern_vars(*t.binder)) m[x] = "#" + std::to_string(counter++);
  Pattern renamed = *t.binder;
  std::function<void(Pattern&)> ren = [&](Pattern& p) {
    if (p.is_var) p.name = m.at(p.name);
    for (auto& q : p.elems) ren(q);
  };
  ren(renamed);
  out.binder = renamed;
  out.effect = rename_effect(m, t.effect);
  out.parts = {canonical(apply_subst(m, t.dom()), counter), canonical(apply_subst(m, t.cod()), counter)};
  return out;
}

}  // namespace

bool global_types_alpha_equal(const Type& a, const Type& b) {
  std::size_t ca = 0, cb = 0;
  return canonical(a, ca) == canonical(b, cb);
}

bool erasure_equal(const Type& a, const Type& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Type::Kind::Value:
      return a.base == b.base;
    case Type::Kind::Tuple:
      if (a.parts.size() != b.parts.size()) return false;
      for (std::size_t i = 0; i < a.parts.size(); ++i) {
        if (!erasure_equal(a.parts[i], b.parts[i])) return false;
      }
      return true;
    case Type::Kind::Fun: {
      Type a2 = a;
      a2.qual = b.qual;
      return global_types_alpha_equal(a2, b);
    }
  }
  return false;
}

bool type_leq(const Type& a, const Type& b) {
  if (!erasure_equal(a, b)) throw Error(ErrorKind::ShapeMismatch, show(a) + " and " + show(b) + " have different shapes");
  return pat_leq(pat_of_type(a), pat_of_type(b));
}

std::map<Var, PatInfo> info_binding(const Pattern& p, const PatInfo& info) {
  std::map<Var, PatInfo> out;
  std::function<void(const Pattern&, const PatInfo&)> go = [&](const Pattern& q, const PatInfo& i) {
    if (q.is_var) {
      out[q.name] = i;
      return;
    }
    if (i.is_leaf() || i.elems.size() != q.elems.size()) {
      throw Error(ErrorKind::PatternShape, "pattern " + print_pattern(q) + " does not match information " + to_string(i));
    }
    for (std::size_t k = 0; k < q.elems.size(); ++k) go(q.elems[k], i.elems[k]);
  };
  go(p, info);
  return out;
}

namespace {

Qual info_qual(const std::map<Var, PatInfo>& m, const Qual& q) {
  if (!q.is_var()) return q;
  auto it = m.find(q.name);
  return it == m.end() ? q : it->second.as_qual();
}

void info_range(const PatInfo& p, std::set<Var>& out) {
  if (p.kind == PatInfo::Kind::GVar) out.insert(p.name);
  for (const auto& e : p.elems) info_range(e, out);
}

}  // namespace

Effect apply_info(const std::map<Var, PatInfo>& m, const Effect& e) {
  Effect out;
  for (const auto& q : e) {
    Qual r = info_qual(m, q);
    if (!r.is_lo()) out.insert(r);
  }
  return out;
}

PatInfo apply_info(const std::map<Var, PatInfo>& m, const PatInfo& p) {
  if (p.kind == PatInfo::Kind::GVar) {
    auto it = m.find(p.name);
    return it == m.end() ? p : it->second;
  }
  if (p.kind == PatInfo::Kind::Lo) return p;
  std::vector<PatInfo> es;
  for (const auto& e : p.elems) es.push_back(apply_info(m, e));
  return PatInfo::tuple(std::move(es));
}

Type apply_info(const std::map<Var, PatInfo>& m, const Type& t) {
  Type out = t;
  switch (t.kind) {
    case Type::Kind::Value:
      out.qual = info_qual(m, t.qual);
      return out;
    case Type::Kind::Tuple:
      for (auto& p : out.parts) p = apply_info(m, p);
      return out;
    case Type::Kind::Fun:
      break;
  }
  out.qual = info_qual(m, t.qual);
  if (!t.binder) {
    out.effect = apply_info(m, t.effect);
    out.parts = {apply_info(m, t.dom()), apply_info(m, t.cod())};
    return out;
  }
  auto bound = pattern_vars(*t.binder);
  auto inner = m;
  for (const auto& b : bound) inner.erase(b);
  if (inner.empty()) return out;
  std::set<Var> range;
  for (const auto& [x, i] : inner) info_range(i, range);
  // Rename binder variables that would capture the substituted names.
  VarMap ren;
  std::set<Var> taken = range;
  for (const auto& v : free_type_vars(t)) taken.insert(v);
  taken.insert(bound.begin(), bound.end());
  for (const auto& b : bound) {
    if (!range.count(b)) continue;
    Var fresh = b + "'";
    while (taken.count(fresh)) fresh += "'";
    taken.insert(fresh);
    ren[b] = fresh;
  }
  Type dom = t.dom(), cod = t.cod();
  Effect eff = t.effect;
  if (!ren.empty()) {
    dom = apply_subst(ren, dom);
    cod = apply_subst(ren, cod);
    eff = rename_effect(ren, eff);
    Pattern p = *t.binder;
    std::function<void(Pattern&)> go = [&](Pattern& q) {
      if (q.is_var && ren.count(q.name)) q.name = ren.at(q.name);
      for (auto& e : q.elems) go(e);
    };
    go(p);
    out.binder = p;
  }
  out.effect = apply_info(inner, eff);
  out.parts = {apply_info(inner, dom), apply_info(inner, cod)};
  return out;
}

PatInfo p_gamma(const TypeContext& g, const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Var:
      if (!g.find(e->name)) throw Error(ErrorKind::UnknownVariable, e->name + " is not in the context");
      return PatInfo::gvar(e->name);
    case Expr::Kind::Op:
    case Expr::Kind::Lam:
      return PatInfo::leaf(e->qual);
    case Expr::Kind::If:
      return p_gamma(g, e->kids[1]);
    case Expr::Kind::Tuple: {
      std::vector<PatInfo> es;
      for (const auto& k : e->kids) es.push_back(p_gamma(g, k));
      return PatInfo::tuple(std::move(es));
    }
    case Expr::Kind::Let: {
      PatInfo rhs = p_gamma(g, e->kids[0]);
      auto t = gsynth(g, e->kids[0]).type;
      TypeContext inner = ctx_join(g, flatten_pattern(e->pat, t));
      return apply_info(info_binding(e->pat, rhs), p_gamma(inner, e->kids[1]));
    }
    case Expr::Kind::App: {
      const Type* f = g.find(e->name);
      if (!f) throw Error(ErrorKind::UnknownVariable, e->name + " is not in the context");
      if (!f->is_fun() || !f->binder) throw Error(ErrorKind::HeadNotAFunction, e->name + " has type " + show(*f));
      return pat_of_type(apply_info(info_binding(*f->binder, p_gamma(g, e->kids[0])), f->cod()));
    }
    case Expr::Kind::New:
      break;
  }
  mismatch("'new' is not a global-language form");
}

TypeContext ctx_join(const TypeContext& g1, const TypeContext& g2, std::vector<std::string>* diags) {
  TypeContext out = g1;
  auto note = [&](std::string s) {
    if (diags) diags->push_back(std::move(s));
  };
  for (const auto& [x, v2] : g2.entries()) {
    const Type* v1p = out.find(x);
    if (!v1p) {
      out.push(x, v2);
      continue;
    }
    Type v1 = *v1p;
    bool lo1 = is_leaf_type(v1) && v1.qual.is_lo();
    bool lo2 = is_leaf_type(v2) && v2.qual.is_lo();
    if (lo1) {
      out.erase(x);
      out.push(x, v2);
    } else if (!lo2) {
      if (!erasure_equal(v1, v2)) {
        note("global " + x + " : " + show(v1) + " re-bound at " + show(v2) + "; using the new type");
        out.erase(x);
        out.push(x, v2);
      } else if (!(v1 == v2)) {
        note("global " + x + " keeps " + show(v1) + " over " + show(v2));
      }
    } else {
      note("global " + x + " shadowed by a local binding; both dropped");
      out.erase(x);
    }
  }
  return out;
}

std::set<Var> gl(const TypeContext& g) {
  std::set<Var> out;
  for (const auto& [x, t] : g.entries()) {
    auto fv = free_type_vars(t);
    out.insert(fv.begin(), fv.end());
  }
  return out;
}

namespace {

void add_qual(Effect& e, const Qual& q) {
  if (q.is_var()) e.insert(q);
}

// loc: variables of local type carry their own name as information.
Type upgrade(const ExprPtr& e, const Type& t) {
  if (e->kind == Expr::Kind::Var && is_leaf_type(t) && t.qual.is_lo()) {
    Type out = t;
    out.qual = Qual::var(e->name);
    return out;
  }
  if (e->kind == Expr::Kind::Tuple && t.is_tuple() && t.parts.size() == e->kids.size()) {
    Type out = t;
    for (std::size_t i = 0; i < t.parts.size(); ++i) out.parts[i] = upgrade(e->kids[i], t.parts[i]);
    return out;
  }
  return t;
}

// Greatest lower bound of two types with equal erasure.
Type meet(const Type& a, const Type& b) {
  if (a.is_tuple()) {
    Type out = a;
    for (std::size_t i = 0; i < a.parts.size(); ++i) out.parts[i] = meet(a.parts[i], b.parts[i]);
    return out;
  }
  if (a.qual == b.qual) return a;
  Type out = a;
  out.qual = Qual::lo();
  return out;
}

TypeContext bind_pattern(const Pattern& p, const Type& t) {
  try {
    return flatten_pattern(p, t);
  } catch (const Error& e) {
    throw Error(ErrorKind::PatternShape, e.what());
  }
}

void require_meaningful(const Pattern& p, const Type& t) {
  if (!pat_leq(pat_of_type(t), PatInfo::of_pattern(p))) {
    throw Error(ErrorKind::MeaninglessBinder,
                "binder " + print_pattern(p) + " cannot carry the information of " + show(t));
  }
}

}  // namespace

GlobalJudgment gsynth(const TypeContext& g, const ExprPtr& e, std::vector<std::string>* diags) {
  switch (e->kind) {
    case Expr::Kind::Var: {
      const Type* t = g.find(e->name);
      if (!t) throw Error(ErrorKind::UnknownVariable, e->name + " is not in the context");
      return {*t, {}};
    }
    case Expr::Kind::Op: {
      if (e->qual.is_region() || e->qual.is_region_var()) mismatch("places belong to region programs");
      Effect phi;
      add_qual(phi, e->qual);
      if (e->literal) return {Type::value(e->literal->base(), e->qual), phi};
      auto sig = op_signature(e->op);
      if (!sig) mismatch("unknown operator " + e->op);
      if (sig->args.size() != e->kids.size()) mismatch("operator " + e->op + " applied to the wrong number of arguments");
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        auto r = gsynth(g, e->kids[i], diags);
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
        auto r = gsynth(g, k, diags);
        ts.push_back(std::move(r.type));
        phi.insert(r.effect.begin(), r.effect.end());
      }
      return {Type::tuple(std::move(ts)), phi};
    }
    case Expr::Kind::Lam: {
      Type dom = e->annot ? *e->annot : Type::tuple({});
      if (!e->annot && !(e->pat.elems.empty() && !e->pat.is_var)) mismatch("lambda needs a domain annotation");
      require_meaningful(e->pat, dom);
      auto body = gsynth(ctx_join(g, bind_pattern(e->pat, dom), diags), e->kids[0], diags);
      Effect phi;
      add_qual(phi, e->qual);
      return {Type::global_fun(e->pat, dom, body.effect, body.type, e->qual), phi};
    }
    case Expr::Kind::App: {
      const Type* f = g.find(e->name);
      if (!f) throw Error(ErrorKind::UnknownVariable, e->name + " is not in the context");
      if (!f->is_fun() || !f->binder) throw Error(ErrorKind::HeadNotAFunction, e->name + " has type " + show(*f));
      auto arg = gsynth(g, e->kids[0], diags);
      auto m = info_binding(*f->binder, p_gamma(g, e->kids[0]));
      Type expected = apply_info(m, f->dom());
      Type actual = upgrade(e->kids[0], arg.type);
      if (!erasure_equal(expected, actual)) {
        mismatch("argument of " + e->name + " has type " + show(actual) + ", expected " + show(expected));
      }
      if (!pat_leq(pat_of_type(expected), pat_of_type(actual))) {
        mismatch("argument of " + e->name + " carries less information than " + show(expected));
      }
      Effect phi = arg.effect;
      for (const auto& q : apply_info(m, f->effect)) phi.insert(q);
      return {apply_info(m, f->cod()), phi};
    }
    case Expr::Kind::If: {
      auto c = gsynth(g, e->kids[0], diags);
      if (!c.type.is_value() || c.type.base != BaseType::Bool) mismatch("condition has type " + show(c.type));
      auto t = gsynth(g, e->kids[1], diags);
      auto f = gsynth(g, e->kids[2], diags);
      if (!erasure_equal(t.type, f.type)) mismatch("branches have types " + show(t.type) + " and " + show(f.type));
      Effect phi = c.effect;
      phi.insert(t.effect.begin(), t.effect.end());
      phi.insert(f.effect.begin(), f.effect.end());
      return {meet(t.type, f.type), phi};
    }
    case Expr::Kind::Let: {
      auto rhs = gsynth(g, e->kids[0], diags);
      require_meaningful(e->pat, rhs.type);
      auto body = gsynth(ctx_join(g, bind_pattern(e->pat, rhs.type), diags), e->kids[1], diags);
      body.effect.insert(rhs.effect.begin(), rhs.effect.end());
      return body;
    }
    case Expr::Kind::New:
      break;
  }
  mismatch("'new' is not a global-language form");
}

Type gcheck(const TypeContext& g, const std::set<Var>& phi, const ExprPtr& e) {
  auto r = gsynth(g, e);
  for (const auto& q : r.effect) {
    if (!phi.count(q.name)) throw Error(ErrorKind::EffectEscape, "effect " + q.name + " is not a declared global");
  }
  return r.type;
}

std::pair<TypeContext, std::set<Var>> gcheck_store(const Store& s, const TypeContext& hints) {
  TypeContext g;
  std::set<Var> phi;
  for (const auto& b : s.bindings()) {
    const Type* hint = hints.find(b.name);
    if (!b.value.is_closure()) {
      Type t = hint ? *hint : Type::value(b.value.ground().base(), Qual::lo());
      if (!t.is_value() || t.base != b.value.ground().base()) {
        mismatch(b.name + " holds " + to_string(b.value.ground()) + " but is annotated " + show(t));
      }
      if (!t.qual.is_lo() && t.qual != Qual::var(b.name)) {
        mismatch(b.name + " may only be qualified lo or " + b.name);
      }
      if (t.qual.is_var()) phi.insert(b.name);
      g.push(b.name, t);
      continue;
    }
    if (!hint || !hint->is_fun() || !hint->binder) mismatch("closure " + b.name + " needs a function type annotation");
    const Closure& c = b.value.closure();
    VarMap m;
    try {
      m = subst_builder(*hint->binder, c.param);
    } catch (const Error&) {
      mismatch("parameter of " + b.name + " does not match the binder of its type");
    }
    Type dom = apply_subst(m, hint->dom());
    Type cod = apply_subst(m, hint->cod());
    Effect latent = rename_effect(m, hint->effect);
    if (c.annot && !global_types_alpha_equal(*c.annot, dom)) mismatch("domain annotation of " + b.name + " differs from its type");
    require_meaningful(c.param, dom);
    TypeContext inner = g;
    inner.extend(b.name, *hint);
    TypeContext params = bind_pattern(c.param, dom);
    for (const auto& [x, t] : params.entries()) inner.extend(x, t);
    auto body = gsynth(inner, c.body);
    if (!erasure_equal(cod, body.type) || !pat_leq(pat_of_type(cod), pat_of_type(body.type))) {
      mismatch(b.name + " returns " + show(body.type) + ", annotated " + show(cod));
    }
    for (const auto& q : body.effect) {
      if (!latent.count(q)) mismatch(b.name + " has effect " + q.name + " missing from its annotation");
    }
    if (hint->qual.is_var()) phi.insert(hint->qual.name);
    g.push(b.name, *hint);
  }
  return {g, phi};
}

GlobalProgramTyping gcheck_program(const Program& p, const TypeContext& hints) {
  GlobalProgramTyping out;
  auto [g, declared] = gcheck_store(p.store, hints);
  out.gamma = g;
  out.phi = gl(g);
  out.phi.insert(declared.begin(), declared.end());
  out.result = gsynth(g, p.main, &out.diagnostics);
  for (const auto& q : out.result.effect) {
    if (!out.phi.count(q.name)) throw Error(ErrorKind::EffectEscape, "effect " + q.name + " is not a declared global");
  }
  return out;
}

}  // namespace glreg
