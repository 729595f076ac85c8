#include "glreg/syntax.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace glreg {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::ArityError: return "ArityError";
    case ErrorKind::TypeErrorAtRuntime: return "TypeErrorAtRuntime";
    case ErrorKind::IndexOutOfBounds: return "IndexOutOfBounds";
    case ErrorKind::UnknownRegion: return "UnknownRegion";
    case ErrorKind::DuplicateLocation: return "DuplicateLocation";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::EffectEscape: return "EffectEscape";
    case ErrorKind::RegionBinderClash: return "RegionBinderClash";
    case ErrorKind::PatternShape: return "PatternShape";
    case ErrorKind::RegionAssignmentMissing: return "RegionAssignmentMissing";
    case ErrorKind::DanglingRegion: return "DanglingRegion";
    case ErrorKind::JoinConflict: return "JoinConflict";
    case ErrorKind::MeaninglessBinder: return "MeaninglessBinder";
    case ErrorKind::HeadNotAFunction: return "HeadNotAFunction";
    case ErrorKind::UnboundRegionVariable: return "UnboundRegionVariable";
    case ErrorKind::GlobalShadowing: return "GlobalShadowing";
    case ErrorKind::DanglingEntry: return "DanglingEntry";
    case ErrorKind::Syntax: return "SyntaxError";
  }
  return "Error";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

std::string to_string(const Qual& q) {
  switch (q.kind) {
    case Qual::Kind::Lo: return "lo";
    case Qual::Kind::Var: return q.name;
    case Qual::Kind::Region: return std::to_string(q.region);
    case Qual::Kind::RegionVar: return q.name;
  }
  return "?";
}

// ---------------------------------------------------------------------------

namespace {

void collect_vars(const Pattern& p, std::vector<Var>& out) {
  if (p.is_var) {
    out.push_back(p.name);
    return;
  }
  for (const auto& e : p.elems) collect_vars(e, out);
}

}  // namespace

std::vector<Var> pattern_vars(const Pattern& p) {
  std::vector<Var> out;
  collect_vars(p, out);
  return out;
}

void check_linear(const Pattern& p) {
  auto vs = pattern_vars(p);
  std::set<Var> seen;
  for (const auto& v : vs) {
    if (!seen.insert(v).second) throw Error(ErrorKind::ShapeMismatch, "variable '" + v + "' repeated in pattern");
  }
}

// ---------------------------------------------------------------------------

const char* to_string(BaseType b) {
  switch (b) {
    case BaseType::Int: return "int";
    case BaseType::Bool: return "bool";
    case BaseType::Array: return "array";
  }
  return "?";
}

BaseType Ground::base() const {
  if (std::holds_alternative<std::int64_t>(v)) return BaseType::Int;
  if (std::holds_alternative<bool>(v)) return BaseType::Bool;
  return BaseType::Array;
}

std::string to_string(const Ground& g) {
  if (auto n = std::get_if<std::int64_t>(&g.v)) return std::to_string(*n);
  if (auto b = std::get_if<bool>(&g.v)) return *b ? "true" : "false";
  const auto& xs = std::get<std::vector<std::int64_t>>(g.v);
  std::string out = "{";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(xs[i]);
  }
  return out + "}";
}

bool is_unary_shift(const std::string& op) {
  if (op.size() < 2 || (op[0] != '+' && op[0] != '-')) return false;
  return std::all_of(op.begin() + 1, op.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::optional<OpSig> op_signature(const std::string& op) {
  using B = BaseType;
  if (op == "+" || op == "-") return OpSig{{B::Int, B::Int}, B::Int};
  if (op == "==" || op == "<") return OpSig{{B::Int, B::Int}, B::Bool};
  if (op == "and" || op == "or") return OpSig{{B::Bool, B::Bool}, B::Bool};
  if (op == "not") return OpSig{{B::Bool}, B::Bool};
  if (op == "index") return OpSig{{B::Array, B::Int}, B::Int};
  if (op == "update") return OpSig{{B::Array, B::Int, B::Int}, B::Array};
  if (is_unary_shift(op)) return OpSig{{B::Int}, B::Int};
  return std::nullopt;
}

namespace {

std::int64_t as_int(const Ground& g, const std::string& op) {
  if (auto n = std::get_if<std::int64_t>(&g.v)) return *n;
  throw Error(ErrorKind::TypeErrorAtRuntime, "operator " + op + " expects int, got " + to_string(g));
}

bool as_bool(const Ground& g, const std::string& op) {
  if (auto b = std::get_if<bool>(&g.v)) return *b;
  throw Error(ErrorKind::TypeErrorAtRuntime, "operator " + op + " expects bool, got " + to_string(g));
}

const std::vector<std::int64_t>& as_array(const Ground& g, const std::string& op) {
  if (auto xs = std::get_if<std::vector<std::int64_t>>(&g.v)) return *xs;
  throw Error(ErrorKind::TypeErrorAtRuntime, "operator " + op + " expects array, got " + to_string(g));
}

std::size_t checked_index(const std::vector<std::int64_t>& xs, std::int64_t i) {
  if (i < 0 || static_cast<std::size_t>(i) >= xs.size()) {
    throw Error(ErrorKind::IndexOutOfBounds,
                "index " + std::to_string(i) + " outside array of length " + std::to_string(xs.size()));
  }
  return static_cast<std::size_t>(i);
}

}  // namespace

Ground apply_op(const std::string& op, const std::vector<Ground>& args) {
  auto sig = op_signature(op);
  if (!sig) throw Error(ErrorKind::ArityError, "unknown operator '" + op + "'");
  if (sig->args.size() != args.size()) {
    throw Error(ErrorKind::ArityError, "operator " + op + " takes " + std::to_string(sig->args.size()) +
                                           " arguments, got " + std::to_string(args.size()));
  }
  if (op == "+") return Ground::integer(as_int(args[0], op) + as_int(args[1], op));
  if (op == "-") return Ground::integer(as_int(args[0], op) - as_int(args[1], op));
  if (op == "==") return Ground::boolean(as_int(args[0], op) == as_int(args[1], op));
  if (op == "<") return Ground::boolean(as_int(args[0], op) < as_int(args[1], op));
  if (op == "and") return Ground::boolean(as_bool(args[0], op) && as_bool(args[1], op));
  if (op == "or") return Ground::boolean(as_bool(args[0], op) || as_bool(args[1], op));
  if (op == "not") return Ground::boolean(!as_bool(args[0], op));
  if (op == "index") {
    const auto& xs = as_array(args[0], op);
    return Ground::integer(xs[checked_index(xs, as_int(args[1], op))]);
  }
  if (op == "update") {
    auto xs = as_array(args[0], op);
    xs[checked_index(xs, as_int(args[1], op))] = as_int(args[2], op);
    return Ground::array(std::move(xs));
  }
  // +N / -N
  std::int64_t n = 0;
  std::from_chars(op.data() + 1, op.data() + op.size(), n);
  auto x = as_int(args[0], op);
  return Ground::integer(op[0] == '+' ? x + n : x - n);
}

// ---------------------------------------------------------------------------

Type Type::value(BaseType b, Qual q) {
  Type t;
  t.kind = Kind::Value;
  t.base = b;
  t.qual = std::move(q);
  return t;
}

Type Type::region_fun(std::vector<std::string> binder, Type dom, Effect eff, Type cod, Qual q) {
  Type t;
  t.kind = Kind::Fun;
  t.region_binder = std::move(binder);
  t.effect = std::move(eff);
  t.parts = {std::move(dom), std::move(cod)};
  t.qual = std::move(q);
  return t;
}

Type Type::global_fun(Pattern binder, Type dom, Effect eff, Type cod, Qual q) {
  Type t;
  t.kind = Kind::Fun;
  t.binder = std::move(binder);
  t.effect = std::move(eff);
  t.parts = {std::move(dom), std::move(cod)};
  t.qual = std::move(q);
  return t;
}

Type Type::tuple(std::vector<Type> elems) {
  Type t;
  t.kind = Kind::Tuple;
  t.parts = std::move(elems);
  return t;
}

// ---------------------------------------------------------------------------

namespace {

std::shared_ptr<Expr> make(Expr::Kind k) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  return e;
}

}  // namespace

ExprPtr Expr::var(Var n) {
  auto e = make(Kind::Var);
  e->name = std::move(n);
  return e;
}

ExprPtr Expr::lit(Ground g, Qual q) {
  auto e = make(Kind::Op);
  e->op = "lit";
  e->literal = std::move(g);
  e->qual = std::move(q);
  return e;
}

ExprPtr Expr::op_at(std::string op, std::vector<ExprPtr> args, Qual q) {
  auto e = make(Kind::Op);
  e->op = std::move(op);
  e->kids = std::move(args);
  e->qual = std::move(q);
  return e;
}

ExprPtr Expr::lam(Pattern p, std::optional<Type> annot, ExprPtr body, Qual q,
                  std::optional<std::vector<std::string>> region_binder) {
  auto e = make(Kind::Lam);
  e->pat = std::move(p);
  e->annot = std::move(annot);
  e->kids = {std::move(body)};
  e->qual = std::move(q);
  e->region_binder = std::move(region_binder);
  return e;
}

ExprPtr Expr::tuple(std::vector<ExprPtr> elems) {
  auto e = make(Kind::Tuple);
  e->kids = std::move(elems);
  return e;
}

ExprPtr Expr::app(Var head, ExprPtr arg, std::vector<Qual> region_args) {
  auto e = make(Kind::App);
  e->name = std::move(head);
  e->kids = {std::move(arg)};
  e->region_args = std::move(region_args);
  return e;
}

ExprPtr Expr::if_(ExprPtr c, ExprPtr t, ExprPtr f) {
  auto e = make(Kind::If);
  e->kids = {std::move(c), std::move(t), std::move(f)};
  return e;
}

ExprPtr Expr::let(Pattern p, ExprPtr rhs, ExprPtr body) {
  auto e = make(Kind::Let);
  e->pat = std::move(p);
  e->kids = {std::move(rhs), std::move(body)};
  return e;
}

ExprPtr Expr::new_(Qual place, ExprPtr body) {
  auto e = make(Kind::New);
  e->qual = std::move(place);
  e->kids = {std::move(body)};
  return e;
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind || a.name != b.name || a.op != b.op || a.literal != b.literal || a.qual != b.qual ||
      a.pat != b.pat || a.annot != b.annot || a.region_binder != b.region_binder ||
      a.region_args != b.region_args || a.kids.size() != b.kids.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.kids.size(); ++i) {
    if (!expr_equal(*a.kids[i], *b.kids[i])) return false;
  }
  return true;
}

bool is_canonical(const Expr& e) {
  if (e.kind == Expr::Kind::Var) return true;
  if (e.kind != Expr::Kind::Tuple) return false;
  return std::all_of(e.kids.begin(), e.kids.end(), [](const ExprPtr& k) { return is_canonical(*k); });
}

Pattern canonical_pattern(const Expr& e) {
  if (e.kind == Expr::Kind::Var) return Pattern::var(e.name);
  if (e.kind != Expr::Kind::Tuple) throw Error(ErrorKind::PatternShape, "expression is not canonical");
  std::vector<Pattern> elems;
  for (const auto& k : e.kids) elems.push_back(canonical_pattern(*k));
  return Pattern::tuple(std::move(elems));
}

ExprPtr pattern_expr(const Pattern& p) {
  if (p.is_var) return Expr::var(p.name);
  std::vector<ExprPtr> elems;
  for (const auto& q : p.elems) elems.push_back(pattern_expr(q));
  return Expr::tuple(std::move(elems));
}

// ---------------------------------------------------------------------------

bool value_equal(const StorableValue& a, const StorableValue& b) {
  if (a.is_closure() != b.is_closure()) return false;
  if (!a.is_closure()) return a.ground() == b.ground();
  const auto& x = a.closure();
  const auto& y = b.closure();
  return x.region_binder == y.region_binder && x.param == y.param && x.annot == y.annot &&
         expr_equal(*x.body, *y.body);
}

const StorableValue* Store::find(const Var& x) const {
  for (const auto& b : bindings_) {
    if (b.name == x) return &b.value;
  }
  return nullptr;
}

void Store::append(Var x, StorableValue v) {
  if (contains(x)) throw Error(ErrorKind::DuplicateLocation, "store already binds '" + x + "'");
  bindings_.push_back({std::move(x), std::move(v)});
}

void Store::rebind(const Var& x, StorableValue v) {
  remove(x);
  bindings_.push_back({x, std::move(v)});
}

void Store::remove(const Var& x) {
  std::erase_if(bindings_, [&](const Binding& b) { return b.name == x; });
}

std::vector<Var> Store::names() const {
  std::vector<Var> out;
  out.reserve(bindings_.size());
  for (const auto& b : bindings_) out.push_back(b.name);
  return out;
}

Store store_remove(const Store& s, const std::set<Var>& vars) {
  Store out;
  for (const auto& b : s.bindings()) {
    if (!vars.count(b.name)) out.append(b.name, b.value);
  }
  return out;
}

std::uint64_t fresh_index(const Var& x) {
  if (x.size() < 2 || x[0] != 'x') return 0;
  std::uint64_t n = 0;
  auto [ptr, ec] = std::from_chars(x.data() + 1, x.data() + x.size(), n);
  if (ec != std::errc() || ptr != x.data() + x.size()) return 0;
  return n;
}

Var fresh_var(const Store& s) {
  std::uint64_t top = 0;
  for (const auto& b : s.bindings()) top = std::max(top, fresh_index(b.name));
  return "x" + std::to_string(top + 1);
}

// ---------------------------------------------------------------------------

const Type* TypeContext::find(const Var& x) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->first == x) return &it->second;
  }
  return nullptr;
}

void TypeContext::push(Var x, Type t) { entries_.emplace_back(std::move(x), std::move(t)); }

void TypeContext::extend(Var x, Type t) {
  erase(x);
  push(std::move(x), std::move(t));
}

void TypeContext::erase(const Var& x) {
  std::erase_if(entries_, [&](const auto& e) { return e.first == x; });
}

// ---------------------------------------------------------------------------
// Free variables

namespace {

void remove_all(std::set<Var>& s, const Pattern& p) {
  for (const auto& v : pattern_vars(p)) s.erase(v);
}

void fv(const Expr& e, bool with_quals, std::set<Var>& out);

void add_qual(const Qual& q, bool with_quals, std::set<Var>& out) {
  if (with_quals && q.is_var()) out.insert(q.name);
}

void fv(const Expr& e, bool with_quals, std::set<Var>& out) {
  switch (e.kind) {
    case Expr::Kind::Var:
      out.insert(e.name);
      return;
    case Expr::Kind::Op:
      add_qual(e.qual, with_quals, out);
      for (const auto& k : e.kids) fv(*k, with_quals, out);
      return;
    case Expr::Kind::Lam: {
      add_qual(e.qual, with_quals, out);
      std::set<Var> inner;
      fv(*e.kids[0], with_quals, inner);
      if (with_quals && e.annot) {
        auto tv = free_type_vars(*e.annot);
        inner.insert(tv.begin(), tv.end());
      }
      remove_all(inner, e.pat);
      out.insert(inner.begin(), inner.end());
      return;
    }
    case Expr::Kind::Tuple:
    case Expr::Kind::If:
    case Expr::Kind::New:
      for (const auto& k : e.kids) fv(*k, with_quals, out);
      return;
    case Expr::Kind::App:
      out.insert(e.name);
      fv(*e.kids[0], with_quals, out);
      return;
    case Expr::Kind::Let: {
      fv(*e.kids[0], with_quals, out);
      std::set<Var> inner;
      fv(*e.kids[1], with_quals, inner);
      remove_all(inner, e.pat);
      out.insert(inner.begin(), inner.end());
      return;
    }
  }
}

void ftv(const Type& t, std::set<Var>& out) {
  if (t.qual.is_var()) out.insert(t.qual.name);
  if (t.is_fun()) {
    std::set<Var> inner;
    for (const auto& p : t.parts) ftv(p, inner);
    for (const auto& q : t.effect) {
      if (q.is_var()) inner.insert(q.name);
    }
    if (t.binder) remove_all(inner, *t.binder);
    out.insert(inner.begin(), inner.end());
    return;
  }
  for (const auto& p : t.parts) ftv(p, out);
}

void frv_type(const Type& t, std::set<std::string>& out) {
  if (t.qual.is_region_var()) out.insert(t.qual.name);
  if (t.is_fun()) {
    std::set<std::string> inner;
    for (const auto& p : t.parts) frv_type(p, inner);
    for (const auto& q : t.effect) {
      if (q.is_region_var()) inner.insert(q.name);
    }
    for (const auto& r : t.region_binder) inner.erase(r);
    out.insert(inner.begin(), inner.end());
    return;
  }
  for (const auto& p : t.parts) frv_type(p, out);
}

void frv(const Expr& e, std::set<std::string>& out) {
  switch (e.kind) {
    case Expr::Kind::Var:
      return;
    case Expr::Kind::Op:
      if (e.qual.is_region_var()) out.insert(e.qual.name);
      for (const auto& k : e.kids) frv(*k, out);
      return;
    case Expr::Kind::Lam: {
      if (e.qual.is_region_var()) out.insert(e.qual.name);
      std::set<std::string> inner;
      frv(*e.kids[0], inner);
      if (e.annot) frv_type(*e.annot, inner);
      if (e.region_binder) {
        for (const auto& r : *e.region_binder) inner.erase(r);
      }
      out.insert(inner.begin(), inner.end());
      return;
    }
    case Expr::Kind::App:
      for (const auto& q : e.region_args) {
        if (q.is_region_var()) out.insert(q.name);
      }
      frv(*e.kids[0], out);
      return;
    case Expr::Kind::New: {
      std::set<std::string> inner;
      frv(*e.kids[0], inner);
      if (e.qual.is_region_var()) inner.erase(e.qual.name);
      out.insert(inner.begin(), inner.end());
      return;
    }
    default:
      for (const auto& k : e.kids) frv(*k, out);
      return;
  }
}

}  // namespace

std::set<Var> free_vars(const Expr& e) {
  std::set<Var> out;
  fv(e, false, out);
  return out;
}

std::set<Var> free_vars_all(const Expr& e) {
  std::set<Var> out;
  fv(e, true, out);
  return out;
}

std::set<std::string> free_region_vars(const Expr& e) {
  std::set<std::string> out;
  frv(e, out);
  return out;
}

std::set<std::string> free_region_vars(const Type& t) {
  std::set<std::string> out;
  frv_type(t, out);
  return out;
}

std::set<Var> free_type_vars(const Type& t) {
  std::set<Var> out;
  ftv(t, out);
  return out;
}

// ---------------------------------------------------------------------------
// Substitution

VarMap subst_builder(const Pattern& p, const Pattern& p2) {
  VarMap out;
  struct Rec {
    VarMap& out;
    void operator()(const Pattern& a, const Pattern& b) {
      if (a.is_var) {
        if (!b.is_var) throw Error(ErrorKind::ShapeMismatch, "variable '" + a.name + "' matched against a tuple");
        out[a.name] = b.name;
        return;
      }
      if (a.elems.empty()) return;  // [⟨⟩ ↦ p] = []
      if (b.is_var || a.elems.size() != b.elems.size()) {
        throw Error(ErrorKind::ShapeMismatch, "tuple pattern arity mismatch");
      }
      for (std::size_t i = 0; i < a.elems.size(); ++i) (*this)(a.elems[i], b.elems[i]);
    }
  };
  Rec{out}(p, p2);
  return out;
}

namespace {

Qual subst_qual(const VarMap& m, const Qual& q) {
  if (!q.is_var()) return q;
  auto it = m.find(q.name);
  return it == m.end() ? q : Qual::var(it->second);
}

Var subst_name(const VarMap& m, const Var& x) {
  auto it = m.find(x);
  return it == m.end() ? x : it->second;
}

VarMap without(const VarMap& m, const std::vector<Var>& bound) {
  VarMap out = m;
  for (const auto& b : bound) out.erase(b);
  return out;
}

Pattern rename_pattern(const Pattern& p, const VarMap& r) {
  if (p.is_var) return Pattern::var(subst_name(r, p.name));
  std::vector<Pattern> elems;
  for (const auto& e : p.elems) elems.push_back(rename_pattern(e, r));
  return Pattern::tuple(std::move(elems));
}

// Renames binder variables of `pat` that would capture a variable introduced by
// `m` into `scope`. Returns the renaming to apply inside the scope.
VarMap capture_renaming(const VarMap& m, const Pattern& pat, const std::set<Var>& scope_fv) {
  auto bound = pattern_vars(pat);
  std::set<Var> range;
  for (const auto& [k, v] : m) {
    if (scope_fv.count(k)) range.insert(v);
  }
  VarMap ren;
  for (const auto& b : bound) {
    if (!range.count(b)) continue;
    Var fresh = b;
    do {
      fresh += "'";
    } while (range.count(fresh) || scope_fv.count(fresh) || m.count(fresh) ||
             std::find(bound.begin(), bound.end(), fresh) != bound.end());
    ren[b] = fresh;
  }
  return ren;
}

bool touches(const VarMap& m, const std::set<Var>& scope_fv) {
  for (const auto& [k, v] : m) {
    if (scope_fv.count(k)) return true;
  }
  return false;
}

}  // namespace

Type apply_subst(const VarMap& m, const Type& t) {
  if (m.empty()) return t;
  Type out = t;
  out.qual = subst_qual(m, t.qual);
  if (t.is_fun()) {
    VarMap inner = t.binder ? without(m, pattern_vars(*t.binder)) : m;
    for (auto& p : out.parts) p = apply_subst(inner, p);
    Effect eff;
    for (const auto& q : t.effect) eff.insert(subst_qual(inner, q));
    out.effect = std::move(eff);
    return out;
  }
  for (auto& p : out.parts) p = apply_subst(m, p);
  return out;
}

ExprPtr apply_subst(const VarMap& m, const ExprPtr& e) {
  if (m.empty()) return e;
  switch (e->kind) {
    case Expr::Kind::Var: {
      auto it = m.find(e->name);
      return it == m.end() ? e : Expr::var(it->second);
    }
    case Expr::Kind::Op: {
      auto out = std::make_shared<Expr>(*e);
      out->qual = subst_qual(m, e->qual);
      for (auto& k : out->kids) k = apply_subst(m, k);
      return out;
    }
    case Expr::Kind::Lam: {
      auto out = std::make_shared<Expr>(*e);
      out->qual = subst_qual(m, e->qual);
      VarMap inner = without(m, pattern_vars(e->pat));
      if (inner.empty()) return out;
      std::set<Var> scope = free_vars_all(*e->kids[0]);
      if (e->annot) {
        auto tv = free_type_vars(*e->annot);
        scope.insert(tv.begin(), tv.end());
      }
      if (!touches(inner, scope)) return out;
      auto ren = capture_renaming(inner, e->pat, scope);
      ExprPtr body = e->kids[0];
      if (!ren.empty()) {
        out->pat = rename_pattern(e->pat, ren);
        body = apply_subst(ren, body);
        if (out->annot) out->annot = apply_subst(ren, *out->annot);
      }
      out->kids[0] = apply_subst(inner, body);
      if (out->annot) out->annot = apply_subst(inner, *out->annot);
      return out;
    }
    case Expr::Kind::Let: {
      auto out = std::make_shared<Expr>(*e);
      out->kids[0] = apply_subst(m, e->kids[0]);
      VarMap inner = without(m, pattern_vars(e->pat));
      if (inner.empty()) return out;
      std::set<Var> scope = free_vars_all(*e->kids[1]);
      if (!touches(inner, scope)) return out;
      auto ren = capture_renaming(inner, e->pat, scope);
      ExprPtr body = e->kids[1];
      if (!ren.empty()) {
        out->pat = rename_pattern(e->pat, ren);
        body = apply_subst(ren, body);
      }
      out->kids[1] = apply_subst(inner, body);
      return out;
    }
    case Expr::Kind::App: {
      auto out = std::make_shared<Expr>(*e);
      out->name = subst_name(m, e->name);
      out->kids[0] = apply_subst(m, e->kids[0]);
      return out;
    }
    default: {
      auto out = std::make_shared<Expr>(*e);
      for (auto& k : out->kids) k = apply_subst(m, k);
      return out;
    }
  }
}

namespace {

Qual subst_place(const RegionMap& m, const Qual& q) {
  if (!q.is_region_var()) return q;
  auto it = m.find(q.name);
  return it == m.end() ? q : it->second;
}

RegionMap without_regions(const RegionMap& m, const std::vector<std::string>& bound) {
  RegionMap out = m;
  for (const auto& b : bound) out.erase(b);
  return out;
}

}  // namespace

Effect apply_region_subst(const RegionMap& m, const Effect& eff) {
  Effect out;
  for (const auto& q : eff) out.insert(subst_place(m, q));
  return out;
}

Type apply_region_subst(const RegionMap& m, const Type& t) {
  if (m.empty()) return t;
  Type out = t;
  out.qual = subst_place(m, t.qual);
  if (t.is_fun()) {
    RegionMap inner = without_regions(m, t.region_binder);
    for (auto& p : out.parts) p = apply_region_subst(inner, p);
    out.effect = apply_region_subst(inner, t.effect);
    return out;
  }
  for (auto& p : out.parts) p = apply_region_subst(m, p);
  return out;
}

ExprPtr apply_region_subst(const RegionMap& m, const ExprPtr& e) {
  if (m.empty()) return e;
  switch (e->kind) {
    case Expr::Kind::Var:
      return e;
    case Expr::Kind::Lam: {
      auto out = std::make_shared<Expr>(*e);
      out->qual = subst_place(m, e->qual);
      RegionMap inner = e->region_binder ? without_regions(m, *e->region_binder) : m;
      out->kids[0] = apply_region_subst(inner, e->kids[0]);
      if (out->annot) out->annot = apply_region_subst(inner, *out->annot);
      return out;
    }
    case Expr::Kind::New: {
      auto out = std::make_shared<Expr>(*e);
      if (e->qual.is_region_var()) {
        out->kids[0] = apply_region_subst(without_regions(m, {e->qual.name}), e->kids[0]);
      } else {
        out->kids[0] = apply_region_subst(m, e->kids[0]);
      }
      return out;
    }
    default: {
      auto out = std::make_shared<Expr>(*e);
      out->qual = subst_place(m, e->qual);
      for (auto& q : out->region_args) q = subst_place(m, q);
      for (auto& k : out->kids) k = apply_region_subst(m, k);
      return out;
    }
  }
}

TypeContext flatten_pattern(const Pattern& p, const Type& t) {
  TypeContext out;
  struct Rec {
    TypeContext& out;
    void operator()(const Pattern& p, const Type& t) {
      if (p.is_var) {
        if (t.is_tuple()) {
          throw Error(ErrorKind::ShapeMismatch, "variable '" + p.name + "' bound to a tuple type");
        }
        out.push(p.name, t);
        return;
      }
      if (p.elems.empty() && !(t.is_tuple() && !t.parts.empty())) return;
      if (!t.is_tuple() || t.parts.size() != p.elems.size()) {
        throw Error(ErrorKind::ShapeMismatch, "pattern arity does not match type");
      }
      for (std::size_t i = 0; i < p.elems.size(); ++i) (*this)(p.elems[i], t.parts[i]);
    }
  };
  Rec{out}(p, t);
  return out;
}

}  // namespace glreg
