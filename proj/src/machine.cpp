#include "glreg/machine.hpp"

#include <algorithm>

namespace glreg {

const std::vector<Var>* RegionContext::find(RegionName r) const {
  auto it = regions_.find(r);
  return it == regions_.end() ? nullptr : &it->second;
}

std::optional<RegionName> RegionContext::region_of(const Var& x) const {
  for (const auto& [r, xs] : regions_) {
    if (std::find(xs.begin(), xs.end(), x) != xs.end()) return r;
  }
  return std::nullopt;
}

const char* to_string(Rule r) {
  switch (r) {
    case Rule::Ela: return "ela";
    case Rule::Eop: return "eop";
    case Rule::EifTrue: return "eif-true";
    case Rule::EifFalse: return "eif-false";
    case Rule::Ele: return "ele";
    case Rule::Eap: return "eap";
    case Rule::Ene: return "ene";
    case Rule::Ede: return "ede";
  }
  return "?";
}

std::optional<Rule> rule_from_string(const std::string& s) {
  for (Rule r : {Rule::Ela, Rule::Eop, Rule::EifTrue, Rule::EifFalse, Rule::Ele, Rule::Eap, Rule::Ene, Rule::Ede}) {
    if (s == to_string(r)) return r;
  }
  return std::nullopt;
}

const char* to_string(StuckReason r) {
  switch (r) {
    case StuckReason::UnboundVariable: return "UnboundVariable";
    case StuckReason::NotAFunction: return "NotAFunction";
    case StuckReason::NotABool: return "NotABool";
    case StuckReason::DanglingRegion: return "DanglingRegion";
    case StuckReason::DanglingValue: return "DanglingValue";
    case StuckReason::ShapeMismatch: return "ShapeMismatch";
    case StuckReason::RuntimeError: return "RuntimeError";
    case StuckReason::NotInLanguage: return "NotInLanguage";
  }
  return "?";
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Terminal: return "Terminal";
    case Outcome::Stuck: return "Stuck";
    case Outcome::OutOfFuel: return "OutOfFuel";
  }
  return "?";
}

namespace {

using Decomp = std::variant<Redex, AlreadyCanonical, Stuck>;

Decomp descend(const ExprPtr& e, std::size_t child, bool allow_new) {
  auto inner = decompose(e->kids[child], allow_new);
  if (auto* r = std::get_if<Redex>(&inner)) {
    r->path.insert(r->path.begin(), child);
    return inner;
  }
  if (std::holds_alternative<AlreadyCanonical>(inner)) {
    return Stuck{StuckReason::ShapeMismatch, "tuple pattern where a variable is required", e};
  }
  return inner;
}

}  // namespace

std::variant<Redex, AlreadyCanonical, Stuck> decompose(const ExprPtr& e, bool allow_new) {
  switch (e->kind) {
    case Expr::Kind::Var:
      return AlreadyCanonical{};
    case Expr::Kind::Tuple:
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        if (!is_canonical(*e->kids[i])) return descend(e, i, allow_new);
      }
      return AlreadyCanonical{};
    case Expr::Kind::Op:
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        if (e->kids[i]->kind != Expr::Kind::Var) return descend(e, i, allow_new);
      }
      return Redex{{}, e};
    case Expr::Kind::Lam:
      return Redex{{}, e};
    case Expr::Kind::App:
      if (is_canonical(*e->kids[0])) return Redex{{}, e};
      return descend(e, 0, allow_new);
    case Expr::Kind::If:
      if (e->kids[0]->kind == Expr::Kind::Var) return Redex{{}, e};
      return descend(e, 0, allow_new);
    case Expr::Kind::Let:
      if (is_canonical(*e->kids[0])) return Redex{{}, e};
      return descend(e, 0, allow_new);
    case Expr::Kind::New:
      if (!allow_new) return Stuck{StuckReason::NotInLanguage, "'new' is not a global-language form", e};
      if (e->qual.is_region_var() || is_canonical(*e->kids[0])) return Redex{{}, e};
      {
        auto inner = decompose(e->kids[0], allow_new);
        if (auto* r = std::get_if<Redex>(&inner)) r->path.insert(r->path.begin(), 0);
        return inner;
      }
  }
  return Stuck{StuckReason::NotInLanguage, "unknown expression form", e};
}

namespace {

ExprPtr plug_at(const ExprPtr& e, const Path& path, std::size_t depth, ExprPtr replacement) {
  if (depth == path.size()) return replacement;
  auto out = std::make_shared<Expr>(*e);
  auto i = path[depth];
  out->kids[i] = plug_at(e->kids[i], path, depth + 1, std::move(replacement));
  return out;
}

}  // namespace

ExprPtr plug(const ExprPtr& e, const Path& path, ExprPtr replacement) {
  return plug_at(e, path, 0, std::move(replacement));
}

Var next_fresh(const Store& s, std::uint64_t& counter) {
  if (counter == 0) {
    for (const auto& b : s.bindings()) counter = std::max(counter, fresh_index(b.name));
  }
  ++counter;
  Var x = "x" + std::to_string(counter);
  while (s.contains(x)) x = "x" + std::to_string(++counter);
  return x;
}

}  // namespace glreg
