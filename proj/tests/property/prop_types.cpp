#include <functional>

#include "doctest.h"
#include "glreg/frontend.hpp"
#include "glreg/harness.hpp"
#include "glreg/region_types.hpp"
#include "random.hpp"
#include "support.hpp"

using namespace glreg;
using namespace glreg::testing;

namespace {

// b with some lo leaves of a raised to variables, so that a ≤ b by construction.
PatInfo raise(Rng& rng, const PatInfo& a) {
  if (a.kind == PatInfo::Kind::Tuple) {
    std::vector<PatInfo> es;
    for (const auto& e : a.elems) es.push_back(raise(rng, e));
    return PatInfo::tuple(std::move(es));
  }
  if (a.kind == PatInfo::Kind::Lo && pick(rng, 2)) return PatInfo::gvar(pick(rng, 2) ? "a" : "b");
  return a;
}

// Information order read off the definition: same shape, each leaf lo or equal.
bool leq_oracle(const PatInfo& a, const PatInfo& b) {
  if (a.kind == PatInfo::Kind::Tuple || b.kind == PatInfo::Kind::Tuple) {
    if (a.kind != b.kind || a.elems.size() != b.elems.size()) return false;
    for (std::size_t i = 0; i < a.elems.size(); ++i) {
      if (!leq_oracle(a.elems[i], b.elems[i])) return false;
    }
    return true;
  }
  return a.kind == PatInfo::Kind::Lo || (b.kind == PatInfo::Kind::GVar && a.name == b.name);
}

struct Regionized {
  RegionizedProgram rp;
  TypeContext gamma;
};

const std::vector<Regionized>& regionized() {
  static const auto out = [] {
    std::vector<Regionized> v;
    for (const auto& g : generate_programs(77, 4, 300)) {
      auto rp = regionize_program(g.hints, g.program);
      auto gamma = check_store(rp.regions, rp.program.store, rp.hints).first;
      v.push_back({rp, gamma});
    }
    return v;
  }();
  return out;
}

// Places a term needs, computed without the checker: allocation sites plus the
// instantiated latent effects of calls, minus regions released by `new`.
Effect needed_places(const TypeContext& g, const ExprPtr& e) {
  Effect out;
  std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& n) {
    switch (n->kind) {
      case Expr::Kind::Op:
      case Expr::Kind::Lam:
        out.insert(n->qual);
        break;
      case Expr::Kind::App: {
        const Type* f = g.find(n->name);
        if (f && f->is_fun()) {
          RegionMap m;
          for (std::size_t i = 0; i < f->region_binder.size() && i < n->region_args.size(); ++i) {
            m[f->region_binder[i]] = n->region_args[i];
          }
          for (const auto& q : apply_region_subst(m, f->effect)) out.insert(q);
        }
        break;
      }
      case Expr::Kind::New: {
        Effect inner = needed_places(g, n->kids[0]);
        inner.erase(n->qual);
        out.insert(inner.begin(), inner.end());
        return;
      }
      default:
        break;
    }
    if (n->kind == Expr::Kind::Lam) return;  // the body's effect is latent
    for (const auto& k : n->kids) walk(k);
  };
  walk(e);
  return out;
}

// Every Op/Lam node of e, as paths.
void qual_sites(const ExprPtr& e, Path& at, std::vector<Path>& out) {
  if (e->kind == Expr::Kind::Op || e->kind == Expr::Kind::Lam) out.push_back(at);
  for (std::size_t i = 0; i < e->kids.size(); ++i) {
    at.push_back(i);
    qual_sites(e->kids[i], at, out);
    at.pop_back();
  }
}

ExprPtr node_at(const ExprPtr& e, const Path& p) {
  ExprPtr cur = e;
  for (auto i : p) cur = cur->kids[i];
  return cur;
}

}  // namespace

TEST_CASE("pat_leq is a partial order") {
  Rng rng(21);
  std::size_t related = 0;
  for (int n = 0; n < 10000; ++n) {
    auto a = random_info(rng, 3);
    auto b = pick(rng, 2) ? raise(rng, a) : random_info(rng, 3);
    auto c = raise(rng, b);
    CHECK(pat_leq(a, a));
    CHECK(pat_leq(a, b) == leq_oracle(a, b));
    if (pat_leq(a, b) && pat_leq(b, a)) CHECK(a == b);
    if (pat_leq(a, b) && pat_leq(b, c)) {
      ++related;
      CHECK(pat_leq(a, c));
    }
  }
  CHECK(related > 3000);
}

TEST_CASE("type_leq is reflexive and componentwise") {
  Rng rng(22);
  auto leaf = [&] {
    BaseType b = pick(rng, 2) ? BaseType::Int : BaseType::Bool;
    return Type::value(b, pick(rng, 2) ? Qual::lo() : Qual::var(any_var(rng)));
  };
  for (int n = 0; n < 2000; ++n) {
    Type a = leaf(), b = leaf();
    CHECK(type_leq(a, a));
    Type c = Type::value(a.base, Qual::var("w"));
    Type d = Type::value(b.base, b.qual);
    bool parts = type_leq(a, c) && type_leq(b, d);
    CHECK(type_leq(Type::tuple({a, b}), Type::tuple({c, d})) == parts);
  }
}

TEST_CASE("ctx_join has the empty context as unit and associates on compatible triples") {
  std::vector<std::optional<Type>> choices{std::nullopt, Type::value(BaseType::Int, Qual::lo())};
  for (const char* x : {"x", "y"}) choices.push_back(Type::value(BaseType::Int, Qual::var(x)));
  auto build = [&](int code) {
    TypeContext g;
    for (const char* v : {"x", "y"}) {
      const auto& t = choices[code % choices.size()];
      code /= static_cast<int>(choices.size());
      if (t) g.push(v, *t);
    }
    return g;
  };
  int total = static_cast<int>(choices.size() * choices.size());
  std::size_t triples = 0;
  for (int i = 0; i < total; ++i) {
    auto a = build(i);
    CHECK(ctx_join(a, {}).entries() == a.entries());
    for (int j = 0; j < total; ++j) {
      for (int k = 0; k < total; ++k) {
        auto b = build(j), c = build(k);
        std::vector<std::string> d1, d2, d3, d4;
        auto left = ctx_join(ctx_join(a, b, &d1), c, &d2);
        auto right = ctx_join(a, ctx_join(b, c, &d3), &d4);
        if (!d1.empty() || !d2.empty() || !d3.empty() || !d4.empty()) continue;
        ++triples;
        CHECK(left.entries() == right.entries());
      }
    }
  }
  CHECK(triples > 100);
}

TEST_CASE("synthesized region effects are exactly the needed places") {
  for (const auto& r : regionized()) {
    auto got = check_expr(r.gamma, r.rp.program.main);
    CHECK(got.effect == needed_places(r.gamma, r.rp.program.main));
  }
}

TEST_CASE("weakening by a fresh variable changes nothing") {
  for (const auto& r : regionized()) {
    auto base = check_expr(r.gamma, r.rp.program.main);
    TypeContext wider = r.gamma;
    wider.push("unused_fresh", Type::value(BaseType::Int, Qual::region_name(1)));
    auto more = check_expr(wider, r.rp.program.main);
    CHECK(more.type == base.type);
    CHECK(more.effect == base.effect);
  }
}

TEST_CASE("regionized programs type-check") {
  for (const auto& r : regionized()) {
    CHECK_NOTHROW(check_program(r.rp.regions, r.rp.program, r.rp.hints));
  }
}

TEST_CASE("region-typed programs never get stuck") {
  Rng rng(23);
  std::size_t accepted = 0, rejected = 0;
  for (const auto& r : regionized()) {
    auto top = r.rp.regions.regions().rbegin()->first;
    for (int m = 0; m < 10; ++m) {
      Program p = r.rp.program;
      std::vector<Path> sites;
      Path at;
      qual_sites(p.main, at, sites);
      if (sites.empty()) break;
      const Path& site = sites[pick(rng, static_cast<int>(sites.size()))];
      auto node = std::make_shared<Expr>(*node_at(p.main, site));
      bool scoped = pick(rng, 2);
      node->qual = scoped ? Qual::region_var("'m") : Qual::region_name(static_cast<RegionName>(pick(rng, top + 2)));
      p.main = plug(p.main, site, node);
      if (scoped) p.main = Expr::new_(Qual::region_var("'m"), p.main);
      try {
        check_program(r.rp.regions, p, r.rp.hints);
      } catch (const Error&) {
        ++rejected;
        continue;
      }
      ++accepted;
      auto out = run(initial_config(r.rp.regions, p));
      CHECK(out.outcome == Outcome::Terminal);
    }
  }
  CHECK(accepted > 100);
  CHECK(rejected > 100);
}

namespace {

ExprPtr small_term(Rng& rng, int depth) {
  static const std::vector<Qual> quals{Qual::lo(), Qual::var("x"), Qual::var("z")};
  Qual q = quals[pick(rng, 3)];
  if (depth == 0) return pick(rng, 3) ? Expr::var(any_var(rng)) : Expr::lit(Ground::integer(pick(rng, 4)), q);
  switch (pick(rng, 4)) {
    case 0:
      return Expr::op_at("+", {small_term(rng, depth - 1), small_term(rng, depth - 1)}, q);
    case 1:
      return Expr::tuple({small_term(rng, depth - 1), small_term(rng, depth - 1)});
    case 2:
      return Expr::let(Pattern::var(pick(rng, 2) ? "y" : "w"), small_term(rng, depth - 1), small_term(rng, depth - 1));
    default:
      return small_term(rng, 0);
  }
}

// Every type a declarative derivation can give e: variables take their
// context type, operations their annotation, lets thread each rhs type
// whose information fits the binder.
std::vector<Type> derivable(const TypeContext& g, const std::set<Var>& phi, const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Var: {
      const Type* t = g.find(e->name);
      return t ? std::vector<Type>{*t} : std::vector<Type>{};
    }
    case Expr::Kind::Op: {
      if (e->qual.is_var() && !phi.count(e->qual.name)) return {};
      for (const auto& k : e->kids) {
        bool any_int = false;
        for (const auto& t : derivable(g, phi, k)) any_int = any_int || (t.is_value() && t.base == BaseType::Int);
        if (!any_int) return {};
      }
      return {Type::value(BaseType::Int, e->qual)};
    }
    case Expr::Kind::Tuple: {
      std::vector<Type> out;
      for (const auto& a : derivable(g, phi, e->kids[0])) {
        for (const auto& b : derivable(g, phi, e->kids[1])) out.push_back(Type::tuple({a, b}));
      }
      return out;
    }
    case Expr::Kind::Let: {
      std::vector<Type> out;
      for (const auto& t : derivable(g, phi, e->kids[0])) {
        // the binder must be able to hold the value's information
        if (!pat_leq(pat_of_type(t), PatInfo::of_pattern(e->pat))) continue;
        TypeContext inner = g;
        inner.extend(e->pat.name, t);
        for (const auto& b : derivable(inner, phi, e->kids[1])) out.push_back(b);
      }
      return out;
    }
    default:
      return {};
  }
}

}  // namespace

TEST_CASE("gcheck finds a maximal derivable type on small terms") {
  Rng rng(24);
  TypeContext g;
  g.push("x", Type::value(BaseType::Int, Qual::var("x")));
  g.push("y", Type::value(BaseType::Int, Qual::lo()));
  g.push("z", Type::value(BaseType::Int, Qual::var("z")));
  g.push("w", Type::value(BaseType::Int, Qual::lo()));
  std::set<Var> phi{"x", "z"};
  std::size_t typed = 0;
  for (int n = 0; n < 3000; ++n) {
    auto e = small_term(rng, 3);
    auto all = derivable(g, phi, e);
    Type got;
    try {
      got = gcheck(g, phi, e);
    } catch (const Error& err) {
      CHECK_MESSAGE(all.empty(), (print_expr(*e) + " : " + err.what()));
      continue;
    }
    ++typed;
    REQUIRE_FALSE(all.empty());
    for (const auto& t : all) CHECK(type_leq(t, got));
  }
  CHECK(typed > 1000);
}
