#include "doctest.h"
#include "glreg/frontend.hpp"
#include "glreg/global_eval.hpp"
#include "glreg/global_types.hpp"
#include "glreg/region_eval.hpp"
#include "glreg/regionize.hpp"
#include "support.hpp"

using namespace glreg;
using namespace glreg::testing;

namespace {

Type gtype(const std::string& s) { return parse_type(s, Mode::Global); }
ExprPtr gexpr(const std::string& s) { return parse_expr(s, {Mode::Global}); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Syntax;
}

// Direct simulation of the map loop: the globals after the run.
struct MapState {
  std::vector<std::int64_t> a;
  std::int64_t i = 0, k = 0, z = 0;
  bool b = false;
};

MapState map_oracle(std::vector<std::int64_t> a) {
  MapState s{std::move(a)};
  s.k = static_cast<std::int64_t>(s.a.size());
  for (;;) {
    s.b = s.i == s.k;
    if (s.b) break;
    s.z = s.a[s.i];
    s.z = s.z + 1;
    s.a[s.i] = s.z;
    s.i = s.i + 1;
  }
  return s;
}

PatInfo G(const char* x) { return PatInfo::gvar(x); }
PatInfo T(std::vector<PatInfo> es) { return PatInfo::tuple(std::move(es)); }

}  // namespace

TEST_CASE("an at-z operation rewrites z in place") {
  auto p = global_src("z = 5;\nmain = (+1)(z) @ z");
  auto r = gstep(initial_global_config(p));
  auto* next = std::get_if<0>(&r);
  REQUIRE(next);
  CHECK(next->first.store.names() == std::vector<Var>{"z"});
  CHECK(as_int(*next->first.store.find("z")) == 6);
  CHECK(print_expr(*next->first.expr) == "z");
  CHECK(next->second.rule == Rule::Eop);
}

TEST_CASE("global map ends with the simulated globals") {
  auto src = load("map.glo");
  auto r = grun(initial_global_config(src.program));
  REQUIRE(r.outcome == Outcome::Terminal);
  auto want = map_oracle({1, 2, 3, 4, 5, 6, 7, 8});
  const auto& s = r.final.store;
  CHECK(as_array(*s.find("a")) == want.a);
  CHECK(as_int(*s.find("i")) == want.i);
  CHECK(as_int(*s.find("k")) == want.k);
  CHECK(as_bool(*s.find("b")) == want.b);
  CHECK(as_int(*s.find("z")) == want.z);
  // and the literal expected values
  CHECK(as_array(*s.find("a")) == std::vector<std::int64_t>{2, 3, 4, 5, 6, 7, 8, 9});
  CHECK(want.z == 9);
}

TEST_CASE("mostly-local map leaves its intermediate results in fresh names") {
  auto src = load("maplocal.glo");
  auto r = grun(initial_global_config(src.program));
  REQUIRE(r.outcome == Outcome::Terminal);
  const auto& s = r.final.store;
  CHECK(as_array(*s.find("a")) == std::vector<std::int64_t>{2, 3, 4, 5, 6, 7, 8, 9});
  CHECK(as_int(*s.find("i")) == 8);
  // the loop tests: eight falses and a final true, the true one written last
  std::vector<bool> tests;
  Var last_fresh;
  for (const auto& b : s.bindings()) {
    if (fresh_index(b.name) == 0) continue;
    last_fresh = b.name;
    if (!b.value.is_closure() && b.value.ground().base() == BaseType::Bool) tests.push_back(as_bool(b.value));
  }
  std::vector<bool> want(8, false);
  want.push_back(true);
  CHECK(tests == want);
  CHECK(as_bool(*s.find(last_fresh)) == true);
}

TEST_CASE("global and region runs of map take the same beta steps") {
  auto src = load("map.glo", "map.gamma");
  auto g = grun(initial_global_config(src.program));
  auto rp = regionize_program(src.hints, src.program);
  auto r = run(initial_config(rp.regions, rp.program));
  std::vector<Rule> gs, rs;
  for (const auto& t : g.trace) gs.push_back(t.rule);
  for (const auto& t : r.trace) {
    if (t.rule != Rule::Ene && t.rule != Rule::Ede) rs.push_back(t.rule);
  }
  CHECK(gs == rs);
}

TEST_CASE("grun fuel and canonical inputs") {
  auto canon = grun(initial_global_config(global_src("a = 1;\nmain = a")));
  CHECK(canon.outcome == Outcome::Terminal);
  CHECK(canon.steps == 0);
  auto two = global_src("a = 1;\nmain = (+1)((+1)(a) @ a) @ a");
  CHECK(grun(initial_global_config(two), {.fuel = 1}).outcome == Outcome::OutOfFuel);
  CHECK(grun(initial_global_config(two), {.fuel = 2}).outcome == Outcome::Terminal);
}

TEST_CASE("pat_of_type reads the information of a type") {
  CHECK(pat_of_type(gtype("(int, lo)")) == PatInfo::lo());
  CHECK(pat_of_type(gtype("((array, a), (int, i), (int, k))")) == T({G("a"), G("i"), G("k")}));
  CHECK(pat_of_type(gtype("(Pi x . (int, x) -> {x} (int, x), z)")) == G("z"));
}

TEST_CASE("pat_leq orders information") {
  CHECK(pat_leq(T({G("x"), T({G("z"), PatInfo::lo()})}), T({G("x"), T({G("z"), G("w")})})));
  CHECK_FALSE(pat_leq(G("x"), G("y")));
  CHECK(pat_leq(PatInfo::lo(), PatInfo::lo()));
  CHECK(pat_leq(PatInfo::lo(), G("x")));
  CHECK_FALSE(pat_leq(G("x"), PatInfo::lo()));
}

TEST_CASE("type_leq is componentwise") {
  CHECK(type_leq(gtype("(int, lo)"), gtype("(int, z)")));
  CHECK_FALSE(type_leq(gtype("(int, z)"), gtype("(int, lo)")));
  CHECK(type_leq(gtype("((int, lo), (int, i))"), gtype("((int, z), (int, i))")));
  CHECK(kind_of([] { type_leq(gtype("(int, lo)"), gtype("(bool, lo)")); }) == ErrorKind::ShapeMismatch);
}

TEST_CASE("p_gamma follows the codomain of a call") {
  TypeContext g;
  g.push("f", gtype("(Pi z . (int, z) -> {z} (int, z), lo)"));
  g.push("z", gtype("(int, z)"));
  g.push("w", gtype("(int, w)"));
  CHECK(p_gamma(g, gexpr("w")) == G("w"));
  CHECK(p_gamma(g, gexpr("(+1)(w) @ z")) == G("z"));
  CHECK(p_gamma(g, gexpr("f z")) == G("z"));
  CHECK(p_gamma(g, gexpr("f w")) == G("w"));
}

TEST_CASE("ctx_join clauses") {
  TypeContext g;
  g.push("x", gtype("(int, x)"));
  CHECK(ctx_join(g, {}).entries() == g.entries());
  CHECK(ctx_join(g, g).entries() == g.entries());

  TypeContext lo1, lo2;
  lo1.push("x", gtype("(int, lo)"));
  lo2.push("x", gtype("(int, lo)"));
  lo2.push("y", gtype("(int, lo)"));
  auto j = ctx_join(lo1, lo2);
  REQUIRE(j.entries().size() == 2);
  CHECK(j.entries()[0].first == "x");
  CHECK(j.entries()[1].first == "y");
}

TEST_CASE("gcheck on map and on small terms") {
  auto src = load("map.glo", "map.gamma");
  auto t = gcheck_program(src.program, src.hints);
  CHECK(t.result.type == gtype("((array, a), (int, i), (int, k))"));

  auto lam = gsynth({}, gexpr("fn x : (int, x) => (+1)(x) @ x"));
  CHECK(global_types_alpha_equal(lam.type, gtype("(Pi x . (int, x) -> {x} (int, x), lo)")));

  CHECK(kind_of([] { gcheck({}, {}, gexpr("1 @ z")); }) == ErrorKind::EffectEscape);
  CHECK_NOTHROW(gcheck({}, {"z"}, gexpr("1 @ z")));
}

TEST_CASE("gcheck_store") {
  auto empty = gcheck_store({}, {});
  CHECK(empty.first.entries().empty());
  CHECK(empty.second.empty());

  auto src = load("map.glo", "map.gamma");
  auto [g, phi] = gcheck_store(src.program.store, src.hints);
  CHECK(*g.find("b") == gtype("(int, b)"));
  CHECK(phi.count("mapf"));

  auto bad = global_src("b = 0;\nmain = b");
  TypeContext hint;
  hint.push("b", gtype("(bool, b)"));
  CHECK(kind_of([&] { gcheck_store(bad.store, hint); }) == ErrorKind::TypeMismatch);
}
