#include "doctest.h"
#include "glreg/frontend.hpp"
#include "glreg/region_eval.hpp"
#include "support.hpp"

using namespace glreg;
using namespace glreg::testing;

namespace {

RegionContext ctx(std::map<RegionName, std::vector<Var>> m) { return RegionContext(std::move(m)); }

// Reference definition of the corpus fib: 1 below 2, otherwise the sum of the two predecessors.
std::int64_t fib_oracle(std::int64_t n) { return n < 2 ? 1 : fib_oracle(n - 1) + fib_oracle(n - 2); }

RunResult run_source(const std::string& text) {
  auto f = region_src(text);
  return run(initial_config(f.regions.value_or(RegionContext{}), f.program));
}

const StorableValue& result_value(const RunResult& r) {
  REQUIRE(r.final.expr->kind == Expr::Kind::Var);
  const auto* v = r.final.store.find(r.final.expr->name);
  REQUIRE(v != nullptr);
  return *v;
}

std::string fib_with_main(const std::string& main) {
  auto text = read_file(corpus("fib1.reg"));
  return text.substr(0, text.find("main =")) + "main = " + main;
}

// Values a region received during the run, in allocation order.
std::vector<std::string> allocated(const RunResult& r, const RegionContext& init, RegionName n) {
  std::vector<std::string> out;
  const auto* xs = r.final.regions.find(n);
  REQUIRE(xs != nullptr);
  std::size_t skip = init.find(n) ? init.find(n)->size() : 0;
  for (std::size_t i = skip; i < xs->size(); ++i) out.push_back(print_value(*r.final.store.find((*xs)[i])));
  return out;
}

}  // namespace

TEST_CASE("region_add appends to an existing region") {
  CHECK(region_add(ctx({{1, {"a"}}}), 1, "b") == ctx({{1, {"a", "b"}}}));
  CHECK(region_add(ctx({{1, {}}}), 1, "x1") == ctx({{1, {"x1"}}}));
  try {
    region_add(ctx({{1, {"a"}}}), 2, "b");
    FAIL("expected UnknownRegion");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownRegion);
  }
}

TEST_CASE("region_remove returns the evicted variables") {
  auto [r, gone] = region_remove(ctx({{1, {"a", "b"}}, {2, {"c"}}}), 2);
  CHECK(r == ctx({{1, {"a", "b"}}}));
  CHECK(gone == std::vector<Var>{"c"});
  auto [r2, gone2] = region_remove(ctx({{1, {}}}), 1);
  CHECK(r2.empty());
  CHECK(gone2.empty());
  CHECK_THROWS_AS(region_remove(RegionContext{}, 1), Error);
}

TEST_CASE("store_remove drops only the named bindings") {
  Store s;
  s.append("a", StorableValue{Ground{std::int64_t{1}}});
  s.append("b", StorableValue{Ground{std::int64_t{2}}});
  auto t = store_remove(s, {"b"});
  CHECK(t.names() == std::vector<Var>{"a"});
  CHECK(store_remove(s, {}).names() == s.names());
  CHECK(store_remove(t, {"z"}).names() == std::vector<Var>{"a"});
}

TEST_CASE("new_region skips the reserved pure region") {
  std::map<RegionName, std::vector<Var>> m;
  for (RegionName n = 0; n <= 7; ++n) m[n] = {};
  CHECK(new_region(ctx(m)) == 8);
  CHECK(new_region(RegionContext{}) == 1);
  CHECK(new_region(ctx({{0, {}}, {5, {}}})) == 6);
}

TEST_CASE("decompose follows the context grammar") {
  auto canon = parse_expr("(a, (b, c))", {Mode::Region});
  CHECK(std::holds_alternative<AlreadyCanonical>(decompose(canon, true)));

  auto e = parse_expr("(+1)(f [1] (y)) @ 1", {Mode::Region});
  auto d = decompose(e, true);
  REQUIRE(std::holds_alternative<Redex>(d));
  CHECK(std::get<Redex>(d).path == Path{0});
  CHECK(std::get<Redex>(d).expr->kind == Expr::Kind::App);

  auto cond = parse_expr("if i == k @ 4 then (a, i, k) else (a, i, k)", {Mode::Region});
  auto dc = decompose(cond, true);
  REQUIRE(std::holds_alternative<Redex>(dc));
  CHECK(std::get<Redex>(dc).path == Path{0});
  CHECK(std::get<Redex>(dc).expr->op == "==");
}

TEST_CASE("a literal allocation takes one eop step") {
  auto r = run_source("region 0 = [];\nmain = 5 @ 0");
  CHECK(r.outcome == Outcome::Terminal);
  CHECK(r.steps == 1);
  CHECK(r.trace.at(0).rule == Rule::Eop);
  CHECK(r.final.regions == ctx({{0, {"x1"}}}));
  CHECK(as_int(result_value(r)) == 5);
}

TEST_CASE("a canonical program is terminal in zero steps") {
  auto r = run_source("region 1 = [a];\na = 1;\nmain = a");
  CHECK(r.outcome == Outcome::Terminal);
  CHECK(r.steps == 0);
}

TEST_CASE("fib agrees with the reference definition") {
  for (std::int64_t n : {0, 1, 2, 5, 7}) {
    CAPTURE(n);
    auto r = run_source(fib_with_main("f [1, 2] (" + std::to_string(n) + " @ 2)"));
    REQUIRE(r.outcome == Outcome::Terminal);
    CHECK(as_int(result_value(r)) == fib_oracle(n));
    // scratch regions are all released again
    CHECK(r.final.regions.regions().size() == 3);
  }
  CHECK(fib_oracle(2) == 2);
  CHECK(fib_oracle(5) == 8);
}

TEST_CASE("regionized map leaves the expected per-region values") {
  auto f = parse_program(read_file(corpus("map.reg")), {Mode::Region});
  auto init = *f.regions;
  auto r = run(initial_config(init, f.program));
  REQUIRE(r.outcome == Outcome::Terminal);
  CHECK(allocated(r, init, 1).back() == "{2, 3, 4, 5, 6, 7, 8, 9}");
  CHECK(allocated(r, init, 2) == std::vector<std::string>{"0", "1", "2", "3", "4", "5", "6", "7", "8"});
  CHECK(allocated(r, init, 3) == std::vector<std::string>{"8"});
  std::vector<std::string> conds(8, "false");
  conds.push_back("true");
  CHECK(allocated(r, init, 4) == conds);
  // a[i] and its successor per iteration
  std::vector<std::string> five;
  for (int v = 1; v <= 8; ++v) {
    five.push_back(std::to_string(v));
    five.push_back(std::to_string(v + 1));
  }
  CHECK(allocated(r, init, 5) == five);
}

TEST_CASE("releasing a region the result points into is stuck") {
  auto r = run_source("region 1 = [];\nmain = new 'r. 1 @ 'r");
  CHECK(r.outcome == Outcome::Stuck);
  REQUIRE(r.stuck);
  CHECK(r.stuck->reason == StuckReason::DanglingValue);
}

TEST_CASE("ede removes exactly the released region's variables") {
  auto r = run_source("region 1 = [a];\na = 1;\nmain = new 'r. let y = 2 @ 'r in (+1)(y) @ 1");
  REQUIRE(r.outcome == Outcome::Terminal);
  const auto& last = r.trace.back();
  CHECK(last.rule == Rule::Ede);
  CHECK(last.store_delta.removed == std::vector<Var>{"x1"});
  CHECK(r.final.store.names() == std::vector<Var>{"a", "x2"});
  CHECK(as_int(result_value(r)) == 3);
}

TEST_CASE("fuel exhaustion is reported") {
  auto f = parse_program(read_file(corpus("fib1.reg")), {Mode::Region});
  auto r = run(initial_config(*f.regions, f.program), {.fuel = 10});
  CHECK(r.outcome == Outcome::OutOfFuel);
  CHECK(r.steps == 10);
}

TEST_CASE("the hand-optimised map releases its scratch regions") {
  auto f = parse_program(read_file(corpus("map_efficient.reg")), {Mode::Region});
  auto r = run(initial_config(*f.regions, f.program));
  REQUIRE(r.outcome == Outcome::Terminal);
  CHECK(r.final.regions.regions().size() == 4);
  auto xs = r.final.regions.find(1);
  CHECK(print_value(*r.final.store.find(xs->back())) == "{2, 3, 4, 5, 6, 7, 8, 9}");
}
