#include <functional>

#include "doctest.h"
#include "glreg/frontend.hpp"
#include "glreg/global_types.hpp"
#include "glreg/harness.hpp"
#include "support.hpp"

using namespace glreg;
using namespace glreg::testing;

namespace {

// Rebuilds e with every literal `lit @ from` moved to `to`.
ExprPtr move_literal(const ExprPtr& e, std::int64_t lit, RegionName from, RegionName to) {
  auto out = std::make_shared<Expr>(*e);
  for (auto& k : out->kids) k = move_literal(k, lit, from, to);
  if (e->kind == Expr::Kind::Op && e->literal && e->qual == Qual::region_name(from) &&
      e->literal->base() == BaseType::Int && std::get<std::int64_t>(e->literal->v) == lit) {
    out->qual = Qual::region_name(to);
  }
  return out;
}

RunResult run_regionized_map() {
  auto src = load("map.glo", "map.gamma");
  auto rp = regionize_program(src.hints, src.program);
  return run(initial_config(rp.regions, rp.program));
}

}  // namespace

TEST_CASE("region_slice lists a region's values in order") {
  auto r = run_regionized_map();
  REQUIRE(r.outcome == Outcome::Terminal);
  auto three = region_slice(r.final.store, r.final.regions, 3);
  REQUIRE(three.size() == 2);  // the initial k, then the written 8
  CHECK(as_int(three.back()) == 8);

  auto one = region_slice(r.final.store, r.final.regions, 1);
  REQUIRE(one.size() == 9);
  CHECK(as_array(one.back()) == std::vector<std::int64_t>{2, 3, 4, 5, 6, 7, 8, 9});
  // each snapshot differs from the previous one in exactly one cell, left to right
  for (std::size_t n = 1; n < one.size(); ++n) {
    auto before = as_array(one[n - 1]), after = as_array(one[n]);
    for (std::size_t j = 0; j < after.size(); ++j) CHECK(after[j] == before[j] + (j == n - 1 ? 1 : 0));
  }

  RegionContext empty(std::map<RegionName, std::vector<Var>>{{4, {}}});
  CHECK(region_slice({}, empty, 4).empty());
}

TEST_CASE("region_slice errors") {
  RegionContext r(std::map<RegionName, std::vector<Var>>{{1, {"ghost"}}});
  try {
    region_slice({}, r, 2);
    FAIL("expected UnknownRegion");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownRegion);
  }
  try {
    region_slice({}, r, 1);
    FAIL("expected DanglingEntry");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DanglingEntry);
  }
}

TEST_CASE("map corresponds to its regionized program") {
  auto src = load("map.glo", "map.gamma");
  auto rep = check_correspondence(src.hints, src.program);
  CHECK(rep.verdict == Verdict::Pass);
  CHECK(rep.region_typed);
  CHECK(rep.structure_ok);
  CHECK(rep.global_steps == rep.region_steps);
  auto a = std::find_if(rep.variables.begin(), rep.variables.end(), [](const auto& v) { return v.name == "a"; });
  REQUIRE(a != rep.variables.end());
  CHECK(a->region == 1);
  CHECK(as_array(*a->global_final) == std::vector<std::int64_t>{2, 3, 4, 5, 6, 7, 8, 9});
  CHECK(as_array(a->region_values.back()) == std::vector<std::int64_t>{2, 3, 4, 5, 6, 7, 8, 9});
}

TEST_CASE("the other reference programs correspond") {
  for (auto stem : {"map_imp", "map1", "maplocal"}) {
    CAPTURE(stem);
    auto src = load(std::string(stem) + ".glo", std::string(stem) + ".gamma");
    auto rep = check_correspondence(src.hints, src.program);
    CHECK(rep.verdict == Verdict::Pass);
    CHECK(rep.region_typed);
  }
}

TEST_CASE("a program without globals passes vacuously") {
  auto rep = check_correspondence({}, global_src("main = (+1)(3)"));
  CHECK(rep.verdict == Verdict::Pass);
  CHECK(rep.variables.empty());
}

TEST_CASE("a mutated region number is caught and named") {
  auto src = load("map.glo", "map.gamma");
  // the bound k = 8 goes to i's region instead of k's
  auto rep = check_correspondence(src.hints, src.program, 100000, [](RegionizedProgram& rp) {
    rp.program.main = move_literal(rp.program.main, 8, 3, 2);
  });
  CHECK(rep.verdict == Verdict::Fail);
  CHECK(rep.failing() == std::vector<Var>{"k"});
  CHECK_FALSE(rep.structure_ok);
}

TEST_CASE("unprotected programs diverge with matching write structure") {
  for (auto stem : {"stale_alias", "stale_read", "stale_operand"}) {
    CAPTURE(stem);
    auto src = load(std::string("faults/") + stem + ".glo", std::string("faults/") + stem + ".gamma");
    auto rep = check_correspondence(src.hints, src.program);
    CHECK(rep.verdict == Verdict::Fail);
    CHECK_FALSE(rep.protected_run);
    CHECK(rep.structure_ok);
    CHECK(find_stale_write(src.program).has_value());
  }
  auto map = load("map.glo");
  CHECK_FALSE(find_stale_write(map.program).has_value());
}

TEST_CASE("count_free_occurrences ignores bound names") {
  auto e = parse_expr("let x = y in (x, y, (+1)(y) @ y)", {Mode::Global});
  CHECK(count_free_occurrences(*e, "y") == 3);
  CHECK(count_free_occurrences(*e, "x") == 0);
}

TEST_CASE("generated programs are well typed and reproducible") {
  auto a = generate_programs(5, 4, 40);
  auto b = generate_programs(5, 4, 40);
  REQUIRE(a.size() == 40);
  for (std::size_t n = 0; n < a.size(); ++n) {
    CHECK(print_generated(a[n]) == print_generated(b[n]));
    CHECK_NOTHROW(gcheck_program(a[n].program, a[n].hints));
  }
  auto other = generate_programs(6, 4, 40);
  std::set<std::string> left, right;
  for (const auto& g : a) left.insert(print_generated(g));
  for (const auto& g : other) right.insert(print_generated(g));
  CHECK(left != right);
}

TEST_CASE("the smallest generated programs are single updates") {
  auto gs = generate_programs(1, 1, 20);
  for (const auto& g : gs) {
    CHECK_NOTHROW(gcheck_program(g.program, g.hints));
    CHECK(check_correspondence(g.hints, g.program).verdict != Verdict::Rejected);
  }
}

TEST_CASE("shrink keeps the failure and gets smaller") {
  auto src = load("faults/stale_read.glo", "faults/stale_read.gamma");
  GeneratedProgram g{src.hints, src.program, 0};
  // pad with an unused binding; shrinking should drop it again
  g.program.store.append("unused", StorableValue{Ground{std::int64_t{3}}});
  auto fails = [](const GeneratedProgram& c) {
    try {
      return check_correspondence(c.hints, c.program).verdict == Verdict::Fail;
    } catch (const Error&) {
      return false;
    }
  };
  REQUIRE(fails(g));
  auto s = shrink(g, fails);
  CHECK(fails(s));
  CHECK_FALSE(s.program.store.contains("unused"));
}
