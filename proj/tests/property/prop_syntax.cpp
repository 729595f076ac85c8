#include <algorithm>

#include "doctest.h"
#include "glreg/frontend.hpp"
#include "random.hpp"
#include "support.hpp"

using namespace glreg;
using namespace glreg::testing;

TEST_CASE("identity substitution leaves expressions unchanged") {
  Rng rng(11);
  for (int n = 0; n < 1000; ++n) {
    auto e = random_expr(rng, 4);
    std::vector<Var> names = var_pool();
    auto p = random_pattern(rng, names, 2);
    CHECK(expr_equal(*apply_subst(subst_builder(p, p), e), *e));
  }
}

TEST_CASE("renaming a free variable swaps it in the free set") {
  Rng rng(12);
  int checked = 0;
  for (int n = 0; n < 2000; ++n) {
    auto e = random_expr(rng, 4);
    auto fv = free_vars(*e);
    if (!fv.count("x")) continue;
    // v is new to e, so it cannot be captured
    auto out = free_vars(*apply_subst({{"x", "v"}}, e));
    auto want = fv;
    want.erase("x");
    want.insert("v");
    CHECK(out == want);
    ++checked;
  }
  CHECK(checked > 200);
}

TEST_CASE("flatten_pattern succeeds exactly on matching shapes") {
  Rng rng(13);
  auto type_of_shape = [&](const Pattern& p, auto&& self) -> Type {
    if (p.is_var) return Type::value(BaseType::Int, Qual::lo());
    std::vector<Type> ts;
    for (const auto& e : p.elems) ts.push_back(self(e, self));
    return Type::tuple(std::move(ts));
  };
  for (int n = 0; n < 1000; ++n) {
    std::vector<Var> a = var_pool(), b = var_pool();
    auto p = random_pattern(rng, a, 2);
    auto q = random_pattern(rng, b, 2);
    auto t = type_of_shape(q, type_of_shape);
    bool same_shape = type_of_shape(p, type_of_shape) == t;
    if (same_shape) {
      CHECK(flatten_pattern(p, t).entries().size() == pattern_vars(p).size());
    } else {
      CHECK_THROWS_AS(flatten_pattern(p, t), Error);
    }
  }
}

TEST_CASE("fresh names are never bound") {
  Rng rng(14);
  for (int n = 0; n < 500; ++n) {
    Store s;
    int k = pick(rng, 12);
    for (int i = 0; i < k; ++i) {
      Var x = "x" + std::to_string(1 + pick(rng, 15));
      if (!s.contains(x)) s.append(x, StorableValue{Ground::integer(i)});
    }
    CHECK_FALSE(s.contains(fresh_var(s)));
  }
}

TEST_CASE("apply_op agrees with plain arithmetic") {
  Rng rng(15);
  std::uniform_int_distribution<std::int64_t> num(-1000, 1000);
  auto I = [](std::int64_t v) { return Ground::integer(v); };
  auto B = [](bool v) { return Ground::boolean(v); };
  auto as_i = [](const Ground& g) { return std::get<std::int64_t>(g.v); };
  auto as_b = [](const Ground& g) { return std::get<bool>(g.v); };
  for (int n = 0; n < 1000; ++n) {
    std::int64_t a = num(rng), b = num(rng);
    bool p = pick(rng, 2), q = pick(rng, 2);
    CHECK(as_i(apply_op("+", {I(a), I(b)})) == a + b);
    CHECK(as_i(apply_op("-", {I(a), I(b)})) == a - b);
    CHECK(as_b(apply_op("==", {I(a), I(a % 3 == 0 ? a : b)})) == (a == (a % 3 == 0 ? a : b)));
    CHECK(as_b(apply_op("<", {I(a), I(b)})) == (a < b));
    CHECK(as_b(apply_op("and", {B(p), B(q)})) == (p && q));
    CHECK(as_b(apply_op("or", {B(p), B(q)})) == (p || q));
    CHECK(as_b(apply_op("not", {B(p)})) == !p);
    int shift = 1 + pick(rng, 9);
    CHECK(as_i(apply_op("+" + std::to_string(shift), {I(a)})) == a + shift);
    CHECK(as_i(apply_op("-" + std::to_string(shift), {I(a)})) == a - shift);

    std::vector<std::int64_t> xs(1 + pick(rng, 8));
    for (auto& x : xs) x = num(rng);
    auto i = static_cast<std::int64_t>(pick(rng, static_cast<int>(xs.size())));
    CHECK(as_i(apply_op("index", {Ground::array(xs), I(i)})) == xs[i]);
    auto ys = xs;
    ys[i] = a;
    CHECK(apply_op("update", {Ground::array(xs), I(i), I(a)}) == Ground::array(ys));
    CHECK_THROWS_AS(apply_op("index", {Ground::array(xs), I(static_cast<std::int64_t>(xs.size()))}), Error);
  }
}
