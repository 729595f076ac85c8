// Random generators for property tests.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "glreg/global_types.hpp"
#include "glreg/syntax.hpp"

namespace glreg::testing {

using Rng = std::mt19937_64;

inline int pick(Rng& rng, int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

inline const std::vector<Var>& var_pool() {
  static const std::vector<Var> pool{"x", "y", "z", "w"};
  return pool;
}

inline Var any_var(Rng& rng) { return var_pool()[pick(rng, 4)]; }

/// Linear pattern over fresh leaf names drawn from `names`.
inline Pattern random_pattern(Rng& rng, std::vector<Var>& names, int depth) {
  if (depth == 0 || names.size() < 2 || pick(rng, 3) != 0) {
    Var x = names.back();
    names.pop_back();
    return Pattern::var(x);
  }
  std::vector<Pattern> es;
  int n = 1 + pick(rng, 2);
  for (int i = 0; i < n && !names.empty(); ++i) es.push_back(random_pattern(rng, names, depth - 1));
  return Pattern::tuple(std::move(es));
}

/// Global expression over x, y, z, w (not necessarily well typed).
inline ExprPtr random_expr(Rng& rng, int depth) {
  Qual q = pick(rng, 2) ? Qual::lo() : Qual::var(any_var(rng));
  if (depth == 0) {
    if (pick(rng, 3) == 0) return Expr::lit(Ground::integer(pick(rng, 5)), q);
    return Expr::var(any_var(rng));
  }
  switch (pick(rng, 7)) {
    case 0:
      return Expr::op_at("+", {random_expr(rng, depth - 1), random_expr(rng, depth - 1)}, q);
    case 1:
      return Expr::tuple({random_expr(rng, depth - 1), random_expr(rng, depth - 1)});
    case 2:
      return Expr::lam(Pattern::var(any_var(rng)), std::nullopt, random_expr(rng, depth - 1), q);
    case 3:
      return Expr::app(any_var(rng), random_expr(rng, depth - 1));
    case 4:
      return Expr::if_(random_expr(rng, depth - 1), random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 5: {
      std::vector<Var> names = var_pool();
      std::shuffle(names.begin(), names.end(), rng);
      return Expr::let(random_pattern(rng, names, 2), random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    }
    default:
      return Expr::var(any_var(rng));
  }
}

/// PatInfo trees of bounded depth over leaves lo, a, b.
inline PatInfo random_info(Rng& rng, int depth) {
  if (depth == 0 || pick(rng, 3) != 0) {
    switch (pick(rng, 3)) {
      case 0: return PatInfo::lo();
      case 1: return PatInfo::gvar("a");
      default: return PatInfo::gvar("b");
    }
  }
  std::vector<PatInfo> es;
  int n = 1 + pick(rng, 2);
  for (int i = 0; i < n; ++i) es.push_back(random_info(rng, depth - 1));
  return PatInfo::tuple(std::move(es));
}

}  // namespace glreg::testing
