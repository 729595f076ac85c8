// Type-and-effect system of the region calculus.
#pragma once

#include "glreg/machine.hpp"

namespace glreg {

struct RegionJudgmentResult {
  Type type;
  Effect effect;
};

/// Places occurring free in a type (Π-bound region variables excluded).
Effect eff(const Type& t);
Effect eff(const TypeContext& g, const Type& t);
Effect eff(const TypeContext& g);

/// Equality up to renaming of Π-bound region variables.
bool types_alpha_equal(const Type& a, const Type& b);
/// Alpha-equality up to larger latent effects in function positions of `b`
/// (a lambda may always be given a larger latent effect than it needs).
bool region_subtype(const Type& a, const Type& b);

/// Synthesizes the type and the least effect of `e`.
RegionJudgmentResult check_expr(const TypeContext& g, const ExprPtr& e);

/// Store typing. Closures are typed from `hints` (their type in Γ);
/// their place must be the region holding them.
std::pair<TypeContext, Effect> check_store(const RegionContext& r, const Store& s, const TypeContext& hints);

struct ProgramTyping {
  TypeContext gamma;
  Effect ambient;  // dom R
  RegionJudgmentResult result;
};

ProgramTyping check_program(const RegionContext& r, const Program& p, const TypeContext& hints);

}  // namespace glreg
