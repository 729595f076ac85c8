// The map from global programs to region programs.
#pragma once

#include <map>
#include <set>

#include "glreg/global_types.hpp"
#include "glreg/machine.hpp"

namespace glreg {

/// n^Γ: basic-typed globals numbered 1..k in declaration order.
struct RegionAssignment {
  std::map<Var, RegionName> numbering;
  RegionName max_region = 0;

  RegionName n(const Var& x) const;
  /// Inverse of the numbering, for erasure.
  std::optional<Var> global_of(RegionName r) const;
};

RegionAssignment make_assignment(const TypeContext& store_gamma);
/// Throws UnknownVariable when x is not declared in Γ.
RegionName n_gamma(const TypeContext& g, const Var& x);

/// α_x.
std::string alpha_name(const Var& x);

using ConcreteSet = std::set<Var>;

Qual q_place(const RegionAssignment& a, const ConcreteSet& s, const Qual& g);
std::vector<Qual> q_pattern(const RegionAssignment& a, const ConcreteSet& s, const Type& t, const Pattern& p);
std::vector<std::string> alpha_vars(const Type& t, const Pattern& p);
/// s′ for a binder p : T.
ConcreteSet s_prime(const RegionAssignment& a, const ConcreteSet& s, const Pattern& p, const Type& t);

Type regionize_type(const RegionAssignment& a, const ConcreteSet& s, const Type& t);
ExprPtr regionize_expr(const RegionAssignment& a, const ConcreteSet& s, const TypeContext& g, const ExprPtr& e);

struct RegionizedProgram {
  RegionContext regions;  // R^Γ
  Program program;
  TypeContext hints;      // translated closure types
  RegionAssignment assignment;
  std::vector<Var> omitted;  // at-only globals left out of the store
};

RegionizedProgram regionize_program(const TypeContext& hints, const Program& p);

/// Drops region binders and arguments and maps places back to qualifiers
/// (0 ↦ lo, n ↦ the n-th global, α_x ↦ x). Lambda annotations are dropped.
ExprPtr erase_regions(const RegionAssignment& a, const ExprPtr& e);
/// The global expression as erasure sees it: qualifiers sent to region 0
/// become lo, lambda annotations are dropped.
ExprPtr erasure_normal_form(const RegionAssignment& a, const ConcreteSet& s, const TypeContext& g, const ExprPtr& e);

}  // namespace glreg
