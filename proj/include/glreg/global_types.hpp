// Global type system: information poset, type ordering, context join and
// the deterministic checker.
#pragma once

#include <set>
#include <string>
#include <vector>

#include "glreg/syntax.hpp"

namespace glreg {

/// Element of Pat: leaves are lo or a variable, inner nodes are tuples.
struct PatInfo {
  enum class Kind { Lo, GVar, Tuple };

  Kind kind = Kind::Lo;
  Var name;
  std::vector<PatInfo> elems;

  static PatInfo lo() { return {}; }
  static PatInfo gvar(Var x) { return {Kind::GVar, std::move(x), {}}; }
  static PatInfo tuple(std::vector<PatInfo> es) { return {Kind::Tuple, {}, std::move(es)}; }
  static PatInfo leaf(const Qual& q);
  static PatInfo of_pattern(const Pattern& p);

  bool is_leaf() const { return kind != Kind::Tuple; }
  Qual as_qual() const;

  friend bool operator==(const PatInfo&, const PatInfo&) = default;
};

std::string to_string(const PatInfo& p);

PatInfo pat_of_type(const Type& t);
bool pat_leq(const PatInfo& a, const PatInfo& b);
/// Same types once qualifiers are forgotten (functions compared up to
/// renaming of their binder).
bool erasure_equal(const Type& a, const Type& b);
/// T ≤ T′; throws ShapeMismatch when the erasures differ.
bool type_leq(const Type& a, const Type& b);
/// Function types equal up to renaming of the Π-bound pattern.
bool global_types_alpha_equal(const Type& a, const Type& b);

/// [p ↦ info]: binds the pattern's leaves to information leaves.
std::map<Var, PatInfo> info_binding(const Pattern& p, const PatInfo& info);
/// Applies an information substitution to a type (lo leaves erase effects).
Type apply_info(const std::map<Var, PatInfo>& m, const Type& t);
PatInfo apply_info(const std::map<Var, PatInfo>& m, const PatInfo& p);
Effect apply_info(const std::map<Var, PatInfo>& m, const Effect& e);

PatInfo p_gamma(const TypeContext& g, const ExprPtr& e);

/// Γ₁;Γ₂. Messages about the unusual clauses are appended to `diags`.
TypeContext ctx_join(const TypeContext& g1, const TypeContext& g2, std::vector<std::string>* diags = nullptr);

/// Variables occurring free in the types of Γ.
std::set<Var> gl(const TypeContext& g);

struct GlobalJudgment {
  Type type;
  Effect effect;  // Qual::var entries only
};

/// Synthesizes the type and least effect of `e`.
GlobalJudgment gsynth(const TypeContext& g, const ExprPtr& e, std::vector<std::string>* diags = nullptr);
/// Γ ⊢^φ e : T; throws EffectEscape when the effect is not covered by φ.
Type gcheck(const TypeContext& g, const std::set<Var>& phi, const ExprPtr& e);

/// ⊢ S : Γ. Constants without a hint default to (B, lo); closures need one.
std::pair<TypeContext, std::set<Var>> gcheck_store(const Store& s, const TypeContext& hints);

struct GlobalProgramTyping {
  TypeContext gamma;
  std::set<Var> phi;
  GlobalJudgment result;
  std::vector<std::string> diagnostics;
};

GlobalProgramTyping gcheck_program(const Program& p, const TypeContext& hints);

}  // namespace glreg
