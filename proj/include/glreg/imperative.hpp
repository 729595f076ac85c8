// Imperative form of global programs: explicit assignments to global
// variables, plus the sequencing sugar used when printing.
#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "glreg/global_types.hpp"
#include "glreg/syntax.hpp"

namespace glreg {

struct ImpExpr;
using ImpPtr = std::shared_ptr<const ImpExpr>;

struct ImpExpr {
  enum class Kind { Var, Op, Lam, Tuple, App, If, Let, Assign, Seq };

  Kind kind = Kind::Var;
  Var name;                       // Var, App head, Assign target
  std::string op;                 // Op
  std::optional<Ground> literal;  // Op literal
  std::vector<ImpPtr> kids;       // as in Expr; Assign {rhs}; Seq {first, second}
  Pattern pat;                    // Lam, Let; erased leaves are ⟨⟩
  bool unit_call = false;         // App: the callee's erased binder has no variables
};

struct ImpBinding {
  Var name;
  ImpPtr value;
};

struct ImpProgram {
  std::vector<ImpBinding> store;
  ImpPtr main;
};

/// Every variable occurring free in a type bound by Γ.
std::set<Var> globals_of(const TypeContext& g);
/// Gl Γ together with the store functions whose bodies assign to globals.
std::set<Var> globalization_set(const TypeContext& g, const Store& s);

/// Leaves in G become ⟨⟩.
Pattern erase_pattern(const std::set<Var>& G, const Pattern& p);

/// The translation proper; Γ is only consulted to decide `unit_call`.
ImpPtr imperative_expr(const std::set<Var>& G, const TypeContext& g, const ExprPtr& e);
ImpProgram imperative_program(const std::set<Var>& G, const TypeContext& g, const Program& p);
/// Typechecks with the hints and translates with G = globalization_set.
ImpProgram imperative_program(const TypeContext& hints, const Program& p);

/// Rewrites `let ⟨…⟩ ≡ e in e′` to `e; e′` and unit calls `f e` to `e; f ⟨⟩`
/// (only when e is not already a pattern of variables).
ImpPtr apply_sugar(const ImpPtr& e);
ImpProgram apply_sugar(ImpProgram p);

struct ImpPrintOptions {
  bool unicode = true;
};

std::string print_imperative(const ImpPtr& e, const ImpPrintOptions& opts = {});
/// Store bindings comma-separated, then the main expression on its own line.
std::string print_imperative(const ImpProgram& p, const ImpPrintOptions& opts = {});

}  // namespace glreg
