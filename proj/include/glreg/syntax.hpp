// Shared abstract syntax for the region calculus and the global calculus.
//
// Both languages share one expression tree. Annotations (`Qual`) carry either
// a global qualifier (lo | x) or a place (region name | region variable);
// the region-only forms (`new`, region binders, region arguments) simply stay
// empty in global programs.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace glreg {

using Var = std::string;
using RegionName = std::uint32_t;

enum class ErrorKind {
  ShapeMismatch,
  ArityError,
  TypeErrorAtRuntime,
  IndexOutOfBounds,
  UnknownRegion,
  DuplicateLocation,
  TypeMismatch,
  UnknownVariable,
  EffectEscape,
  RegionBinderClash,
  PatternShape,
  RegionAssignmentMissing,
  DanglingRegion,
  JoinConflict,
  MeaninglessBinder,
  HeadNotAFunction,
  UnboundRegionVariable,
  GlobalShadowing,
  DanglingEntry,
  Syntax,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// ---------------------------------------------------------------------------
// Qualifiers and places

struct Qual {
  enum class Kind { Lo, Var, Region, RegionVar };

  Kind kind = Kind::Lo;
  std::string name;       // Var, RegionVar
  RegionName region = 0;  // Region

  static Qual lo() { return {}; }
  static Qual var(std::string n) { return {Kind::Var, std::move(n), 0}; }
  static Qual region_name(RegionName r) { return {Kind::Region, {}, r}; }
  static Qual region_var(std::string n) { return {Kind::RegionVar, std::move(n), 0}; }

  bool is_lo() const { return kind == Kind::Lo; }
  bool is_var() const { return kind == Kind::Var; }
  bool is_region() const { return kind == Kind::Region; }
  bool is_region_var() const { return kind == Kind::RegionVar; }

  friend bool operator==(const Qual&, const Qual&) = default;
  friend auto operator<=>(const Qual&, const Qual&) = default;
};

std::string to_string(const Qual& q);

using Effect = std::set<Qual>;

// ---------------------------------------------------------------------------
// Patterns

struct Pattern {
  bool is_var = false;
  Var name;
  std::vector<Pattern> elems;

  static Pattern var(Var n) { return {true, std::move(n), {}}; }
  static Pattern tuple(std::vector<Pattern> es) { return {false, {}, std::move(es)}; }

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

/// Leaves of `p` in left-to-right order.
std::vector<Var> pattern_vars(const Pattern& p);
/// Throws ShapeMismatch when a variable occurs twice.
void check_linear(const Pattern& p);

// ---------------------------------------------------------------------------
// Ground values and the built-in signature

enum class BaseType { Int, Bool, Array };
const char* to_string(BaseType b);

struct Ground {
  std::variant<std::int64_t, bool, std::vector<std::int64_t>> v;

  static Ground integer(std::int64_t n) { return {n}; }
  static Ground boolean(bool b) { return {b}; }
  static Ground array(std::vector<std::int64_t> xs) { return {std::move(xs)}; }

  BaseType base() const;
  friend bool operator==(const Ground&, const Ground&) = default;
};

std::string to_string(const Ground& g);

struct OpSig {
  std::vector<BaseType> args;
  BaseType result;
};

/// Signature of an operator symbol. Literals are handled separately.
/// Recognised: + - == < and or not index update, and the unary shift family
/// +N / -N (e.g. "+1", "-2").
std::optional<OpSig> op_signature(const std::string& op);
bool is_unary_shift(const std::string& op);

/// Built-in semantics of Σ.
Ground apply_op(const std::string& op, const std::vector<Ground>& args);

// ---------------------------------------------------------------------------
// Types

struct Type {
  enum class Kind { Value, Fun, Tuple };

  Kind kind = Kind::Tuple;
  BaseType base = BaseType::Int;           // Value
  Qual qual;                               // Value, Fun
  std::vector<std::string> region_binder;  // Fun, region language
  std::optional<Pattern> binder;           // Fun, global language
  Effect effect;                           // Fun: latent effect
  std::vector<Type> parts;                 // Fun: {dom, cod}; Tuple: elements

  static Type value(BaseType b, Qual q);
  static Type region_fun(std::vector<std::string> binder, Type dom, Effect eff, Type cod, Qual q);
  static Type global_fun(Pattern binder, Type dom, Effect eff, Type cod, Qual q);
  static Type tuple(std::vector<Type> elems);

  bool is_fun() const { return kind == Kind::Fun; }
  bool is_tuple() const { return kind == Kind::Tuple; }
  bool is_value() const { return kind == Kind::Value; }
  const Type& dom() const { return parts.at(0); }
  const Type& cod() const { return parts.at(1); }

  friend bool operator==(const Type&, const Type&) = default;
};

// ---------------------------------------------------------------------------
// Expressions

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Var, Op, Lam, Tuple, App, If, Let, New };

  Kind kind = Kind::Var;
  Var name;                                // Var; App head
  std::string op;                          // Op ("lit" for literals)
  std::optional<Ground> literal;           // Op literal
  Qual qual;                               // Op, Lam: annotation; New: place
  std::vector<ExprPtr> kids;               // Op args, Tuple elems, App {arg}, If {c,t,e},
                                           // Let {rhs, body}, Lam {body}, New {body}
  Pattern pat;                             // Lam, Let
  std::optional<Type> annot;               // Lam domain annotation
  std::optional<std::vector<std::string>> region_binder;  // Lam, region language
  std::vector<Qual> region_args;           // App, region language

  static ExprPtr var(Var n);
  static ExprPtr lit(Ground g, Qual q = Qual::lo());
  static ExprPtr op_at(std::string op, std::vector<ExprPtr> args, Qual q = Qual::lo());
  static ExprPtr lam(Pattern p, std::optional<Type> annot, ExprPtr body, Qual q = Qual::lo(),
                     std::optional<std::vector<std::string>> region_binder = std::nullopt);
  static ExprPtr tuple(std::vector<ExprPtr> elems);
  static ExprPtr app(Var head, ExprPtr arg, std::vector<Qual> region_args = {});
  static ExprPtr if_(ExprPtr c, ExprPtr t, ExprPtr e);
  static ExprPtr let(Pattern p, ExprPtr rhs, ExprPtr body);
  static ExprPtr new_(Qual place, ExprPtr body);

  bool is_literal() const { return kind == Kind::Op && literal.has_value(); }
};

bool expr_equal(const Expr& a, const Expr& b);

/// A canonical form is a pattern of variables.
bool is_canonical(const Expr& e);
/// Converts a canonical expression to the pattern it denotes.
Pattern canonical_pattern(const Expr& e);
ExprPtr pattern_expr(const Pattern& p);

// ---------------------------------------------------------------------------
// Stores and programs

struct Closure {
  std::optional<std::vector<std::string>> region_binder;
  Pattern param;
  std::optional<Type> annot;
  ExprPtr body;
};

struct StorableValue {
  std::variant<Ground, Closure> v;

  bool is_closure() const { return std::holds_alternative<Closure>(v); }
  const Ground& ground() const { return std::get<Ground>(v); }
  const Closure& closure() const { return std::get<Closure>(v); }
};

bool value_equal(const StorableValue& a, const StorableValue& b);

struct Binding {
  Var name;
  StorableValue value;
};

/// Ordered association list with distinct keys.
class Store {
 public:
  Store() = default;

  const StorableValue* find(const Var& x) const;
  bool contains(const Var& x) const { return find(x) != nullptr; }
  /// Appends a binding; throws DuplicateLocation when x is already bound.
  void append(Var x, StorableValue v);
  /// S ∼ {x} followed by x = v (the binding moves to the tail).
  void rebind(const Var& x, StorableValue v);
  void remove(const Var& x);
  std::size_t size() const { return bindings_.size(); }
  bool empty() const { return bindings_.empty(); }
  const std::vector<Binding>& bindings() const { return bindings_; }
  std::vector<Var> names() const;

 private:
  std::vector<Binding> bindings_;
};

/// S ∼ A.
Store store_remove(const Store& s, const std::set<Var>& vars);

/// Next name of the reserved namespace x1, x2, ... not bound in S.
Var fresh_var(const Store& s);
/// Index N when x is a reserved name "xN", else 0.
std::uint64_t fresh_index(const Var& x);

struct Program {
  Store store;
  ExprPtr main;
};

/// Ordered typing context.
class TypeContext {
 public:
  const Type* find(const Var& x) const;
  void push(Var x, Type t);
  /// Γ, x:V with shadowing: an existing binding of x is dropped first.
  void extend(Var x, Type t);
  void erase(const Var& x);
  const std::vector<std::pair<Var, Type>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  friend bool operator==(const TypeContext&, const TypeContext&) = default;

 private:
  std::vector<std::pair<Var, Type>> entries_;
};

// ---------------------------------------------------------------------------
// Free variables and substitution

/// Variables occurring free in expression positions (qualifiers excluded).
std::set<Var> free_vars(const Expr& e);
/// Free variables including those in qualifier and type positions.
std::set<Var> free_vars_all(const Expr& e);
/// Free region variables (places) of e.
std::set<std::string> free_region_vars(const Expr& e);
std::set<std::string> free_region_vars(const Type& t);
/// Variables occurring free in a global type (qualifiers and effects).
std::set<Var> free_type_vars(const Type& t);

using VarMap = std::map<Var, Var>;
using RegionMap = std::map<std::string, Qual>;

/// [p ↦ p′]; throws ShapeMismatch when arities differ.
VarMap subst_builder(const Pattern& p, const Pattern& p2);

/// Capture-avoiding substitution of variables (expression and qualifier
/// positions alike).
ExprPtr apply_subst(const VarMap& m, const ExprPtr& e);
Type apply_subst(const VarMap& m, const Type& t);
/// Replaces region variables by places.
ExprPtr apply_region_subst(const RegionMap& m, const ExprPtr& e);
Type apply_region_subst(const RegionMap& m, const Type& t);
Effect apply_region_subst(const RegionMap& m, const Effect& eff);

/// [p : T].
TypeContext flatten_pattern(const Pattern& p, const Type& t);

}  // namespace glreg
