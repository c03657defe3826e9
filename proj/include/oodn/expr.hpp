#ifndef OODN_EXPR_HPP
#define OODN_EXPR_HPP

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "oodn/rational.hpp"
#include "oodn/unit.hpp"

namespace oodn {

enum class ExprKind {
  Literal,      // exact rational constant
  Variable,     // named free variable
  PropertyRef,  // slot of a role-keyed property, index is 1-based
  Add,          // n-ary, commutative
  Mul,          // n-ary, commutative
  Sub,          // binary
  Div,          // binary
  Pow,          // binary, integer exponent at evaluation time
  Sin,          // unary, argument in degrees
  EqChain,      // n-ary equality chain, boolean-valued
  And,          // n-ary conjunction of boolean operands
};

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression node. Build through the factory functions; they
/// enforce arity and the boolean/arithmetic layering (EqChain and And are
/// boolean-valued and may not appear under arithmetic operators).
class Expr {
 public:
  ExprKind kind;
  Rational value;              // Literal
  std::string name;            // Variable name, or PropertyRef key
  int index = 0;               // PropertyRef slot, >= 1
  std::vector<ExprPtr> operands;

  bool is_boolean() const {
    return kind == ExprKind::EqChain || kind == ExprKind::And;
  }

  static ExprPtr literal(Rational v);
  static ExprPtr literal(long v) { return literal(Rational(v)); }
  static ExprPtr variable(std::string name);
  static ExprPtr property_ref(std::string key, int index);
  static ExprPtr add(std::vector<ExprPtr> operands);
  static ExprPtr mul(std::vector<ExprPtr> operands);
  static ExprPtr sub(ExprPtr a, ExprPtr b);
  static ExprPtr div(ExprPtr a, ExprPtr b);
  static ExprPtr pow(ExprPtr base, ExprPtr exponent);
  static ExprPtr sin(ExprPtr arg);
  static ExprPtr eq_chain(std::vector<ExprPtr> operands);
  static ExprPtr conj(std::vector<ExprPtr> operands);
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& message, std::size_t offset)
      : std::runtime_error(message + " at offset " + std::to_string(offset)),
        offset(offset) {}
  std::size_t offset;
};

/// Parses the s-expression grammar. Atoms: integers, rationals "p/q",
/// "var:<name>", "(ref <key> <index>)". Operators: + * - / pow sin = and.
ExprPtr parse_expression(const std::string& text);

/// Canonical text form; parse_expression(render(e)) == e structure-for-structure.
std::string render(const Expr& e);
inline std::string render(const ExprPtr& e) { return render(*e); }

/// Deterministic total order on expression trees: <0, 0, >0.
int compare(const Expr& a, const Expr& b);

/// Structural identity (same tree).
bool identical(const Expr& a, const Expr& b);
inline bool identical(const ExprPtr& a, const ExprPtr& b) {
  return identical(*a, *b);
}

/// Canonical form: associative operators flattened, commutative operand
/// lists sorted, rational constants folded, Sub(a,b) rewritten as
/// Add(a, Mul(-1, b)). Idempotent.
ExprPtr normalize(const ExprPtr& e);

/// True iff normalize(a) and normalize(b) are identical trees.
bool expressions_equal(const ExprPtr& a, const ExprPtr& b);

// ---------------------------------------------------------------------------
// Evaluation

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Tolerance applied inside equality chains once an irrational intermediate
/// (a non-table sine) has entered the computation. Exact rationals compare
/// exactly.
inline constexpr double kEqChainTolerance = 1e-9;

/// Evaluation result: boolean (for EqChain/And), or a magnitude with unit.
/// The magnitude stays an exact rational until a non-table sine forces a
/// double.
class Value {
 public:
  static Value boolean(bool b) { return Value(b, Unit{}); }
  static Value exact(Rational r, Unit u) { return Value(std::move(r), std::move(u)); }
  static Value approx(double d, Unit u) { return Value(d, std::move(u)); }

  bool is_boolean() const { return std::holds_alternative<bool>(v_); }
  bool is_exact() const { return std::holds_alternative<Rational>(v_); }
  bool truth() const { return std::get<bool>(v_); }
  const Rational& exact_magnitude() const { return std::get<Rational>(v_); }
  double magnitude() const {
    if (is_exact()) return to_double(exact_magnitude());
    return std::get<double>(v_);
  }
  const Unit& unit() const { return unit_; }

  bool operator==(const Value& other) const = default;

 private:
  Value(std::variant<bool, Rational, double> v, Unit u)
      : v_(std::move(v)), unit_(std::move(u)) {}
  std::variant<bool, Rational, double> v_;
  Unit unit_;
};

/// Assignment of property slots and free variables to rational magnitudes
/// with units.
class Binding {
 public:
  void set_slot(const std::string& key, int index, Rational magnitude, Unit unit);
  void set_variable(const std::string& name, Rational magnitude, Unit unit);

  const std::pair<Rational, Unit>* slot(const std::string& key, int index) const;
  const std::pair<Rational, Unit>* variable(const std::string& name) const;

  const std::map<std::pair<std::string, int>, std::pair<Rational, Unit>>& slots()
      const {
    return slots_;
  }
  const std::map<std::string, std::pair<Rational, Unit>>& variables() const {
    return variables_;
  }

 private:
  std::map<std::pair<std::string, int>, std::pair<Rational, Unit>> slots_;
  std::map<std::string, std::pair<Rational, Unit>> variables_;
};

/// Exact rational arithmetic for + - * / and integer pow; sin evaluated in
/// degrees, exact on table angles (multiples of 30 and 90 whose sine is
/// 0, +-1/2 or +-1), double otherwise. Dimensionless values unify with any
/// unit in additive and equality positions.
Value evaluate(const Expr& e, const Binding& b);
inline Value evaluate(const ExprPtr& e, const Binding& b) { return evaluate(*e, b); }

/// All (key, index) property slots appearing in e.
std::set<std::pair<std::string, int>> collect_refs(const Expr& e);
/// All free-variable names appearing in e.
std::set<std::string> collect_variables(const Expr& e);

}  // namespace oodn

#endif
