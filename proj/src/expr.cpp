#include "oodn/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace oodn {

namespace {

ExprPtr make(ExprKind kind) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  return e;
}

void require_arithmetic(const std::vector<ExprPtr>& operands, const char* op) {
  for (const auto& o : operands)
    if (o->is_boolean())
      throw std::invalid_argument(std::string("boolean operand under ") + op);
}

}  // namespace

ExprPtr Expr::literal(Rational v) {
  auto e = std::const_pointer_cast<Expr>(make(ExprKind::Literal));
  e->value = std::move(v);
  return e;
}

ExprPtr Expr::variable(std::string name) {
  if (name.empty()) throw std::invalid_argument("empty variable name");
  auto e = std::const_pointer_cast<Expr>(make(ExprKind::Variable));
  e->name = std::move(name);
  return e;
}

ExprPtr Expr::property_ref(std::string key, int index) {
  if (key.empty()) throw std::invalid_argument("empty property key");
  if (index < 1) throw std::invalid_argument("property index must be >= 1");
  auto e = std::const_pointer_cast<Expr>(make(ExprKind::PropertyRef));
  e->name = std::move(key);
  e->index = index;
  return e;
}

namespace {

ExprPtr nary(ExprKind kind, std::vector<ExprPtr> operands, std::size_t min_arity,
             const char* op, bool boolean_operands) {
  if (operands.size() < min_arity)
    throw std::invalid_argument(std::string(op) + ": too few operands");
  if (boolean_operands) {
    for (const auto& o : operands)
      if (!o->is_boolean())
        throw std::invalid_argument(std::string(op) + ": operand must be boolean");
  } else {
    require_arithmetic(operands, op);
  }
  auto e = std::const_pointer_cast<Expr>(make(kind));
  e->operands = std::move(operands);
  return e;
}

}  // namespace

ExprPtr Expr::add(std::vector<ExprPtr> operands) {
  return nary(ExprKind::Add, std::move(operands), 2, "+", false);
}
ExprPtr Expr::mul(std::vector<ExprPtr> operands) {
  return nary(ExprKind::Mul, std::move(operands), 2, "*", false);
}
ExprPtr Expr::sub(ExprPtr a, ExprPtr b) {
  return nary(ExprKind::Sub, {std::move(a), std::move(b)}, 2, "-", false);
}
ExprPtr Expr::div(ExprPtr a, ExprPtr b) {
  return nary(ExprKind::Div, {std::move(a), std::move(b)}, 2, "/", false);
}
ExprPtr Expr::pow(ExprPtr base, ExprPtr exponent) {
  return nary(ExprKind::Pow, {std::move(base), std::move(exponent)}, 2, "pow", false);
}
ExprPtr Expr::sin(ExprPtr arg) {
  return nary(ExprKind::Sin, {std::move(arg)}, 1, "sin", false);
}
ExprPtr Expr::eq_chain(std::vector<ExprPtr> operands) {
  return nary(ExprKind::EqChain, std::move(operands), 2, "=", false);
}
ExprPtr Expr::conj(std::vector<ExprPtr> operands) {
  return nary(ExprKind::And, std::move(operands), 1, "and", true);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
  std::string text;
  std::size_t offset;
  bool open = false;
  bool close = false;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '(' || c == ')') {
      out.push_back({std::string(1, c), i, c == '(', c == ')'});
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
           text[i] != '(' && text[i] != ')')
      ++i;
    out.push_back({text.substr(start, i - start), start, false, false});
  }
  return out;
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.')
      return false;
  return true;
}

class Parser {
 public:
  Parser(const std::string& text) : text_(text), tokens_(tokenize(text)) {}

  ExprPtr parse() {
    ExprPtr e = expression();
    if (pos_ != tokens_.size())
      throw ParseError("trailing input", tokens_[pos_].offset);
    return e;
  }

 private:
  const Token& peek() {
    if (pos_ >= tokens_.size())
      throw ParseError("unexpected end of input", text_.size());
    return tokens_[pos_];
  }

  Token next() {
    Token t = peek();
    ++pos_;
    return t;
  }

  ExprPtr expression() {
    const Token& t = peek();
    if (t.close) throw ParseError("unexpected ')'", t.offset);
    if (!t.open) return atom(next());
    return list();
  }

  ExprPtr atom(const Token& t) {
    if (auto r = parse_rational(t.text)) return Expr::literal(*r);
    if (t.text.rfind("var:", 0) == 0) {
      std::string name = t.text.substr(4);
      if (!valid_name(name)) throw ParseError("invalid variable name", t.offset);
      return Expr::variable(name);
    }
    throw ParseError("unknown atom '" + t.text + "'", t.offset);
  }

  ExprPtr list() {
    Token open = next();  // '('
    const Token& head = peek();
    if (head.open || head.close)
      throw ParseError("expected operator", head.offset);
    Token op = next();
    if (op.text == "ref") return ref(open);
    std::vector<ExprPtr> operands;
    while (!peek().close) operands.push_back(expression());
    next();  // ')'
    try {
      if (op.text == "+") return Expr::add(std::move(operands));
      if (op.text == "*") return Expr::mul(std::move(operands));
      if (op.text == "-") return binary(op, std::move(operands), &Expr::sub);
      if (op.text == "/") return binary(op, std::move(operands), &Expr::div);
      if (op.text == "pow") return binary(op, std::move(operands), &Expr::pow);
      if (op.text == "sin") {
        if (operands.size() != 1)
          throw ParseError("sin takes exactly 1 operand", op.offset);
        return Expr::sin(std::move(operands[0]));
      }
      if (op.text == "=") return Expr::eq_chain(std::move(operands));
      if (op.text == "and") return Expr::conj(std::move(operands));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), op.offset);
    }
    throw ParseError("unknown operator '" + op.text + "'", op.offset);
  }

  ExprPtr binary(const Token& op, std::vector<ExprPtr> operands,
                 ExprPtr (*f)(ExprPtr, ExprPtr)) {
    if (operands.size() != 2)
      throw ParseError("'" + op.text + "' takes exactly 2 operands", op.offset);
    return f(std::move(operands[0]), std::move(operands[1]));
  }

  ExprPtr ref(const Token& open) {
    const Token& kt = peek();
    if (kt.open || kt.close) throw ParseError("expected property key", kt.offset);
    Token key = next();
    if (!valid_name(key.text) || key.text.find('.') != std::string::npos)
      throw ParseError("invalid property key", key.offset);
    const Token& it = peek();
    if (it.open || it.close) throw ParseError("expected slot index", it.offset);
    Token idx = next();
    auto r = parse_rational(idx.text);
    if (!r || !is_integer(*r) || *r < 1)
      throw ParseError("slot index must be a positive integer", idx.offset);
    if (!peek().close) throw ParseError("expected ')'", peek().offset);
    next();
    (void)open;
    return Expr::property_ref(key.text, numerator(*r).convert_to<int>());
  }

  const std::string& text_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

ExprPtr parse_expression(const std::string& text) {
  return Parser(text).parse();
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

const char* op_symbol(ExprKind kind) {
  switch (kind) {
    case ExprKind::Add: return "+";
    case ExprKind::Mul: return "*";
    case ExprKind::Sub: return "-";
    case ExprKind::Div: return "/";
    case ExprKind::Pow: return "pow";
    case ExprKind::Sin: return "sin";
    case ExprKind::EqChain: return "=";
    case ExprKind::And: return "and";
    default: return "?";
  }
}

void render_into(const Expr& e, std::ostringstream& os) {
  switch (e.kind) {
    case ExprKind::Literal:
      os << render_rational(e.value);
      return;
    case ExprKind::Variable:
      os << "var:" << e.name;
      return;
    case ExprKind::PropertyRef:
      os << "(ref " << e.name << ' ' << e.index << ')';
      return;
    default:
      os << '(' << op_symbol(e.kind);
      for (const auto& o : e.operands) {
        os << ' ';
        render_into(*o, os);
      }
      os << ')';
  }
}

}  // namespace

std::string render(const Expr& e) {
  std::ostringstream os;
  render_into(e, os);
  return os.str();
}

// ---------------------------------------------------------------------------
// Ordering and identity

namespace {

int kind_rank(ExprKind k) { return static_cast<int>(k); }

}  // namespace

int compare(const Expr& a, const Expr& b) {
  if (kind_rank(a.kind) != kind_rank(b.kind))
    return kind_rank(a.kind) < kind_rank(b.kind) ? -1 : 1;
  switch (a.kind) {
    case ExprKind::Literal:
      if (a.value != b.value) return a.value < b.value ? -1 : 1;
      return 0;
    case ExprKind::Variable:
      return a.name.compare(b.name);
    case ExprKind::PropertyRef: {
      int c = a.name.compare(b.name);
      if (c != 0) return c;
      if (a.index != b.index) return a.index < b.index ? -1 : 1;
      return 0;
    }
    default: {
      std::size_t n = std::min(a.operands.size(), b.operands.size());
      for (std::size_t i = 0; i < n; ++i) {
        int c = compare(*a.operands[i], *b.operands[i]);
        if (c != 0) return c;
      }
      if (a.operands.size() != b.operands.size())
        return a.operands.size() < b.operands.size() ? -1 : 1;
      return 0;
    }
  }
}

bool identical(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

// ---------------------------------------------------------------------------
// Normalization

namespace {

/// Exact sine table for degree arguments reduced mod 360; nullopt when the
/// sine is irrational.
std::optional<Rational> exact_sin_degrees(const Rational& degrees) {
  Rational r = degrees;
  Rational period(360);
  // Reduce into [0, 360).
  Integer q = numerator(r) / (denominator(r) * 360);
  r -= Rational(q * 360);
  if (r < 0) r += period;
  if (r == 0 || r == 180) return Rational(0);
  if (r == 30 || r == 150) return Rational(1, 2);
  if (r == 90) return Rational(1);
  if (r == 210 || r == 330) return Rational(-1, 2);
  if (r == 270) return Rational(-1);
  return std::nullopt;
}

void splice(ExprKind kind, const ExprPtr& e, std::vector<ExprPtr>& out) {
  if (e->kind == kind) {
    for (const auto& o : e->operands) splice(kind, o, out);
  } else {
    out.push_back(e);
  }
}

ExprPtr sorted_nary(ExprKind kind, std::vector<ExprPtr> kids) {
  std::sort(kids.begin(), kids.end(),
            [](const ExprPtr& x, const ExprPtr& y) { return compare(*x, *y) < 0; });
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->operands = std::move(kids);
  return e;
}

/// Flatten, fold constants, drop the neutral element, sort.
ExprPtr normalize_assoc(ExprKind kind, const std::vector<ExprPtr>& normalized,
                        const Rational& neutral) {
  std::vector<ExprPtr> flat;
  for (const auto& o : normalized) splice(kind, o, flat);
  Rational folded = neutral;
  std::vector<ExprPtr> rest;
  for (const auto& o : flat) {
    if (o->kind == ExprKind::Literal) {
      if (kind == ExprKind::Add)
        folded += o->value;
      else
        folded *= o->value;
    } else {
      rest.push_back(o);
    }
  }
  if (rest.empty()) return Expr::literal(folded);
  if (folded != neutral) rest.push_back(Expr::literal(folded));
  if (rest.size() == 1) return rest[0];
  return sorted_nary(kind, std::move(rest));
}

}  // namespace

ExprPtr normalize(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Literal:
    case ExprKind::Variable:
    case ExprKind::PropertyRef:
      return e;
    case ExprKind::Sub: {
      ExprPtr a = normalize(e->operands[0]);
      ExprPtr b = normalize(e->operands[1]);
      return normalize(Expr::add({a, Expr::mul({Expr::literal(-1), b})}));
    }
    case ExprKind::Add: {
      std::vector<ExprPtr> kids;
      for (const auto& o : e->operands) kids.push_back(normalize(o));
      return normalize_assoc(ExprKind::Add, kids, Rational(0));
    }
    case ExprKind::Mul: {
      std::vector<ExprPtr> kids;
      for (const auto& o : e->operands) kids.push_back(normalize(o));
      return normalize_assoc(ExprKind::Mul, kids, Rational(1));
    }
    case ExprKind::Div: {
      ExprPtr a = normalize(e->operands[0]);
      ExprPtr b = normalize(e->operands[1]);
      if (a->kind == ExprKind::Literal && b->kind == ExprKind::Literal &&
          b->value != 0)
        return Expr::literal(a->value / b->value);
      return Expr::div(a, b);
    }
    case ExprKind::Pow: {
      ExprPtr base = normalize(e->operands[0]);
      ExprPtr exp = normalize(e->operands[1]);
      if (base->kind == ExprKind::Literal && exp->kind == ExprKind::Literal &&
          is_integer(exp->value) && abs(numerator(exp->value)) <= 16 &&
          !(base->value == 0 && exp->value < 0)) {
        return Expr::literal(rational_pow(base->value, numerator(exp->value)));
      }
      return Expr::pow(base, exp);
    }
    case ExprKind::Sin: {
      ExprPtr arg = normalize(e->operands[0]);
      if (arg->kind == ExprKind::Literal)
        if (auto s = exact_sin_degrees(arg->value)) return Expr::literal(*s);
      return Expr::sin(arg);
    }
    case ExprKind::EqChain: {
      std::vector<ExprPtr> kids;
      for (const auto& o : e->operands) kids.push_back(normalize(o));
      return sorted_nary(ExprKind::EqChain, std::move(kids));
    }
    case ExprKind::And: {
      std::vector<ExprPtr> flat;
      for (const auto& o : e->operands) splice(ExprKind::And, normalize(o), flat);
      if (flat.size() == 1) return flat[0];
      return sorted_nary(ExprKind::And, std::move(flat));
    }
  }
  throw std::logic_error("unreachable expression kind");
}

bool expressions_equal(const ExprPtr& a, const ExprPtr& b) {
  return identical(*normalize(a), *normalize(b));
}

// ---------------------------------------------------------------------------
// Evaluation

void Binding::set_slot(const std::string& key, int index, Rational magnitude,
                       Unit unit) {
  slots_[{key, index}] = {std::move(magnitude), std::move(unit)};
}

void Binding::set_variable(const std::string& name, Rational magnitude, Unit unit) {
  variables_[name] = {std::move(magnitude), std::move(unit)};
}

const std::pair<Rational, Unit>* Binding::slot(const std::string& key,
                                               int index) const {
  auto it = slots_.find({key, index});
  return it == slots_.end() ? nullptr : &it->second;
}

const std::pair<Rational, Unit>* Binding::variable(const std::string& name) const {
  auto it = variables_.find(name);
  return it == variables_.end() ? nullptr : &it->second;
}

namespace {

/// Dimensionless values take the other operand's unit in additive and
/// equality positions.
Unit unify_units(const Unit& a, const Unit& b, const char* context) {
  if (a.is_dimensionless()) return b;
  if (b.is_dimensionless()) return a;
  if (a == b) return a;
  throw EvalError(std::string("unit mismatch in ") + context + ": " + a.render() +
                  " vs " + b.render());
}

Value require_magnitude(const Value& v, const char* context) {
  if (v.is_boolean())
    throw EvalError(std::string("boolean value in arithmetic ") + context);
  return v;
}

bool magnitudes_equal(const Value& a, const Value& b) {
  if (a.is_exact() && b.is_exact())
    return a.exact_magnitude() == b.exact_magnitude();
  return std::fabs(a.magnitude() - b.magnitude()) <= kEqChainTolerance;
}

}  // namespace

Value evaluate(const Expr& e, const Binding& b) {
  switch (e.kind) {
    case ExprKind::Literal:
      return Value::exact(e.value, Unit{});
    case ExprKind::Variable: {
      const auto* v = b.variable(e.name);
      if (!v) throw EvalError("unbound variable '" + e.name + "'");
      return Value::exact(v->first, v->second);
    }
    case ExprKind::PropertyRef: {
      const auto* v = b.slot(e.name, e.index);
      if (!v)
        throw EvalError("unbound slot '" + e.name + "' index " +
                        std::to_string(e.index));
      return Value::exact(v->first, v->second);
    }
    case ExprKind::Add: {
      Rational sum_exact(0);
      double sum_approx = 0;
      bool exact = true;
      Unit unit;
      for (const auto& o : e.operands) {
        Value v = require_magnitude(evaluate(*o, b), "sum");
        unit = unify_units(unit, v.unit(), "sum");
        if (exact && v.is_exact()) {
          sum_exact += v.exact_magnitude();
        } else {
          if (exact) {
            sum_approx = to_double(sum_exact);
            exact = false;
          }
          sum_approx += v.magnitude();
        }
      }
      return exact ? Value::exact(sum_exact, unit) : Value::approx(sum_approx, unit);
    }
    case ExprKind::Mul: {
      Rational prod_exact(1);
      double prod_approx = 1;
      bool exact = true;
      Unit unit;
      for (const auto& o : e.operands) {
        Value v = require_magnitude(evaluate(*o, b), "product");
        unit = unit * v.unit();
        if (exact && v.is_exact()) {
          prod_exact *= v.exact_magnitude();
        } else {
          if (exact) {
            prod_approx = to_double(prod_exact);
            exact = false;
          }
          prod_approx *= v.magnitude();
        }
      }
      return exact ? Value::exact(prod_exact, unit)
                   : Value::approx(prod_approx, unit);
    }
    case ExprKind::Sub: {
      Value x = require_magnitude(evaluate(*e.operands[0], b), "difference");
      Value y = require_magnitude(evaluate(*e.operands[1], b), "difference");
      Unit unit = unify_units(x.unit(), y.unit(), "difference");
      if (x.is_exact() && y.is_exact())
        return Value::exact(x.exact_magnitude() - y.exact_magnitude(), unit);
      return Value::approx(x.magnitude() - y.magnitude(), unit);
    }
    case ExprKind::Div: {
      Value x = require_magnitude(evaluate(*e.operands[0], b), "quotient");
      Value y = require_magnitude(evaluate(*e.operands[1], b), "quotient");
      Unit unit = x.unit() / y.unit();
      if (x.is_exact() && y.is_exact()) {
        if (y.exact_magnitude() == 0) throw EvalError("division by zero");
        return Value::exact(x.exact_magnitude() / y.exact_magnitude(), unit);
      }
      if (y.magnitude() == 0) throw EvalError("division by zero");
      return Value::approx(x.magnitude() / y.magnitude(), unit);
    }
    case ExprKind::Pow: {
      Value base = require_magnitude(evaluate(*e.operands[0], b), "power");
      Value exp = require_magnitude(evaluate(*e.operands[1], b), "power");
      if (!exp.is_exact() || !is_integer(exp.exact_magnitude()))
        throw EvalError("exponent must be an exact integer");
      Integer k = numerator(exp.exact_magnitude());
      if (k > 1000 || k < -1000) throw EvalError("exponent out of range");
      int ki = k.convert_to<int>();
      Unit unit = base.unit().pow(ki);
      if (base.is_exact()) {
        if (base.exact_magnitude() == 0 && ki < 0)
          throw EvalError("division by zero");
        return Value::exact(rational_pow(base.exact_magnitude(), k), unit);
      }
      return Value::approx(std::pow(base.magnitude(), ki), unit);
    }
    case ExprKind::Sin: {
      Value arg = require_magnitude(evaluate(*e.operands[0], b), "sine");
      if (!arg.unit().is_dimensionless() && arg.unit() != Unit("deg"))
        throw EvalError("sine argument must be an angle in deg, got " +
                        arg.unit().render());
      if (arg.is_exact())
        if (auto s = exact_sin_degrees(arg.exact_magnitude()))
          return Value::exact(*s, Unit{});
      constexpr double kPi = 3.14159265358979323846;
      return Value::approx(std::sin(arg.magnitude() * kPi / 180.0), Unit{});
    }
    case ExprKind::EqChain: {
      std::vector<Value> values;
      Unit unit;
      for (const auto& o : e.operands) {
        Value v = require_magnitude(evaluate(*o, b), "equality");
        unit = unify_units(unit, v.unit(), "equality chain");
        values.push_back(v);
      }
      for (std::size_t i = 1; i < values.size(); ++i)
        if (!magnitudes_equal(values[0], values[i])) return Value::boolean(false);
      return Value::boolean(true);
    }
    case ExprKind::And: {
      for (const auto& o : e.operands) {
        Value v = evaluate(*o, b);
        if (!v.is_boolean()) throw EvalError("non-boolean operand under and");
        if (!v.truth()) return Value::boolean(false);
      }
      return Value::boolean(true);
    }
  }
  throw std::logic_error("unreachable expression kind");
}

std::set<std::pair<std::string, int>> collect_refs(const Expr& e) {
  std::set<std::pair<std::string, int>> out;
  std::vector<const Expr*> stack{&e};
  while (!stack.empty()) {
    const Expr* cur = stack.back();
    stack.pop_back();
    if (cur->kind == ExprKind::PropertyRef) out.insert({cur->name, cur->index});
    for (const auto& o : cur->operands) stack.push_back(o.get());
  }
  return out;
}

std::set<std::string> collect_variables(const Expr& e) {
  std::set<std::string> out;
  std::vector<const Expr*> stack{&e};
  while (!stack.empty()) {
    const Expr* cur = stack.back();
    stack.pop_back();
    if (cur->kind == ExprKind::Variable) out.insert(cur->name);
    for (const auto& o : cur->operands) stack.push_back(o.get());
  }
  return out;
}

}  // namespace oodn
