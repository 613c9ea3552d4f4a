#pragma once

// Arithmetic expression trees with exact forward-mode derivatives.
//
// Grammar (precedence low to high, '^' right associative and binding tighter
// than unary minus, so -x^2 == -(x^2)):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?
//   primary := number | 'pi' | variable | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | tan | exp | log | ln | sqrt | abs
//
// Evaluation is templated on the scalar so the same tree yields values
// (double), univariate Taylor jets or second-order multivariate duals.

#include "gcfl/autodiff.hpp"
#include "gcfl/errors.hpp"

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gcfl {

namespace detail {

enum class NodeKind { number, variable, negate, add, subtract, multiply, divide, power, call };
enum class Function { sin, cos, tan, exp, log, sqrt, abs };

struct ExprNode {
  NodeKind kind = NodeKind::number;
  double number = 0.0;
  int variable = -1;
  Function function = Function::sin;
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
  bool constant = false;  // subtree has no variables; `number` holds its value
};

template <typename S>
S apply_function(Function f, const S& a) {
  using std::abs;
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sqrt;
  using std::tan;
  const double v = value_of(a);
  switch (f) {
    case Function::sin: return sin(a);
    case Function::cos: return cos(a);
    case Function::tan: return tan(a);
    case Function::exp: return exp(a);
    case Function::log:
      if (!(v > 0.0)) throw DomainError("log of nonpositive argument " + std::to_string(v));
      return log(a);
    case Function::sqrt:
      if (v < 0.0) throw DomainError("sqrt of negative argument " + std::to_string(v));
      return sqrt(a);
    case Function::abs: return abs(a);
  }
  throw Error("unknown function");
}

template <typename S>
S power(const S& base, const ExprNode& exponent, const S& exponent_value) {
  using std::exp;
  using std::log;
  using std::pow;
  const double b = value_of(base);
  if (exponent.constant) {
    const double p = exponent.number;
    if (std::nearbyint(p) == p && std::abs(p) < 1e9) {
      if (b == 0.0 && p < 0.0) throw DomainError("zero raised to a negative power");
      return powi(base, static_cast<long>(p));
    }
    if (b < 0.0) throw DomainError("negative base with non-integer exponent");
    if (b == 0.0) {
      if (p > 0.0) return S(0.0);
      throw DomainError("zero raised to a nonpositive power");
    }
    return pow(base, p);
  }
  if (!(b > 0.0)) throw DomainError("variable exponent requires a positive base");
  return exp(exponent_value * log(base));
}

template <typename S>
S evaluate_node(const ExprNode& n, std::span<const S> vars) {
  switch (n.kind) {
    case NodeKind::number: return S(n.number);
    case NodeKind::variable: return vars[static_cast<std::size_t>(n.variable)];
    case NodeKind::negate: return -evaluate_node(*n.lhs, vars);
    case NodeKind::add: return evaluate_node(*n.lhs, vars) + evaluate_node(*n.rhs, vars);
    case NodeKind::subtract: return evaluate_node(*n.lhs, vars) - evaluate_node(*n.rhs, vars);
    case NodeKind::multiply: return evaluate_node(*n.lhs, vars) * evaluate_node(*n.rhs, vars);
    case NodeKind::divide: {
      S den = evaluate_node(*n.rhs, vars);
      if (value_of(den) == 0.0) throw DomainError("division by zero");
      return evaluate_node(*n.lhs, vars) / den;
    }
    case NodeKind::power: {
      S base = evaluate_node(*n.lhs, vars);
      S expo = n.rhs->constant ? S(n.rhs->number) : evaluate_node(*n.rhs, vars);
      return power(base, *n.rhs, expo);
    }
    case NodeKind::call: return apply_function(n.function, evaluate_node(*n.lhs, vars));
  }
  throw Error("corrupt expression node");
}

}  // namespace detail

class Expression {
 public:
  Expression() = default;

  // `line`/`column` locate the first character of `text` inside a larger
  // document so that diagnostics point at the right place.
  static Expression parse(std::string_view text, std::vector<std::string> variables, int line = 1,
                          int column = 1);

  template <typename S>
  S evaluate(std::span<const S> vars) const {
    if (vars.size() != variables_.size()) throw Error("expression arity mismatch");
    return detail::evaluate_node<S>(*root_, vars);
  }

  double operator()(std::span<const double> vars) const { return evaluate<double>(vars); }
  double operator()(double x) const { return evaluate<double>(std::span<const double>(&x, 1)); }

  const std::string& text() const { return text_; }
  const std::vector<std::string>& variables() const { return variables_; }
  bool empty() const { return root_ == nullptr; }

 private:
  std::shared_ptr<const detail::ExprNode> root_;
  std::vector<std::string> variables_;
  std::string text_;
};

}  // namespace gcfl
