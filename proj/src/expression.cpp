#include "gcfl/expression.hpp"

#include <cctype>
#include <cstdlib>
#include <numbers>
#include <utility>

namespace gcfl {

namespace {

using detail::ExprNode;
using detail::Function;
using detail::NodeKind;
using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_number(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::number;
  n->number = v;
  n->constant = true;
  return n;
}

// Builds an interior node, folding it to a number when all children are constant.
NodePtr make_node(NodeKind kind, NodePtr lhs, NodePtr rhs = nullptr, Function f = Function::sin) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->function = f;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  const bool constant = n->lhs->constant && (!n->rhs || n->rhs->constant);
  if (constant) {
    try {
      const double v = detail::evaluate_node<double>(*n, std::span<const double>());
      return make_number(v);
    } catch (const DomainError&) {
      // Leave unfolded; the error surfaces at evaluation time.
    }
  }
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& vars, int line, int column)
      : text_(text), vars_(vars), line_(line), column_(column) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_, column_ + static_cast<int>(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make_node(NodeKind::add, lhs, term());
      else if (accept('-'))
        lhs = make_node(NodeKind::subtract, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      skip_space();
      // "**" is a power, not a product.
      if (pos_ + 1 < text_.size() && text_[pos_] == '*' && text_[pos_ + 1] == '*') return lhs;
      if (accept('*'))
        lhs = make_node(NodeKind::multiply, lhs, unary());
      else if (accept('/'))
        lhs = make_node(NodeKind::divide, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_node(NodeKind::negate, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    skip_space();
    if (accept('^')) return make_node(NodeKind::power, base, unary());
    if (pos_ + 1 < text_.size() && text_[pos_] == '*' && text_[pos_ + 1] == '*') {
      pos_ += 2;
      return make_node(NodeKind::power, base, unary());
    }
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::string rest(text_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    return make_number(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string name(text_.substr(start, pos_ - start));

    static const std::pair<const char*, Function> functions[] = {
        {"sin", Function::sin},   {"cos", Function::cos}, {"tan", Function::tan},
        {"exp", Function::exp},   {"log", Function::log}, {"ln", Function::log},
        {"sqrt", Function::sqrt}, {"abs", Function::abs}};
    for (const auto& [fname, f] : functions) {
      if (name == fname) {
        if (!accept('(')) fail("expected '(' after " + name);
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return make_node(NodeKind::call, arg, nullptr, f);
      }
    }
    if (name == "pi") return make_number(std::numbers::pi);
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == name) {
        auto n = std::make_shared<ExprNode>();
        n->kind = NodeKind::variable;
        n->variable = static_cast<int>(i);
        return n;
      }
    }
    pos_ = start;
    fail("unknown identifier '" + name + "'");
  }

  std::string_view text_;
  const std::vector<std::string>& vars_;
  int line_;
  int column_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text, std::vector<std::string> variables, int line,
                             int column) {
  Expression e;
  e.root_ = Parser(text, variables, line, column).parse();
  e.variables_ = std::move(variables);
  e.text_ = std::string(text);
  return e;
}

}  // namespace gcfl
