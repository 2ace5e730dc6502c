#include "eulerlab/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

#include "eulerlab/errors.hpp"

namespace eulerlab {

struct DistanceExpression::Node {
  char op = 0;  ///< 'n' number, 'd' variable, '~' negation, or a binary operator
  double value = 0.0;
  std::shared_ptr<const Node> lhs, rhs;

  double eval(double d) const {
    switch (op) {
      case 'n': return value;
      case 'd': return d;
      case '~': return -lhs->eval(d);
      case '+': return lhs->eval(d) + rhs->eval(d);
      case '-': return lhs->eval(d) - rhs->eval(d);
      case '*': return lhs->eval(d) * rhs->eval(d);
      default: return lhs->eval(d) / rhs->eval(d);
    }
  }
};

namespace {

using NodePtr = std::shared_ptr<const DistanceExpression::Node>;

// expr := term (('+'|'-') term)* ; term := unary (('*'|'/') unary)* ;
// unary := '-' unary | primary ; primary := number | 'd' | '(' expr ')'
class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected character");
    return e;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::InvalidArgument, "c-expression: " + what + " at position " + std::to_string(pos_) + " in '" + s_ + "'");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  static NodePtr binary(char op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<DistanceExpression::Node>();
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }
  NodePtr expr() {
    NodePtr e = term();
    for (;;) {
      if (eat('+')) e = binary('+', e, term());
      else if (eat('-')) e = binary('-', e, term());
      else return e;
    }
  }
  NodePtr term() {
    NodePtr e = unary();
    for (;;) {
      if (eat('*')) e = binary('*', e, unary());
      else if (eat('/')) e = binary('/', e, unary());
      else return e;
    }
  }
  NodePtr unary() {
    if (eat('-')) return binary('~', unary(), nullptr);
    if (eat('+')) return unary();
    return primary();
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end");
    if (eat('(')) {
      NodePtr e = expr();
      if (!eat(')')) error("missing ')'");
      return e;
    }
    if (s_[pos_] == 'd') {
      ++pos_;
      auto n = std::make_shared<DistanceExpression::Node>();
      n->op = 'd';
      return n;
    }
    const char* begin = s_.data() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || !(std::isdigit(static_cast<unsigned char>(*begin)) || *begin == '.')) error("expected a number, 'd' or '('");
    pos_ += static_cast<std::size_t>(end - begin);
    auto n = std::make_shared<DistanceExpression::Node>();
    n->op = 'n';
    n->value = v;
    return n;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

DistanceExpression::DistanceExpression(const std::string& text) : text_(text), root_(Parser(text).parse()) {}

double DistanceExpression::operator()(double d) const { return root_->eval(d); }

}  // namespace eulerlab
