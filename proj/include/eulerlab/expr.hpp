#pragma once

#include <memory>
#include <string>

namespace eulerlab {

/// Arithmetic in one variable `d`: numbers, d, + - * /, parentheses, unary minus.
class DistanceExpression {
 public:
  /// Throws InvalidArgument on a syntax error.
  explicit DistanceExpression(const std::string& text);
  double operator()(double d) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace eulerlab
