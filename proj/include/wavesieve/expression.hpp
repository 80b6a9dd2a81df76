#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace wavesieve {

// Arithmetic expression over x (alias of x1), x1, ..., xd. Supports
// + - * / ^, unary minus, parentheses, comparisons (< <= > >=, giving 1 or
// 0), numeric literals, the constants pi and e, and the functions exp, log,
// sqrt, abs, sin, cos, tan, tanh.
class Expression {
 public:
  static Expression parse(std::string_view text, int dimension);

  double operator()(std::span<const double> x) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  Expression(std::string text, std::shared_ptr<const Node> root)
      : text_(std::move(text)), root_(std::move(root)) {}

  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace wavesieve
