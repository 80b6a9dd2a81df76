#include "wavesieve/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

#include "wavesieve/error.hpp"

namespace wavesieve {

struct Expression::Node {
  enum class Kind { kConstant, kVariable, kUnary, kBinary, kFunction };
  Kind kind = Kind::kConstant;
  double value = 0.0;
  int variable = 0;
  char op = 0;  // binary: + - * / ^ < > l (<=) g (>=); unary: -
  double (*function)(double) = nullptr;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(std::span<const double> x) const {
    switch (kind) {
      case Kind::kConstant:
        return value;
      case Kind::kVariable:
        return x[static_cast<std::size_t>(variable)];
      case Kind::kUnary:
        return -args[0]->eval(x);
      case Kind::kFunction:
        return function(args[0]->eval(x));
      case Kind::kBinary: {
        const double a = args[0]->eval(x);
        const double b = args[1]->eval(x);
        switch (op) {
          case '+': return a + b;
          case '-': return a - b;
          case '*': return a * b;
          case '/': return a / b;
          case '^': return std::pow(a, b);
          case '<': return a < b ? 1.0 : 0.0;
          case '>': return a > b ? 1.0 : 0.0;
          case 'l': return a <= b ? 1.0 : 0.0;
          case 'g': return a >= b ? 1.0 : 0.0;
          default: break;
        }
      }
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

double fn_exp(double v) { return std::exp(v); }
double fn_log(double v) { return std::log(v); }
double fn_sqrt(double v) { return std::sqrt(v); }
double fn_abs(double v) { return std::abs(v); }
double fn_sin(double v) { return std::sin(v); }
double fn_cos(double v) { return std::cos(v); }
double fn_tan(double v) { return std::tan(v); }
double fn_tanh(double v) { return std::tanh(v); }

class Parser {
 public:
  Parser(std::string_view text, int dimension)
      : text_(text), dimension_(dimension) {}

  NodePtr parse() {
    NodePtr root = comparison();
    skip_space();
    if (pos_ != text_.size()) error("unexpected '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::kParse, "expression '" + std::string(text_) + "' at " +
                                std::to_string(pos_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr binary(char op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::kBinary;
    n->op = op;
    n->args = {std::move(a), std::move(b)};
    return n;
  }

  NodePtr comparison() {
    NodePtr left = additive();
    skip_space();
    char op = 0;
    if (accept('<')) {
      op = accept('=') ? 'l' : '<';
    } else if (accept('>')) {
      op = accept('=') ? 'g' : '>';
    }
    if (op == 0) return left;
    return binary(op, std::move(left), additive());
  }

  NodePtr additive() {
    NodePtr left = term();
    while (true) {
      if (accept('+')) {
        left = binary('+', std::move(left), term());
      } else if (accept('-')) {
        left = binary('-', std::move(left), term());
      } else {
        return left;
      }
    }
  }

  NodePtr term() {
    NodePtr left = unary();
    while (true) {
      if (accept('*')) {
        left = binary('*', std::move(left), unary());
      } else if (accept('/')) {
        left = binary('/', std::move(left), unary());
      } else {
        return left;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::kUnary;
      n->args = {unary()};
      return n;
    }
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return binary('^', std::move(base), unary());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) error("unexpected end of expression");
    if (accept('(')) {
      NodePtr inner = comparison();
      if (!accept(')')) error("expected ')'");
      return inner;
    }
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    error("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::string rest(text_.substr(pos_));
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(rest, &used);
    } catch (const std::exception&) {
      error("malformed number");
    }
    pos_ += used;
    auto n = std::make_shared<Node>();
    n->value = value;
    return n;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isalnum(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));
    auto n = std::make_shared<Node>();
    if (name == "pi" || name == "e") {
      n->value = name == "pi" ? std::numbers::pi : std::numbers::e;
      return n;
    }
    if (name == "x" || (name.size() > 1 && name[0] == 'x' &&
                        std::all_of(name.begin() + 1, name.end(), [](char ch) {
                          return std::isdigit(static_cast<unsigned char>(ch));
                        }))) {
      const int index = name == "x" ? 1 : std::stoi(name.substr(1));
      if (index < 1 || index > dimension_) {
        error("variable " + name + " outside dimension " + std::to_string(dimension_));
      }
      n->kind = Node::Kind::kVariable;
      n->variable = index - 1;
      return n;
    }
    static const std::pair<const char*, double (*)(double)> kFunctions[] = {
        {"exp", fn_exp}, {"log", fn_log}, {"sqrt", fn_sqrt}, {"abs", fn_abs},
        {"sin", fn_sin}, {"cos", fn_cos}, {"tan", fn_tan},   {"tanh", fn_tanh},
    };
    for (const auto& [fname, fn] : kFunctions) {
      if (name == fname) {
        if (!accept('(')) error("expected '(' after " + name);
        n->kind = Node::Kind::kFunction;
        n->function = fn;
        n->args = {comparison()};
        if (!accept(')')) error("expected ')'");
        return n;
      }
    }
    error("unknown identifier '" + name + "'");
  }

  std::string_view text_;
  int dimension_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text, int dimension) {
  require(dimension >= 1, "expression dimension must be positive");
  Parser parser(text, dimension);
  return Expression(std::string(text), parser.parse());
}

double Expression::operator()(std::span<const double> x) const {
  return root_->eval(x);
}

}  // namespace wavesieve
