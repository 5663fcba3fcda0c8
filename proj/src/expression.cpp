#include "choquard/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

#include "choquard/error.hpp"

namespace choquard {

namespace {

struct Dual {
  double v;
  double d;
};

Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }

Dual power(Dual a, Dual b) {
  const double v = std::pow(a.v, b.v);
  double d = 0.0;
  if (a.d != 0.0) d += b.v * std::pow(a.v, b.v - 1.0) * a.d;
  if (b.d != 0.0) d += v * std::log(a.v) * b.d;
  return {v, d};
}

}  // namespace

struct Expression::Node {
  enum class Kind { number, variable, add, sub, mul, div, pow, neg, exp, log, sqrt };
  Kind kind;
  double value = 0.0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;

  Dual eval(Dual r) const {
    switch (kind) {
      case Kind::number: return {value, 0.0};
      case Kind::variable: return r;
      case Kind::add: return lhs->eval(r) + rhs->eval(r);
      case Kind::sub: return lhs->eval(r) - rhs->eval(r);
      case Kind::mul: return lhs->eval(r) * rhs->eval(r);
      case Kind::div: return lhs->eval(r) / rhs->eval(r);
      case Kind::pow: return power(lhs->eval(r), rhs->eval(r));
      case Kind::neg: {
        const Dual a = lhs->eval(r);
        return {-a.v, -a.d};
      }
      case Kind::exp: {
        const Dual a = lhs->eval(r);
        const double e = std::exp(a.v);
        return {e, e * a.d};
      }
      case Kind::log: {
        const Dual a = lhs->eval(r);
        return {std::log(a.v), a.d / a.v};
      }
      case Kind::sqrt: {
        const Dual a = lhs->eval(r);
        const double s = std::sqrt(a.v);
        return {s, a.d / (2.0 * s)};
      }
    }
    return {0.0, 0.0};
  }

  bool uses_variable() const {
    if (kind == Kind::variable) return true;
    return (lhs && lhs->uses_variable()) || (rhs && rhs->uses_variable());
  }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::number;
  n->value = v;
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error("expression", "bad expression '" + text_ + "': " + what + " at column " + std::to_string(pos_ + 1));
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

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Node::Kind::add, lhs, term());
      } else if (accept('-')) {
        lhs = make(Node::Kind::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Node::Kind::mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make(Node::Kind::div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Kind::neg, unary());
    return pow_expr();
  }

  NodePtr pow_expr() {
    NodePtr base = primary();
    if (accept('^')) return make(Node::Kind::pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      const char* first = text_.data() + pos_;
      const auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), v);
      if (ec != std::errc()) fail("bad number");
      pos_ += static_cast<std::size_t>(ptr - first);
      return number(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string name = text_.substr(start, pos_ - start);
      if (name == "r") return make(Node::Kind::variable);
      if (name == "pi") return number(std::numbers::pi);
      Node::Kind kind;
      if (name == "exp") {
        kind = Node::Kind::exp;
      } else if (name == "log") {
        kind = Node::Kind::log;
      } else if (name == "sqrt") {
        kind = Node::Kind::sqrt;
      } else {
        pos_ = start;
        fail("unknown name '" + name + "'");
      }
      expect('(');
      NodePtr arg = expr();
      expect(')');
      return make(kind, arg);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(const std::string& source) : source_(source), root_(Parser(source_).parse()) {}

double Expression::operator()(double r) const { return root_->eval({r, 0.0}).v; }

double Expression::derivative(double r) const { return root_->eval({r, 1.0}).d; }

bool Expression::is_constant() const { return !root_->uses_variable(); }

}  // namespace choquard
