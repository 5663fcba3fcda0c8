#pragma once

#include <memory>
#include <string>

namespace choquard {

/// Radial expression in the variable r.
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?          right associative
///   primary := number | 'r' | 'pi' | func '(' expr ')' | '(' expr ')'
///   func    := 'exp' | 'log' | 'sqrt'
///
/// Numbers use the C locale ("1.5", "2e-3"). Whitespace is ignored.
/// Parse errors throw Error("expression") naming the 1-based column.
class Expression {
 public:
  explicit Expression(const std::string& source);

  double operator()(double r) const;
  /// d/dr of the expression, by forward-mode differentiation.
  double derivative(double r) const;
  /// True if the expression does not mention r.
  bool is_constant() const;

  const std::string& source() const noexcept { return source_; }

  struct Node;

 private:
  std::string source_;
  std::shared_ptr<const Node> root_;
};

}  // namespace choquard
