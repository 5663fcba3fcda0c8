#pragma once

#include <optional>
#include <string>

#include "choquard/expression.hpp"

namespace choquard {

/// Radial potential V(r), given either as a constant or as an expression in r.
///
/// Config spelling: "const <value>" or "expr <expression>".
class Potential {
 public:
  static Potential constant(double value);
  static Potential expression(const std::string& source);
  /// Parses the config spelling; throws Error("potential") otherwise.
  static Potential parse(const std::string& spec);

  double operator()(double r) const;
  /// r V'(r), i.e. grad V . x for radial V.
  double radial_derivative(double r) const;
  bool is_constant() const noexcept { return !expr_; }

  /// The stated inf V. Constants declare their value; expressions declare
  /// nothing unless a floor was attached.
  std::optional<double> declared_floor() const noexcept { return floor_; }
  Potential with_floor(double floor) const;

  /// Canonical config spelling ("const 1", "expr 1 + exp(-r)").
  std::string spec() const;

 private:
  double value_ = 1.0;
  std::optional<Expression> expr_;
  std::optional<double> floor_;
};

}  // namespace choquard
