#include "choquard/potential.hpp"

#include <charconv>
#include <cmath>

#include "choquard/error.hpp"
#include "format.hpp"

namespace choquard {

Potential Potential::constant(double value) {
  if (!std::isfinite(value)) throw Error("potential", "constant potential must be finite");
  Potential p;
  p.value_ = value;
  p.floor_ = value;
  return p;
}

Potential Potential::expression(const std::string& source) {
  Potential p;
  p.expr_.emplace(source);
  return p;
}

Potential Potential::parse(const std::string& spec) {
  const auto space = spec.find_first_of(" \t");
  const std::string head = spec.substr(0, space);
  std::string rest = space == std::string::npos ? "" : spec.substr(space + 1);
  rest.erase(0, rest.find_first_not_of(" \t"));
  rest.erase(rest.find_last_not_of(" \t") + 1);
  if (head == "const") {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
    if (ec != std::errc() || ptr != rest.data() + rest.size() || rest.empty())
      throw Error("potential", "V = const expects a number, got '" + rest + "'");
    return constant(v);
  }
  if (head == "expr") {
    if (rest.empty()) throw Error("potential", "V = expr expects an expression");
    return expression(rest);
  }
  throw Error("potential", "V must be 'const <value>' or 'expr <expression>', got '" + spec + "'");
}

double Potential::operator()(double r) const { return expr_ ? (*expr_)(r) : value_; }

double Potential::radial_derivative(double r) const { return expr_ ? r * expr_->derivative(r) : 0.0; }

Potential Potential::with_floor(double floor) const {
  Potential p = *this;
  p.floor_ = floor;
  return p;
}

std::string Potential::spec() const {
  if (expr_) return "expr " + expr_->source();
  return "const " + detail::format_double(value_);
}

}  // namespace choquard
