#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "choquard/radial_grid.hpp"

namespace test {

inline choquard::GridPtr annulus_grid(int n_dim, std::size_t cells, double a = 1.0, double b = 2.0) {
  return choquard::build_grid(choquard::RadialDomain::annulus(n_dim, a, b), cells, choquard::Grading::uniform());
}

inline choquard::Field constant(const choquard::GridPtr& g, double c) {
  return choquard::sample(g, [c](double) { return c; });
}

/// Smooth strictly positive field with seeded random coefficients.
inline choquard::Field random_positive(const choquard::GridPtr& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(0.2, 1.0);
  const double c0 = coef(rng), c1 = coef(rng), c2 = coef(rng), f1 = 1.0 + 3.0 * coef(rng);
  return choquard::sample(g, [&](double r) { return c0 + c1 * std::sin(f1 * r) * std::sin(f1 * r) + c2 * r; });
}

inline choquard::Field random_direction(const choquard::GridPtr& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const double c0 = coef(rng), c1 = coef(rng), c2 = coef(rng);
  return choquard::sample(g, [&](double r) { return c0 + c1 * std::cos(2.0 * r) + c2 * r * r; });
}

inline double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

}  // namespace test
