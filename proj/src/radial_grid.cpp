#include "choquard/radial_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>
#include <string>

namespace choquard {

RadialDomain RadialDomain::annulus(int dimension, double a, double b) {
  RadialDomain d{DomainKind::annulus, dimension, a, b};
  d.validate();
  return d;
}

RadialDomain RadialDomain::exterior(int dimension, double a, double truncation_radius) {
  RadialDomain d{DomainKind::exterior, dimension, a, truncation_radius};
  d.validate();
  return d;
}

void RadialDomain::validate() const {
  if (dimension < 2) throw std::invalid_argument("dimension N must be >= 2");
  if (!(inner_radius > 0.0) || !std::isfinite(inner_radius))
    throw std::invalid_argument("inner radius a must be positive");
  if (!(outer_radius > inner_radius) || !std::isfinite(outer_radius)) {
    throw std::invalid_argument(kind == DomainKind::annulus
                                    ? "annulus requires b > a"
                                    : "exterior domain requires truncation radius R > a");
  }
}

double RadialDomain::volume() const {
  const double n = dimension;
  return sphere_measure(dimension) *
         (std::pow(outer_radius, n) - std::pow(inner_radius, n)) / n;
}

double sphere_measure(int dimension) {
  const double half = 0.5 * dimension;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

HatMoments hat_moments(double r0, double r1, int dimension) {
  // r = r0 + h t; expand (r0 + h t)^{N-1} binomially. Every term is positive,
  // so there is no cancellation even for thin cells far from the origin.
  const double h = r1 - r0;
  const int m = dimension - 1;
  double left = 0.0;
  double right = 0.0;
  double binom = 1.0;
  for (int k = 0; k <= m; ++k) {
    const double term = binom * std::pow(r0, m - k) * std::pow(h, k);
    left += term / ((k + 1.0) * (k + 2.0));
    right += term / (k + 2.0);
    binom = binom * (m - k) / (k + 1.0);
  }
  return {h * left, h * right};
}

RadialGrid::RadialGrid(RadialDomain domain, std::vector<double> nodes)
    : domain_(domain), nodes_(std::move(nodes)), sphere_measure_(choquard::sphere_measure(domain.dimension)) {
  domain_.validate();
  if (nodes_.size() < 2) throw std::invalid_argument("grid needs at least two nodes");
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1]))
      throw std::invalid_argument("grid nodes must be strictly increasing");
  }
  if (nodes_.front() != domain_.inner_radius || nodes_.back() != domain_.outer_radius)
    throw std::invalid_argument("grid endpoints must coincide with the domain boundary");

  weights_.assign(nodes_.size(), 0.0);
  cell_moments_.resize(nodes_.size() - 1);
  for (std::size_t m = 0; m + 1 < nodes_.size(); ++m) {
    const HatMoments hm = hat_moments(nodes_[m], nodes_[m + 1], domain_.dimension);
    weights_[m] += hm.left;
    weights_[m + 1] += hm.right;
    cell_moments_[m] = hm.left + hm.right;
  }

  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  mix(&domain_.dimension, sizeof(domain_.dimension));
  mix(nodes_.data(), nodes_.size() * sizeof(double));
  hash_ = h;
}

GridPtr build_grid(const RadialDomain& domain, std::size_t n, Grading grading) {
  domain.validate();
  if (n < 16) throw std::invalid_argument("grid needs n >= 16 cells, got " + std::to_string(n));
  const double a = domain.inner_radius;
  const double b = domain.outer_radius;
  std::vector<double> nodes(n + 1);

  if (grading.kind == Grading::Kind::uniform) {
    for (std::size_t i = 0; i <= n; ++i) nodes[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
  } else {
    const double q = grading.ratio;
    if (!(q > 0.0) || !std::isfinite(q))
      throw std::invalid_argument("geometric grading ratio must be positive");
    // cell widths h_k = h_0 q^k, k = 0..n-1
    std::vector<double> widths(n);
    double total = 0.0;
    double w = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      widths[k] = w;
      total += w;
      w *= q;
    }
    double r = a;
    nodes[0] = a;
    for (std::size_t k = 0; k < n; ++k) {
      r += (b - a) * widths[k] / total;
      nodes[k + 1] = r;
    }
  }
  nodes.front() = a;
  nodes.back() = b;
  return std::make_shared<const RadialGrid>(domain, std::move(nodes));
}

GridPtr grid_from_nodes(const RadialDomain& domain, std::vector<double> nodes) {
  return std::make_shared<const RadialGrid>(domain, std::move(nodes));
}

Field::Field(GridPtr g) : grid(std::move(g)), values(grid ? grid->size() : 0, 0.0) {}

Field::Field(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (!grid) throw std::invalid_argument("field without grid");
  if (values.size() != grid->size())
    throw std::invalid_argument("field length does not match the grid node count");
  for (double x : values)
    if (!std::isfinite(x)) throw std::invalid_argument("field values must be finite");
}

void require_same_grid(const Field& a, const Field& b) {
  if (!a.grid || !b.grid) throw std::invalid_argument("field without grid");
  if (a.grid != b.grid && a.grid->hash() != b.grid->hash())
    throw std::invalid_argument("grid mismatch");
}

double integrate(const Field& f) {
  const auto w = f.grid->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f.values[i];
  return f.grid->sphere_measure() * s;
}

double h1_norm(const Field& f) {
  const auto& g = *f.grid;
  const auto r = g.nodes();
  const auto w = g.weights();
  const auto mom = g.cell_moments();
  double grad = 0.0;
  for (std::size_t m = 0; m + 1 < f.size(); ++m) {
    const double d = (f.values[m + 1] - f.values[m]) / (r[m + 1] - r[m]);
    grad += mom[m] * d * d;
  }
  double mass = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) mass += w[i] * f.values[i] * f.values[i];
  return std::sqrt(g.sphere_measure() * (grad + mass));
}

double lp_norm(const Field& f, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("lp_norm requires q >= 1");
  const auto w = f.grid->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * std::pow(std::abs(f.values[i]), q);
  return std::pow(f.grid->sphere_measure() * s, 1.0 / q);
}

double interpolate(const Field& f, double r) {
  const auto nodes = f.grid->nodes();
  if (r <= nodes.front()) return f.values.front();
  if (r >= nodes.back()) return f.values.back();
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
  const std::size_t j = static_cast<std::size_t>(it - nodes.begin());
  const double t = (r - nodes[j - 1]) / (nodes[j] - nodes[j - 1]);
  return (1.0 - t) * f.values[j - 1] + t * f.values[j];
}

Field interpolate(const Field& f, const GridPtr& target) {
  Field out(target);
  for (std::size_t i = 0; i < target->size(); ++i) out.values[i] = interpolate(f, target->node(i));
  return out;
}

}  // namespace choquard
