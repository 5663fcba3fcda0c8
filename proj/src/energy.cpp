#include "choquard/energy.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>

#include "choquard/error.hpp"
#include "format.hpp"

namespace choquard {

namespace {

void check_grid(const Field& u, const RadialGrid& grid) {
  if (!u.grid || u.grid->hash() != grid.hash() || u.size() != grid.size())
    throw std::invalid_argument("grid mismatch: field does not live on the problem grid");
}

void check_kernel(const Field& u, const RieszKernel& kernel) { check_grid(u, *kernel.grid()); }

double signed_power(double x, double e) {
  if (x == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(x), e), x);
}

std::vector<double> abs_power(const Field& u, double p) {
  std::vector<double> a(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) a[i] = std::pow(std::abs(u[i]), p);
  return a;
}

}  // namespace

std::string to_string(BoundaryCondition bc) { return bc == BoundaryCondition::neumann ? "neumann" : "dirichlet"; }

BoundaryCondition parse_boundary_condition(const std::string& text) {
  if (text == "neumann") return BoundaryCondition::neumann;
  if (text == "dirichlet") return BoundaryCondition::dirichlet;
  throw Error("bc", "bc must be 'neumann' or 'dirichlet', got '" + text + "'");
}

std::vector<std::string> Problem::validate(const RadialGrid* grid) const {
  try {
    domain.validate();
  } catch (const std::invalid_argument& e) {
    throw Error("domain", e.what());
  }
  const int n = domain.dimension;
  if (!(alpha > 0.0 && alpha < n) || !std::isfinite(alpha))
    throw Error("alpha-range", "alpha must lie in (0,N); got alpha=" + detail::format_double(alpha) +
                                   " with N=" + std::to_string(n));
  if (!(p >= 1.0) || !std::isfinite(p))
    throw Error("p-range", "p must be >= 1; got p=" + detail::format_double(p));

  std::vector<std::string> warnings;
  if (domain.kind == DomainKind::exterior) {
    const double threshold = (n + alpha) / n;
    if (!(p > threshold)) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "outside theorem range p > (N+alpha)/N ~ %.3f", threshold);
      warnings.emplace_back(buf);
    }
  }

  std::optional<double> floor = potential.declared_floor();
  if (grid) {
    double lowest = std::numeric_limits<double>::infinity();
    for (double r : grid->nodes()) {
      const double v = potential(r);
      if (!std::isfinite(v)) throw Error("potential", "V is not finite at r=" + detail::format_double(r));
      lowest = std::min(lowest, v);
    }
    if (floor && *floor > lowest)
      throw Error("potential", "declared inf V = " + detail::format_double(*floor) +
                                   " exceeds the smallest sampled value " + detail::format_double(lowest));
    if (!floor) floor = lowest;
  }
  if (floor) {
    if (bc == BoundaryCondition::neumann && !(*floor > 0.0))
      throw Error("potential-floor", "Neumann problems require inf V > 0; got " + detail::format_double(*floor));
    if (bc == BoundaryCondition::dirichlet) {
      if (n == 2 && !(*floor > 0.0))
        throw Error("potential-floor", "Dirichlet problems with N = 2 require inf V > 0");
      if (!(*floor >= 0.0)) throw Error("potential-floor", "Dirichlet problems require inf V >= 0");
    }
  }
  return warnings;
}

double Problem::potential_floor(const RadialGrid& grid) const {
  if (auto f = potential.declared_floor()) return *f;
  double lowest = std::numeric_limits<double>::infinity();
  for (double r : grid.nodes()) lowest = std::min(lowest, potential(r));
  return lowest;
}

FixedNodes fixed_nodes(const Problem& problem) {
  FixedNodes f;
  const bool dirichlet = problem.bc == BoundaryCondition::dirichlet;
  f.first = dirichlet;
  f.last = dirichlet || problem.domain.kind == DomainKind::exterior;
  return f;
}

void zero_fixed(std::span<double> values, FixedNodes fixed) {
  if (values.empty()) return;
  if (fixed.first) values.front() = 0.0;
  if (fixed.last) values.back() = 0.0;
}

QuadraticForm::QuadraticForm(const GridPtr& grid, const Problem& problem) {
  const std::size_t n = grid->size();
  const auto r = grid->nodes();
  const auto w = grid->weights();
  const auto mom = grid->cell_moments();
  const double omega = grid->sphere_measure();
  diag_.assign(n, 0.0);
  off_.assign(n - 1, 0.0);
  for (std::size_t m = 0; m + 1 < n; ++m) {
    const double h = r[m + 1] - r[m];
    const double k = omega * mom[m] / (h * h);
    diag_[m] += k;
    diag_[m + 1] += k;
    off_[m] = -k;
  }
  mass_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    mass_[i] = omega * w[i] * problem.potential(r[i]);
    diag_[i] += mass_[i];
  }
  fixed_ = fixed_nodes(problem);
}

QuadraticForm QuadraticForm::h1_gram(const GridPtr& grid, FixedNodes fixed) {
  Problem unit;
  unit.domain = grid->domain();
  unit.potential = Potential::constant(1.0);
  QuadraticForm a(grid, unit);
  a.fixed_ = fixed;
  return a;
}

void QuadraticForm::apply(std::span<const double> u, std::span<double> out) const {
  const std::size_t n = diag_.size();
  if (u.size() != n || out.size() != n) throw std::invalid_argument("size mismatch in QuadraticForm::apply");
  for (std::size_t i = 0; i < n; ++i) {
    double acc = diag_[i] * u[i];
    if (i > 0) acc += off_[i - 1] * u[i - 1];
    if (i + 1 < n) acc += off_[i] * u[i + 1];
    out[i] = acc;
  }
}

double QuadraticForm::bilinear(std::span<const double> u, std::span<const double> v) const {
  const std::size_t n = diag_.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = diag_[i] * v[i];
    if (i > 0) row += off_[i - 1] * v[i - 1];
    if (i + 1 < n) row += off_[i] * v[i + 1];
    acc += u[i] * row;
  }
  return acc;
}

// Sum of non-negative cell terms: no cancellation between the diagonal and
// the off-diagonal, so small energy changes stay visible.
double QuadraticForm::energy(std::span<const double> u) const {
  const std::size_t n = diag_.size();
  double acc = 0.0;
  for (std::size_t m = 0; m + 1 < n; ++m) {
    const double du = u[m + 1] - u[m];
    acc -= off_[m] * du * du;
  }
  for (std::size_t i = 0; i < n; ++i) acc += mass_[i] * u[i] * u[i];
  return 0.5 * acc;
}

void QuadraticForm::solve(std::span<const double> rhs, std::span<double> x) const {
  const std::size_t n = diag_.size();
  const std::size_t lo = fixed_.first ? 1 : 0;
  const std::size_t hi = fixed_.last ? n - 1 : n;  // free nodes [lo, hi)
  std::vector<double> c(n, 0.0);
  std::vector<double> d(n, 0.0);
  // Thomas algorithm on the free block
  for (std::size_t i = lo; i < hi; ++i) {
    const double a = i > lo ? off_[i - 1] : 0.0;
    const double denom = diag_[i] - (i > lo ? a * c[i - 1] : 0.0);
    c[i] = i + 1 < hi ? off_[i] / denom : 0.0;
    d[i] = (rhs[i] - (i > lo ? a * d[i - 1] : 0.0)) / denom;
  }
  for (std::size_t i = 0; i < n; ++i) x[i] = 0.0;
  for (std::size_t k = hi; k-- > lo;) x[k] = d[k] - (k + 1 < hi ? c[k] * x[k + 1] : 0.0);
}

double inner(const Field& a, const Field& b) {
  require_same_grid(a, b);
  const auto w = a.grid->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i] * b[i];
  return a.grid->sphere_measure() * s;
}

double Q(const Field& u, const Problem& problem) {
  check_grid(u, *u.grid);
  if (!(u.grid->domain() == problem.domain)) throw std::invalid_argument("grid mismatch: field and problem domains differ");
  return QuadraticForm(u.grid, problem).energy(u.values);
}

Field grad_Q(const Field& u, const Problem& problem) {
  if (!(u.grid->domain() == problem.domain)) throw std::invalid_argument("grid mismatch: field and problem domains differ");
  const QuadraticForm a(u.grid, problem);
  Field g(u.grid);
  a.apply(u.values, g.values);
  const auto w = u.grid->weights();
  const double omega = u.grid->sphere_measure();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] /= omega * w[i];
  zero_fixed(g.values, a.fixed());
  return g;
}

double D_alpha(const Field& u, const RieszKernel& kernel, double p) {
  check_kernel(u, kernel);
  const auto a = abs_power(u, p);
  std::vector<double> conv(a.size());
  kernel.apply(a, conv);
  const auto w = u.grid->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i] * conv[i];
  return u.grid->sphere_measure() * s;
}

Field grad_D(const Field& u, const RieszKernel& kernel, double p) {
  check_kernel(u, kernel);
  const auto a = abs_power(u, p);
  std::vector<double> conv(a.size());
  kernel.apply(a, conv);
  Field g(u.grid);
  for (std::size_t i = 0; i < a.size(); ++i) g[i] = 2.0 * p * conv[i] * signed_power(u[i], p - 1.0);
  return g;
}

double local_constraint(const Field& u, double p) {
  const auto w = u.grid->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * std::pow(std::abs(u[i]), 2.0 * p);
  return u.grid->sphere_measure() * s;
}

Field grad_local_constraint(const Field& u, double p) {
  Field g(u.grid);
  for (std::size_t i = 0; i < u.size(); ++i) g[i] = 2.0 * p * signed_power(u[i], 2.0 * p - 1.0);
  return g;
}

}  // namespace choquard
