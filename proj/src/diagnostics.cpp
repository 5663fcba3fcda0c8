#include "choquard/diagnostics.hpp"

#include <cmath>
#include <optional>

#include "choquard/error.hpp"
#include "format.hpp"
#include "parallel.hpp"

namespace choquard {

double left_derivative(const Field& v) {
  const auto r = v.grid->nodes();
  const double h1 = r[1] - r[0];
  const double h2 = r[2] - r[1];
  return -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * v[0] + (h1 + h2) / (h1 * h2) * v[1] - h1 / (h2 * (h1 + h2)) * v[2];
}

double right_derivative(const Field& v) {
  const auto r = v.grid->nodes();
  const std::size_t n = v.size();
  const double h1 = r[n - 1] - r[n - 2];
  const double h2 = r[n - 2] - r[n - 3];
  return (2.0 * h1 + h2) / (h1 * (h1 + h2)) * v[n - 1] - (h1 + h2) / (h1 * h2) * v[n - 2] +
         h1 / (h2 * (h1 + h2)) * v[n - 3];
}

PohozaevReport pohozaev_residual(const Field& v, const Problem& problem) {
  if (problem.bc != BoundaryCondition::dirichlet)
    throw Error("dirichlet-only", "the Pohozaev identity needs v = 0 on the boundary (Dirichlet problems only)");
  if (!(v.grid->domain() == problem.domain)) throw std::invalid_argument("grid mismatch: field and problem domains differ");
  const RadialGrid& grid = *v.grid;
  const auto r = grid.nodes();
  const auto w = grid.weights();
  const auto mom = grid.cell_moments();
  const double omega = grid.sphere_measure();
  const double n = grid.dimension();
  const double alpha = problem.alpha;
  const double p = problem.p;

  double grad = 0.0;
  for (std::size_t m = 0; m + 1 < v.size(); ++m) {
    const double d = (v[m + 1] - v[m]) / (r[m + 1] - r[m]);
    grad += mom[m] * d * d;
  }
  double mass = 0.0;
  double drift = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    mass += w[i] * problem.potential(r[i]) * v[i] * v[i];
    if (!problem.potential.is_constant()) drift += w[i] * v[i] * v[i] * problem.potential.radial_derivative(r[i]);
  }

  PohozaevReport rep;
  // "+ 0.0" turns a negative zero into +0
  rep.grad_term = (2.0 - n + (alpha + n) / p) * omega * grad + 0.0;
  rep.potential_term = -(n - (alpha + n) / p) * omega * mass + 0.0;
  rep.drift_term = -omega * drift + 0.0;
  const double a = r.front();
  const double b = r.back();
  const double da = left_derivative(v);
  const double db = right_derivative(v);
  rep.boundary_term = omega * (std::pow(b, n) * db * db - std::pow(a, n) * da * da) + 0.0;
  rep.lhs = rep.grad_term + rep.potential_term + rep.drift_term;
  rep.scale = std::abs(rep.grad_term) + std::abs(rep.potential_term) + std::abs(rep.drift_term) +
              std::abs(rep.boundary_term);
  rep.residual = rep.scale > 0.0 ? std::abs(rep.lhs - rep.boundary_term) / rep.scale : 0.0;
  return rep;
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::subcritical_for_identity: return "SubcriticalForIdentity";
    case Regime::critical_threshold: return "CriticalThreshold";
    case Regime::supercritical_threshold: return "SupercriticalThreshold";
  }
  return "unknown";
}

Classification classify_nonexistence(const Problem& problem) {
  const int n = problem.domain.dimension;
  if (n < 3) throw Error("dimension", "the nonexistence threshold (N+alpha)/(N-2) needs N >= 3");
  Classification c;
  c.threshold = (n + problem.alpha) / (n - 2.0);
  const double gap = problem.p - c.threshold;
  if (std::abs(gap) <= 1e-12 * c.threshold) {
    c.regime = Regime::critical_threshold;
  } else {
    c.regime = gap > 0.0 ? Regime::supercritical_threshold : Regime::subcritical_for_identity;
  }
  c.note = "nonexistence for p >= (N+alpha)/(N-2) is stated for strictly star-shaped domains; annuli and "
           "exterior domains are not star-shaped, so this is the regime only";
  return c;
}

GammaSweep gamma_sweep(const Problem& problem, const GridPtr& grid, const std::vector<double>& alphas,
                       const SolveOptions& options, const GammaSweepOptions& sweep) {
  if (problem.domain.kind != DomainKind::annulus) throw Error("domain", "the alpha sweep runs on annuli only");
  if (alphas.empty()) throw Error("sweep-failed", "empty alpha list");
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    if (!(alphas[k] > 0.0 && alphas[k] < problem.domain.dimension))
      throw Error("alpha-range", "alpha must lie in (0,N); got alpha=" + detail::format_double(alphas[k]));
    if (k > 0 && !(alphas[k] < alphas[k - 1])) throw Error("sweep-failed", "alphas must be strictly decreasing");
  }

  GammaSweep out;
  out.local = solve_local(problem, grid, options);
  if (!out.local.converged) throw Error("sweep-failed", "local (M_0) solve did not converge");
  const double j0 = out.local.J;
  out.rows.resize(alphas.size());

  auto solve_row = [&](std::size_t k, const Field* start, unsigned jobs) {
    Problem pk = problem;
    pk.alpha = alphas[k];
    const RieszKernel kernel = assemble_kernel(grid, pk.alpha, {KernelRoute::automatic, jobs});
    SolveResult res = minimize_constrained(pk, kernel, options, start);
    if (!res.converged)
      throw Error("sweep-failed", "solve at alpha=" + detail::format_double(pk.alpha) + " ended with " +
                                      to_string(res.status));
    Field diff(grid);
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = std::abs(res.u[i]) - std::abs(out.local.u[i]);
    GammaSweepRow& row = out.rows[k];
    row.alpha = pk.alpha;
    row.J_alpha = res.J;
    row.J0 = j0;
    row.h1_distance = h1_norm(diff);
    row.mu_alpha = res.mu;
    row.iterations = res.iterations;
    return res.u;
  };

  if (sweep.warm_start) {
    std::optional<Field> previous;
    for (std::size_t k = 0; k < alphas.size(); ++k)
      previous = solve_row(k, previous ? &*previous : nullptr, sweep.jobs);
  } else {
    detail::parallel_for(alphas.size(), sweep.jobs, [&](std::size_t k) { solve_row(k, nullptr, 1); });
  }
  return out;
}

DecayFit decay_fit(const Field& v) {
  const RadialGrid& grid = *v.grid;
  if (grid.domain().kind != DomainKind::exterior) throw Error("domain", "decay_fit expects an exterior domain");
  const double a = grid.domain().inner_radius;
  const double big_r = grid.domain().outer_radius;
  const double start = 0.5 * (a + big_r);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  DecayFit fit;
  fit.strauss_exponent = 0.5 * grid.dimension() - 1.0;
  fit.r_begin = big_r;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double r = grid.node(i);
    if (r < start) continue;
    if (!(v[i] > 0.0) && !(v[i] < 0.0)) throw Error("sign/zero in window", "v vanishes in the fit window");
    if (fit.points > 0 && (v[i] > 0.0) != (v[i - 1] > 0.0))
      throw Error("sign/zero in window", "v changes sign in the fit window");
    const double x = std::log(r);
    const double y = std::log(std::abs(v[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    fit.r_begin = std::min(fit.r_begin, r);
    fit.r_end = r;
    ++fit.points;
  }
  if (fit.points < 2) throw Error("sign/zero in window", "fewer than two points in the fit window");
  const double m = static_cast<double>(fit.points);
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.exponent = -slope;
  fit.log_constant = (sy - slope * sx) / m;
  return fit;
}

}  // namespace choquard
