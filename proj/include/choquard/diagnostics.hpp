#pragma once

#include <string>
#include <vector>

#include "choquard/energy.hpp"
#include "choquard/solver.hpp"

namespace choquard {

/// Terms of the Pohozaev identity for a Dirichlet solution v of
/// -Delta v + V v = (I_alpha * |v|^p)|v|^{p-2} v:
///
///   (2 - N + (N+alpha)/p) \int |v'|^2 - (N - (N+alpha)/p) \int V v^2
///     - \int v^2 r V'(r)  =  omega (b^N v'(b)^2 - a^N v'(a)^2).
struct PohozaevReport {
  double grad_term = 0.0;
  double potential_term = 0.0;
  double drift_term = 0.0;
  double boundary_term = 0.0;
  double lhs = 0.0;       ///< grad_term + potential_term + drift_term
  double scale = 0.0;     ///< sum of the absolute values of the four terms
  double residual = 0.0;  ///< |lhs - boundary_term| / scale, 0 when scale = 0
};

/// Throws Error("dirichlet-only") for Neumann problems.
PohozaevReport pohozaev_residual(const Field& v, const Problem& problem);

/// One-sided second-order difference quotients at the two ends.
double left_derivative(const Field& v);
double right_derivative(const Field& v);

enum class Regime { subcritical_for_identity, critical_threshold, supercritical_threshold };
std::string to_string(Regime regime);

struct Classification {
  Regime regime;
  double threshold;  ///< (N + alpha) / (N - 2)
  std::string note;
};

/// Position of p relative to (N+alpha)/(N-2). Throws Error("dimension") for N = 2.
Classification classify_nonexistence(const Problem& problem);

struct GammaSweepRow {
  double alpha = 0.0;
  double J_alpha = 0.0;
  double J0 = 0.0;
  double h1_distance = 0.0;  ///< ||u_alpha - u_0||_{H^1}, both non-negative
  double mu_alpha = 0.0;
  std::size_t iterations = 0;
};

struct GammaSweepOptions {
  bool warm_start = true;
  unsigned jobs = 0;  ///< kernel assembly, and rows when warm_start is off
};

struct GammaSweep {
  std::vector<GammaSweepRow> rows;
  SolveResult local;  ///< the M_0 minimizer u_0
};

/// Solves on M_alpha for each alpha (strictly decreasing) and once on M_0.
/// Inner non-convergence throws Error("sweep-failed") naming the alpha.
GammaSweep gamma_sweep(const Problem& problem, const GridPtr& grid, const std::vector<double>& alphas,
                       const SolveOptions& options, const GammaSweepOptions& sweep = {});

struct DecayFit {
  double exponent = 0.0;         ///< beta in |v| ~ C r^{-beta}
  double log_constant = 0.0;     ///< log C
  double strauss_exponent = 0.0; ///< N/2 - 1
  std::size_t points = 0;
  double r_begin = 0.0;
  double r_end = 0.0;
};

/// Least-squares slope of log|v| against log r over the outer half of the
/// grid, r in [(a+R)/2, R). The node at R is left out: it is pinned to zero.
/// Throws Error("sign/zero in window") if v changes sign or vanishes there.
DecayFit decay_fit(const Field& v);

}  // namespace choquard
