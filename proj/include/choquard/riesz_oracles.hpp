#pragma once

#include <cstdint>
#include <vector>

#include "choquard/radial_grid.hpp"
#include "choquard/riesz.hpp"

// Independent reference values for the Riesz discretization. Nothing in here
// calls the quadrature path of riesz.cpp.
namespace choquard::oracles {

/// (I_2 * chi_{A_{a,b}})(r) in R^3 by Newton's shell theorem:
///   (r^3 - a^3)/(3r) + (b^2 - r^2)/2.
double newton_shell_profile(double a, double b, double r);

/// Hat-weighted cell moments of the N = 3 kernel from the analytic
/// antiderivative (long double arithmetic). Same contract as
/// kernel_cell_moments for N = 3.
CellMoments closed_form_cell_moments_3d(double r, double s0, double s1, double alpha);

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

/// Direct N-dimensional Monte Carlo estimate of (I_alpha * chi_Omega f)(r e_1)
/// with f evaluated by linear interpolation of the field. Radii are drawn
/// with density ~ rho^{alpha-1} so the estimator is bounded. Samples are
/// generated in fixed blocks with per-block seeds; the result does not depend
/// on `jobs`.
MonteCarloEstimate mc_oracle(const Field& f, double alpha, double r, std::size_t samples, std::uint64_t seed,
                             unsigned jobs = 0);

struct IdentityLimitRow {
  double alpha = 0.0;
  double max_deviation = 0.0;  ///< max |I_alpha * f - f| over interior nodes
  double at_radius = 0.0;
};

/// Nodes at least a quarter of the radial extent away from the boundary.
std::vector<std::size_t> interior_nodes(const RadialGrid& grid);

/// Deviation of I_alpha * f from f along a decreasing list of orders.
std::vector<IdentityLimitRow> identity_limit_check(const GridPtr& grid, const Field& f,
                                                   const std::vector<double>& alphas,
                                                   const KernelAssemblyOptions& options = {});

bool strictly_decreasing(const std::vector<IdentityLimitRow>& rows);

struct ComparisonEstimate {
  double lhs = 0.0;       ///< \int (I_{alpha1} * |f|)|f|
  double rhs = 0.0;       ///< C \int (I_{alpha2} * |f|)|f|
  double constant = 0.0;  ///< C = (max{1, 2b})^{alpha1}
  bool holds() const { return lhs <= rhs; }
};

/// Order comparison for alpha1 > alpha2 on an annulus A_{a,b}.
ComparisonEstimate comparison_estimate(const RieszKernel& larger, const RieszKernel& smaller, const Field& f);

}  // namespace choquard::oracles
