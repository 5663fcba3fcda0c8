#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "choquard/energy.hpp"
#include "choquard/riesz.hpp"

namespace choquard {

struct StepRule {
  enum class Kind { fixed, armijo };
  Kind kind = Kind::armijo;
  double step = 1.0;  ///< fixed step, or the initial trial step for Armijo
  double c = 1e-4;
  double shrink = 0.5;

  static StepRule fixed(double tau) { return {Kind::fixed, tau, 1e-4, 0.5}; }
  static StepRule armijo(double c = 1e-4, double shrink = 0.5, double initial = 1.0) {
    return {Kind::armijo, initial, c, shrink};
  }
  bool operator==(const StepRule&) const = default;
};

struct SolveOptions {
  std::size_t max_iters = 50000;
  double tol_grad = 1e-9;
  double tol_constraint = 1e-12;
  StepRule step_rule;
  std::uint64_t seed = 0;
  bool enforce_nonneg = true;

  /// Throws Error("options") on out-of-range values.
  void validate() const;
  bool operator==(const SolveOptions&) const = default;
};

enum class SolveStatus { converged, max_iterations, step_underflow };
std::string to_string(SolveStatus status);

struct SolveResult {
  Field u;                    ///< minimizer on the constraint set, >= 0 when enforce_nonneg
  double J = 0.0;             ///< Q(u)
  double mu = 0.0;            ///< Lagrange multiplier 2 Q(u)
  double mu_least_squares = 0.0;  ///< 2p <u, c>_A / <z, c>_A at the last iterate
  Field v;                    ///< mu^{1/(2p-2)} u, or u itself when p = 1
  bool rescaled = false;      ///< false for p = 1: v solves the multiplier form
  std::size_t iterations = 0;
  double grad_norm = 0.0;     ///< ||g||_A / ||u||_A of the tangent gradient
  double constraint = 0.0;    ///< constraint value at u
  bool converged = false;
  SolveStatus status = SolveStatus::max_iterations;
  std::vector<double> energy_history;  ///< Q after every accepted step, starting at u_0
};

/// Positive bump (Neumann) or sine (Dirichlet) profile with a seeded 10%
/// multiplicative perturbation, zero on fixed nodes, renormalized to D_alpha = 1.
Field initial_guess(const Problem& problem, const RieszKernel& kernel, std::uint64_t seed);
/// Same profile renormalized to \int |u|^{2p} = 1.
Field initial_guess_local(const Problem& problem, const GridPtr& grid, std::uint64_t seed);

/// sigma u with sigma = D_alpha(u)^{-1/(2p)}. Throws Error("zero-field").
Field renormalize(const Field& u, const RieszKernel& kernel, double p);
Field renormalize_local(const Field& u, double p);

/// Projected gradient descent on M_alpha = {D_alpha(u) = 1}.
///
/// Search directions are tangent gradients in the metric of Q itself (the
/// stiffness-plus-potential operator A): with c the Euclidean gradient of the
/// constraint and z = A^{-1} c, g = u - beta z, beta = <u,c>/<z,c>. The step
/// is u <- renormalize(|u - tau g|) with Armijo backtracking on Q.
SolveResult minimize_constrained(const Problem& problem, const RieszKernel& kernel, const SolveOptions& options,
                                 const Field* start = nullptr);

/// The same iteration on M_0 = {\int |u|^{2p} = 1}.
SolveResult solve_local(const Problem& problem, const GridPtr& grid, const SolveOptions& options,
                        const Field* start = nullptr);

/// mu = 2 Q(u). Throws Error("not-converged") for unconverged results.
double lagrange_multiplier(const SolveResult& result, const Problem& problem);

/// mu^{1/(2p-2)} u. Throws Error("no-rescaling") for p = 1.
Field rescale_to_solution(const Field& u, double mu, double p);

/// ||r||_{H^{-1}} / ||v||_{H^1} for the weak residual
///   r = A v - factor * (I_alpha * |v|^p) |v|^{p-2} v
/// restricted to the free nodes. factor = 1 for rescaled solutions, mu for
/// the p = 1 multiplier form. Zero for v = 0.
double pde_residual(const Field& v, const Problem& problem, const RieszKernel& kernel, double factor = 1.0);
/// Local analogue with nonlinearity factor * |v|^{2p-2} v.
double local_pde_residual(const Field& v, const Problem& problem, double factor = 1.0);

}  // namespace choquard
