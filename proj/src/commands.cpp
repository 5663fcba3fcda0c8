#include "choquard/commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>

#include "choquard/riesz_oracles.hpp"
#include "choquard/solution_io.hpp"
#include "format.hpp"

namespace choquard {

namespace {

std::ostream& out_of(const CommandEnv& env) { return env.out ? *env.out : std::cout; }

std::string fmt(const char* pattern, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, value);
  return buf;
}

constexpr double kClosedFormTolerance = 1e-8;
constexpr double kNewtonTolerance = 1e-6;
constexpr double kMonteCarloSigmas = 3.0;
constexpr std::size_t kClosedFormSamples = 50;

double relative(double x, double ref) { return std::abs(x - ref) / std::max(std::abs(ref), 1e-300); }

}  // namespace

std::string gamma_sweep_csv(const GammaSweep& sweep) {
  const auto num = detail::format_double;
  std::string s = "alpha,J_alpha,J0,h1_dist,mu_alpha\n";
  for (const auto& r : sweep.rows)
    s += num(r.alpha) + "," + num(r.J_alpha) + "," + num(r.J0) + "," + num(r.h1_distance) + "," + num(r.mu_alpha) + "\n";
  return s;
}

std::string pohozaev_csv(const PohozaevReport& r) {
  const auto num = detail::format_double;
  return "term,value\ngrad_term," + num(r.grad_term) + "\npotential_term," + num(r.potential_term) + "\ndrift_term," +
         num(r.drift_term) + "\nboundary_term," + num(r.boundary_term) + "\nresidual," + num(r.residual) + "\n";
}

int cmd_solve(const RunConfig& config, const CommandEnv& env) {
  std::ostream& os = out_of(env);
  const Problem problem = config.make_problem();
  const GridPtr grid = config.make_grid();
  const RieszKernel kernel = assemble_kernel(grid, problem.alpha, {KernelRoute::automatic, env.jobs});
  const SolveResult result = minimize_constrained(problem, kernel, config.solver);
  const double residual = pde_residual(result.v, problem, kernel, result.rescaled ? 1.0 : result.mu);

  const auto path = env.out_dir / config.output.solution;
  write_solution(make_solution_file(problem, config.solver, result), path);

  os << "J=" << detail::format_double(result.J) << " mu=" << detail::format_double(result.mu)
     << " iterations=" << result.iterations << " grad_norm=" << fmt("%.3e", result.grad_norm)
     << " residual=" << fmt("%.3e", residual) << " status=" << to_string(result.status) << "\n";
  if (!result.rescaled) os << "p = 1: v is the minimizer itself and solves the equation with factor mu\n";
  if (problem.domain.kind == DomainKind::exterior && result.converged) {
    try {
      const DecayFit fit = decay_fit(result.v);
      os << "decay exponent=" << fmt("%.4f", fit.exponent) << " (bound N/2-1=" << fmt("%g", fit.strauss_exponent)
         << ")\n";
    } catch (const Error& e) {
      os << "decay fit skipped: " << e.what() << "\n";
    }
  }
  os << "wrote " << path.string() << "\n";
  return result.converged ? exit_code::success : exit_code::not_converged;
}

int cmd_sweep_alpha(const RunConfig& config, const CommandEnv& env) {
  std::ostream& os = out_of(env);
  const Problem problem = config.make_problem();
  const GridPtr grid = config.make_grid();
  GammaSweep sweep;
  try {
    sweep = gamma_sweep(problem, grid, config.sweep.alphas, config.solver, {config.sweep.warm_start, env.jobs});
  } catch (const Error& e) {
    if (e.code() != "sweep-failed") throw;
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::not_converged;
  }
  const auto path = env.out_dir / "gamma_sweep.csv";
  write_atomic(path, gamma_sweep_csv(sweep));
  os << "J0=" << detail::format_double(sweep.local.J) << " mu0=" << detail::format_double(sweep.local.mu) << "\n";
  for (const auto& r : sweep.rows)
    os << "alpha=" << detail::format_double(r.alpha) << " |J_alpha-J0|=" << fmt("%.6e", std::abs(r.J_alpha - r.J0))
       << " h1_dist=" << fmt("%.6e", r.h1_distance) << "\n";
  os << "wrote " << path.string() << "\n";
  return exit_code::success;
}

int cmd_pohozaev(const std::filesystem::path& solution, const CommandEnv& env) {
  std::ostream& os = out_of(env);
  const SolutionFile file = read_solution(solution);
  const PohozaevReport report = pohozaev_residual(file.v, file.problem);
  const auto path = env.out_dir / "pohozaev.csv";
  write_atomic(path, pohozaev_csv(report));
  os << "residual=" << fmt("%.6e", report.residual) << " drift_term=" << detail::format_double(report.drift_term)
     << "\n";
  if (file.problem.domain.dimension >= 3) {
    const Classification c = classify_nonexistence(file.problem);
    os << "regime=" << to_string(c.regime) << " threshold=" << detail::format_double(c.threshold) << "\n";
    os << "note: " << c.note << "\n";
  } else {
    os << "regime=undefined (threshold needs N >= 3)\n";
  }
  os << "wrote " << path.string() << "\n";
  return exit_code::success;
}

int cmd_kernel_check(const RunConfig& config, const CommandEnv& env) {
  std::ostream& os = out_of(env);
  const Problem problem = config.make_problem();
  const GridPtr grid = config.make_grid();
  const int n = grid->dimension();
  const double alpha = problem.alpha;
  const RieszKernel kernel = assemble_kernel(grid, alpha, {KernelRoute::automatic, env.jobs});
  bool ok = true;
  auto report = [&](const std::string& name, double value, double tolerance, bool pass) {
    os << name << ": " << fmt("%.3e", value) << " (tolerance " << fmt("%g", tolerance) << ") "
       << (pass ? "ok" : "FAILED") << "\n";
    ok = ok && pass;
  };

  if (n == 3) {
    std::mt19937_64 rng(config.solver.seed);
    std::uniform_int_distribution<std::size_t> node(0, grid->size() - 1);
    std::uniform_int_distribution<std::size_t> cell(0, grid->cell_count() - 1);
    double worst = 0.0;
    for (std::size_t k = 0; k < kClosedFormSamples;) {
      const std::size_t i = node(rng);
      const std::size_t m = cell(rng);
      if (m == i || m + 1 == i) continue;
      const double r = grid->node(i), s0 = grid->node(m), s1 = grid->node(m + 1);
      const CellMoments ref = oracles::closed_form_cell_moments_3d(r, s0, s1, alpha);
      const CellMoments got = kernel_cell_moments(r, s0, s1, n, alpha, KernelRoute::angular);
      worst = std::max({worst, relative(got.left, ref.left), relative(got.right, ref.right)});
      ++k;
    }
    report("closed-form cell moments, max relative deviation", worst, kClosedFormTolerance,
           worst <= kClosedFormTolerance);
  }

  Field one(grid);
  for (double& x : one.values) x = 1.0;
  const Field conv = apply(kernel, one);

  if (n == 3 && alpha == 2.0 && problem.domain.kind == DomainKind::annulus) {
    double worst = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i) {
      const double ref = oracles::newton_shell_profile(grid->domain().inner_radius, grid->domain().outer_radius,
                                                       grid->node(i));
      worst = std::max(worst, relative(conv[i], ref));
    }
    report("Newton shell profile, max relative deviation", worst, kNewtonTolerance, worst <= kNewtonTolerance);
  }

  {
    const double a = grid->domain().inner_radius;
    const double b = grid->domain().outer_radius;
    const std::size_t radii = config.check.mc_radii;
    double worst = 0.0;
    for (std::size_t k = 0; k < radii; ++k) {
      const double r = a + (b - a) * (k + 1.0) / (radii + 1.0);
      const auto est = oracles::mc_oracle(one, alpha, r, config.check.mc_samples, config.solver.seed + k, env.jobs);
      const double z = std::abs(interpolate(conv, r) - est.mean) / est.standard_error;
      os << "  r=" << fmt("%.4f", r) << " kernel=" << fmt("%.8f", interpolate(conv, r))
         << " mc=" << fmt("%.8f", est.mean) << " se=" << fmt("%.2e", est.standard_error) << "\n";
      worst = std::max(worst, z);
    }
    report("Monte Carlo, max deviation in standard errors", worst, kMonteCarloSigmas, worst <= kMonteCarloSigmas);
  }

  {
    const auto rows = oracles::identity_limit_check(grid, one, config.sweep.alphas, {KernelRoute::automatic, env.jobs});
    for (const auto& row : rows)
      os << "  alpha=" << detail::format_double(row.alpha) << " sup|I*1-1|=" << fmt("%.6e", row.max_deviation)
         << "\n";
    const bool decreasing = oracles::strictly_decreasing(rows);
    os << "identity-limit table: " << (decreasing ? "strictly decreasing ok" : "not decreasing FAILED") << "\n";
    ok = ok && decreasing;
  }

  return ok ? exit_code::success : exit_code::oracle_failure;
}

}  // namespace choquard
