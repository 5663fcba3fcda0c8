#include <doctest.h>

#include "choquard/error.hpp"
#include "choquard/solver.hpp"
#include "support.hpp"

using namespace choquard;
using std::numbers::pi;

namespace {

Problem annulus_problem(int n, double alpha, double p, BoundaryCondition bc) {
  Problem pr;
  pr.domain = RadialDomain::annulus(n, 1.0, 2.0);
  pr.alpha = alpha;
  pr.p = p;
  pr.bc = bc;
  return pr;
}

}  // namespace

TEST_CASE("initial guess is feasible and respects the boundary condition") {
  const auto g = test::annulus_grid(3, 128);
  const RieszKernel k = assemble_kernel(g, 1.0);
  const Problem pr = annulus_problem(3, 1.0, 2.0, BoundaryCondition::dirichlet);
  const Field u1 = initial_guess(pr, k, 1);
  const Field u2 = initial_guess(pr, k, 2);
  CHECK(std::abs(D_alpha(u1, k, 2.0) - 1.0) < 1e-12);
  CHECK(std::abs(D_alpha(u2, k, 2.0) - 1.0) < 1e-12);
  CHECK(u1[0] == 0.0);
  CHECK(u1[g->size() - 1] == 0.0);
  CHECK(u1.values != u2.values);
  CHECK(initial_guess(pr, k, 1).values == u1.values);
}

TEST_CASE("renormalize") {
  const auto g = test::annulus_grid(3, 64);
  const RieszKernel k = assemble_kernel(g, 1.0);
  std::mt19937_64 rng(1);
  const Field u = test::random_positive(g, rng);
  const Field n1 = renormalize(u, k, 2.0);
  CHECK(std::abs(D_alpha(n1, k, 2.0) - 1.0) < 1e-12);
  // D = 16 at p = 2 gives sigma = 1/2
  Field u16 = n1;
  for (double& x : u16.values) x *= 2.0;
  CHECK(D_alpha(u16, k, 2.0) == doctest::Approx(16.0));
  const Field back = renormalize(u16, k, 2.0);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(back[i] == doctest::Approx(n1[i]).epsilon(1e-14));
  const Field again = renormalize(n1, k, 2.0);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(again[i] == doctest::Approx(n1[i]).epsilon(1e-15));
  CHECK_THROWS_AS(renormalize(test::constant(g, 0.0), k, 2.0), Error);
}

TEST_CASE("rescale_to_solution") {
  const auto g = test::annulus_grid(3, 32);
  const Field u = test::constant(g, 0.3);
  CHECK(rescale_to_solution(u, 1.0, 2.0).values == u.values);
  const Field v = rescale_to_solution(u, 16.0, 2.0);
  for (double x : v.values) CHECK(x == doctest::Approx(4.0 * 0.3));
  CHECK_THROWS_AS(rescale_to_solution(u, 2.0, 1.0), Error);
}

TEST_CASE("solve options are validated") {
  SolveOptions o;
  CHECK_NOTHROW(o.validate());
  o.tol_grad = 0.0;
  CHECK_THROWS_AS(o.validate(), Error);
  o = {};
  o.step_rule.shrink = 1.0;
  CHECK_THROWS_AS(o.validate(), Error);
}

TEST_CASE("converged Neumann solve: feasibility, multiplier, stationarity, positivity") {
  const auto g = test::annulus_grid(3, 256);
  const RieszKernel k = assemble_kernel(g, 1.0);
  const Problem pr = annulus_problem(3, 1.0, 2.0, BoundaryCondition::neumann);
  SolveOptions o;
  o.seed = 1;
  const SolveResult r = minimize_constrained(pr, k, o);
  REQUIRE(r.converged);
  CHECK(std::abs(D_alpha(r.u, k, 2.0) - 1.0) < 1e-12);
  CHECK(test::rel(r.mu, 2.0 * r.J) < 1e-8);
  CHECK(test::rel(lagrange_multiplier(r, pr), 2.0 * r.J) < 1e-8);
  CHECK(test::rel(r.mu_least_squares, r.mu) < 1e-6);
  CHECK(r.grad_norm <= o.tol_grad);
  CHECK(pde_residual(r.v, pr, k) <= 10.0 * o.tol_grad);
  for (double x : r.u.values) CHECK(x > 0.0);
  for (std::size_t i = 1; i < r.energy_history.size(); ++i)
    CHECK(r.energy_history[i] <= r.energy_history[i - 1] * (1.0 + 1e-12));

  o.seed = 2;
  const SolveResult r2 = minimize_constrained(pr, k, o);
  CHECK(test::rel(r2.J, r.J) < 1e-6);
}

TEST_CASE("Dirichlet solve keeps the end values at zero") {
  const auto g = test::annulus_grid(3, 128);
  const RieszKernel k = assemble_kernel(g, 0.5);
  const Problem pr = annulus_problem(3, 0.5, 1.5, BoundaryCondition::dirichlet);
  const SolveResult r = minimize_constrained(pr, k, {});
  REQUIRE(r.converged);
  CHECK(r.u[0] == 0.0);
  CHECK(r.u[g->size() - 1] == 0.0);
  CHECK(r.v[0] == 0.0);
  for (std::size_t i = 1; i + 1 < g->size(); ++i) CHECK(r.u[i] > 0.0);
  CHECK(pde_residual(r.v, pr, k) <= 1e-8);
}

TEST_CASE("p = 1 reports the multiplier form") {
  const auto g = test::annulus_grid(3, 128);
  const RieszKernel k = assemble_kernel(g, 1.0);
  const Problem pr = annulus_problem(3, 1.0, 1.0, BoundaryCondition::neumann);
  const SolveResult r = minimize_constrained(pr, k, {});
  REQUIRE(r.converged);
  CHECK_FALSE(r.rescaled);
  CHECK(r.v.values == r.u.values);
  CHECK(pde_residual(r.v, pr, k, r.mu) <= 1e-8);
}

TEST_CASE("a fixed step that is too short stops at max_iters") {
  const auto g = test::annulus_grid(3, 64);
  const RieszKernel k = assemble_kernel(g, 1.0);
  const Problem pr = annulus_problem(3, 1.0, 2.0, BoundaryCondition::neumann);
  SolveOptions o;
  o.step_rule = StepRule::fixed(1e-3);
  o.max_iters = 5;
  const SolveResult r = minimize_constrained(pr, k, o);
  CHECK_FALSE(r.converged);
  CHECK(r.status == SolveStatus::max_iterations);
  CHECK(r.iterations == 5);
  CHECK(std::abs(r.constraint - 1.0) < 1e-12);
}

TEST_CASE("residuals of trivial and refined fields") {
  const auto g = test::annulus_grid(3, 64);
  const RieszKernel k = assemble_kernel(g, 1.0);
  const Problem pr = annulus_problem(3, 1.0, 2.0, BoundaryCondition::neumann);
  CHECK(pde_residual(test::constant(g, 0.0), pr, k) == 0.0);

  // coarse solution interpolated onto finer grids fits the equation better there
  const SolveResult coarse = minimize_constrained(pr, k, {});
  const auto g2 = test::annulus_grid(3, 128);
  const auto g4 = test::annulus_grid(3, 256);
  const RieszKernel k2 = assemble_kernel(g2, 1.0);
  const RieszKernel k4 = assemble_kernel(g4, 1.0);
  const SolveResult mid = minimize_constrained(pr, k2, {});
  const double r_coarse = pde_residual(interpolate(coarse.v, g4), pr, k4);
  const double r_mid = pde_residual(interpolate(mid.v, g4), pr, k4);
  CHECK(r_mid < r_coarse);
}

TEST_CASE("local solve: feasibility and the constant upper bound") {
  const auto g = test::annulus_grid(3, 256);
  const Problem pr = annulus_problem(3, 1.0, 2.0, BoundaryCondition::neumann);
  const SolveResult r = solve_local(pr, g, {});
  REQUIRE(r.converged);
  CHECK(std::abs(local_constraint(r.u, 2.0) - 1.0) < 1e-12);
  CHECK(test::rel(r.mu, 2.0 * r.J) < 1e-8);
  CHECK(local_pde_residual(r.v, pr) <= 1e-8);
  // with V = 1 the constant field c = vol^{-1/(2p)} is feasible: Q = vol^{1-1/p} / 2
  const double vol = 28.0 * pi / 3.0;
  CHECK(r.J <= 0.5 * std::pow(vol, 0.5) * (1.0 + 1e-12));
}

TEST_CASE("exterior solve decays and vanishes at the truncation radius") {
  Problem pr;
  pr.domain = RadialDomain::exterior(3, 1.0, 16.0);
  pr.alpha = 1.0;
  pr.p = 2.5;
  const auto g = build_grid(pr.domain, 256, Grading::geometric(1.01));
  const RieszKernel k = assemble_kernel(g, 1.0);
  const SolveResult r = minimize_constrained(pr, k, {});
  REQUIRE(r.converged);
  CHECK(r.u[g->size() - 1] == 0.0);
  CHECK(r.u[0] > r.u[g->size() / 2]);
}

TEST_CASE("mismatched kernel and problem are rejected") {
  const auto g = test::annulus_grid(3, 32);
  const RieszKernel k = assemble_kernel(g, 1.0);
  Problem pr = annulus_problem(3, 1.5, 2.0, BoundaryCondition::neumann);
  CHECK_THROWS(minimize_constrained(pr, k, {}));
}
