#include <doctest.h>

#include "choquard/diagnostics.hpp"
#include "choquard/error.hpp"
#include "support.hpp"

using namespace choquard;

namespace {

Problem problem(int n, double alpha, double p, BoundaryCondition bc) {
  Problem pr;
  pr.domain = RadialDomain::annulus(n, 1.0, 2.0);
  pr.alpha = alpha;
  pr.p = p;
  pr.bc = bc;
  return pr;
}

}  // namespace

TEST_CASE("Pohozaev report of the zero field") {
  const auto g = test::annulus_grid(3, 64);
  const auto rep = pohozaev_residual(test::constant(g, 0.0), problem(3, 1.0, 2.0, BoundaryCondition::dirichlet));
  CHECK(rep.grad_term == 0.0);
  CHECK(rep.potential_term == 0.0);
  CHECK(rep.drift_term == 0.0);
  CHECK(rep.boundary_term == 0.0);
  CHECK(rep.residual == 0.0);
}

TEST_CASE("Pohozaev needs Dirichlet data") {
  const auto g = test::annulus_grid(3, 64);
  try {
    pohozaev_residual(test::constant(g, 1.0), problem(3, 1.0, 2.0, BoundaryCondition::neumann));
    FAIL("expected dirichlet-only");
  } catch (const Error& e) {
    CHECK(e.code() == "dirichlet-only");
  }
}

TEST_CASE("boundary derivatives are exact for quadratics") {
  const auto g = build_grid(RadialDomain::annulus(3, 1.0, 2.0), 40, Grading::geometric(1.05));
  const Field f = sample(g, [](double r) { return r * r - 3.0 * r; });
  CHECK(left_derivative(f) == doctest::Approx(2.0 - 3.0).epsilon(1e-10));
  CHECK(right_derivative(f) == doctest::Approx(4.0 - 3.0).epsilon(1e-10));
}

TEST_CASE("Pohozaev residual of converged solutions shrinks with the mesh") {
  Problem pr = problem(3, 1.5, 2.0, BoundaryCondition::dirichlet);
  double last = 1.0;
  for (std::size_t n : {128, 256}) {
    const auto g = test::annulus_grid(3, n);
    const RieszKernel k = assemble_kernel(g, 1.5);
    const SolveResult r = minimize_constrained(pr, k, {});
    REQUIRE(r.converged);
    const auto rep = pohozaev_residual(r.v, pr);
    CHECK(rep.drift_term == 0.0);
    CHECK(rep.residual < last);
    last = rep.residual;
  }
  CHECK(last < 1e-3);
}

TEST_CASE("Pohozaev drift term for a radial potential") {
  const auto g = test::annulus_grid(3, 64);
  Problem pr = problem(3, 1.0, 2.0, BoundaryCondition::dirichlet);
  pr.potential = Potential::parse("expr r^2");
  const Field v = sample(g, [](double r) { return (r - 1.0) * (2.0 - r); });
  const auto rep = pohozaev_residual(v, pr);
  // -\int v^2 r V' dx = -\int 2 r^2 v^2 dx
  Field integrand = v;
  for (std::size_t i = 0; i < v.size(); ++i) integrand[i] = 2.0 * g->node(i) * g->node(i) * v[i] * v[i];
  CHECK(rep.drift_term == doctest::Approx(-integrate(integrand)).epsilon(1e-12));
  CHECK(rep.residual >= 0.0);
}

TEST_CASE("nonexistence threshold classification") {
  CHECK(classify_nonexistence(problem(3, 1.0, 4.0, BoundaryCondition::dirichlet)).regime == Regime::critical_threshold);
  CHECK(classify_nonexistence(problem(3, 1.0, 3.0, BoundaryCondition::dirichlet)).regime ==
        Regime::subcritical_for_identity);
  const auto c = classify_nonexistence(problem(4, 2.0, 3.5, BoundaryCondition::dirichlet));
  CHECK(c.regime == Regime::supercritical_threshold);
  CHECK(c.threshold == 3.0);
  CHECK(c.note.find("star-shaped") != std::string::npos);
  CHECK_THROWS_AS(classify_nonexistence(problem(2, 1.0, 3.0, BoundaryCondition::dirichlet)), Error);
  CHECK(to_string(Regime::critical_threshold) == "CriticalThreshold");
}

TEST_CASE("gamma sweep rows") {
  const auto g = test::annulus_grid(3, 128);
  const Problem pr = problem(3, 1.0, 2.0, BoundaryCondition::neumann);
  const GammaSweep s = gamma_sweep(pr, g, {0.4, 0.2, 0.1}, {});
  REQUIRE(s.rows.size() == 3);
  CHECK(s.rows[0].alpha == 0.4);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(s.rows[k].J0 == s.local.J);
    CHECK(s.rows[k].mu_alpha == doctest::Approx(2.0 * s.rows[k].J_alpha).epsilon(1e-12));
    if (k > 0) {
      CHECK(std::abs(s.rows[k].J_alpha - s.rows[k].J0) < std::abs(s.rows[k - 1].J_alpha - s.rows[k - 1].J0));
      CHECK(s.rows[k].h1_distance < s.rows[k - 1].h1_distance);
    }
  }
  // V = 1, Neumann: the local minimizer is the constant with J0 = vol^{1-1/p}/2
  CHECK(s.local.J == doctest::Approx(0.5 * std::sqrt(28.0 * std::numbers::pi / 3.0)).epsilon(1e-10));

  const GammaSweep single = gamma_sweep(pr, g, {0.3}, {}, {false, 2});
  CHECK(single.rows.size() == 1);
  const GammaSweep cold = gamma_sweep(pr, g, {0.4, 0.2, 0.1}, {}, {false, 2});
  for (std::size_t k = 0; k < 3; ++k) CHECK(test::rel(cold.rows[k].J_alpha, s.rows[k].J_alpha) < 1e-9);

  CHECK_THROWS_AS(gamma_sweep(pr, g, {0.1, 0.2}, {}), Error);
  SolveOptions tiny;
  tiny.max_iters = 1;
  try {
    gamma_sweep(pr, g, {0.4}, tiny);
    FAIL("expected sweep-failed");
  } catch (const Error& e) {
    CHECK(e.code() == "sweep-failed");
  }
}

TEST_CASE("decay fit") {
  const auto g = build_grid(RadialDomain::exterior(3, 1.0, 16.0), 256, Grading::geometric(1.01));
  Field v = sample(g, [](double r) { return 3.0 * std::pow(r, -2.0); });
  v[g->size() - 1] = 0.0;  // truncation node
  const DecayFit fit = decay_fit(v);
  CHECK(fit.exponent == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(fit.log_constant == doctest::Approx(std::log(3.0)).epsilon(1e-6));
  CHECK(fit.strauss_exponent == 0.5);
  CHECK(fit.r_begin >= 8.5);
  try {
    decay_fit(test::constant(g, 0.0));
    FAIL("expected a sign/zero error");
  } catch (const Error& e) {
    CHECK(e.code() == "sign/zero in window");
  }
  Field flip = v;
  flip[g->size() - 3] = -flip[g->size() - 3];
  CHECK_THROWS_AS(decay_fit(flip), Error);
}
