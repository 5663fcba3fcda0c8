#include <doctest.h>

#include "choquard/radial_grid.hpp"
#include "support.hpp"

using namespace choquard;
using std::numbers::pi;

TEST_CASE("uniform annulus grid has the requested endpoints") {
  const auto g = test::annulus_grid(3, 128);
  CHECK(g->size() == 129);
  CHECK(g->node(0) == 1.0);
  CHECK(g->node(128) == 2.0);
  CHECK(integrate(test::constant(g, 1.0)) == doctest::Approx(28.0 * pi / 3.0).epsilon(1e-12));
}

TEST_CASE("area of the planar annulus") {
  const auto g = test::annulus_grid(2, 128);
  CHECK(integrate(test::constant(g, 1.0)) == doctest::Approx(3.0 * pi).epsilon(1e-12));
}

TEST_CASE("too few cells are rejected") {
  CHECK_THROWS(build_grid(RadialDomain::annulus(3, 1, 2), 8, Grading::uniform()));
  CHECK_THROWS(RadialDomain::annulus(3, 2, 1).validate());
}

TEST_CASE("geometric grading grows cell widths by the ratio") {
  const auto g = build_grid(RadialDomain::exterior(3, 1.0, 16.0), 64, Grading::geometric(1.05));
  CHECK(g->node(0) == 1.0);
  CHECK(g->node(64) == 16.0);
  const double h0 = g->node(1) - g->node(0);
  const double h1 = g->node(2) - g->node(1);
  CHECK(h1 / h0 == doctest::Approx(1.05).epsilon(1e-10));
}

TEST_CASE("integrate") {
  const auto g = test::annulus_grid(3, 256);
  CHECK(integrate(test::constant(g, 0.0)) == 0.0);
  CHECK(integrate(test::constant(g, 2.5)) == doctest::Approx(2.5 * 28.0 * pi / 3.0).epsilon(1e-12));
  CHECK(integrate(sample(g, [](double r) { return r; })) == doctest::Approx(15.0 * pi).epsilon(1e-12));
}

TEST_CASE("volume consistency across dimensions and gradings") {
  for (int n : {2, 3, 4, 5}) {
    for (const Grading grading : {Grading::uniform(), Grading::geometric(1.02)}) {
      const auto g = build_grid(RadialDomain::annulus(n, 0.5, 3.0), 100, grading);
      double sum = 0.0;
      for (double w : g->weights()) sum += w;
      const double exact = sphere_measure(n) * (std::pow(3.0, n) - std::pow(0.5, n)) / n;
      CHECK(test::rel(g->sphere_measure() * sum, exact) < 1e-12);
    }
  }
}

TEST_CASE("linear monomials integrate exactly on any grid") {
  for (const Grading grading : {Grading::uniform(), Grading::geometric(1.03)}) {
    const auto g = build_grid(RadialDomain::annulus(3, 1.0, 2.0), 64, grading);
    for (int k : {0, 1}) {
      const double exact = 4.0 * pi * (std::pow(2.0, k + 3) - 1.0) / (k + 3);
      CHECK(test::rel(integrate(sample(g, [k](double r) { return std::pow(r, k); })), exact) < 1e-12);
    }
  }
}

TEST_CASE("refinement: integration error drops at second order") {
  auto err = [](std::size_t cells) {
    const auto g = test::annulus_grid(3, cells);
    const double exact = 4.0 * pi * (std::exp(2.0) * (4.0 - 4.0 + 2.0) - std::exp(1.0) * (1.0 - 2.0 + 2.0));
    return std::abs(integrate(sample(g, [](double r) { return std::exp(r); })) - exact);
  };
  const double e1 = err(64), e2 = err(128), e3 = err(256);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("h1_norm") {
  const auto g = test::annulus_grid(3, 1024);
  CHECK(h1_norm(test::constant(g, 0.0)) == 0.0);
  CHECK(h1_norm(test::constant(g, 3.0)) == doctest::Approx(3.0 * std::sqrt(28.0 * pi / 3.0)).epsilon(1e-12));
  CHECK(test::rel(h1_norm(sample(g, [](double r) { return r; })), std::sqrt(4.0 * pi * 128.0 / 15.0)) < 1e-6);
}

TEST_CASE("lp_norm") {
  const auto g = test::annulus_grid(3, 128);
  CHECK(lp_norm(test::constant(g, 1.0), 4.0) == doctest::Approx(std::pow(28.0 * pi / 3.0, 0.25)).epsilon(1e-12));
  CHECK(lp_norm(test::constant(g, 0.0), 2.0) == 0.0);
  CHECK_THROWS(lp_norm(test::constant(g, 1.0), 0.5));
}

TEST_CASE("norm homogeneity") {
  std::mt19937_64 rng(7);
  const auto g = test::annulus_grid(3, 200);
  const Field f = test::random_direction(g, rng);
  Field f2 = f;
  for (double& x : f2.values) x *= -2.0;
  CHECK(h1_norm(f2) == doctest::Approx(2.0 * h1_norm(f)).epsilon(1e-14));
  CHECK(lp_norm(f2, 3.0) == doctest::Approx(2.0 * lp_norm(f, 3.0)).epsilon(1e-14));
}

TEST_CASE("fields on different grids do not mix") {
  const auto g1 = test::annulus_grid(3, 64);
  const auto g2 = test::annulus_grid(3, 128);
  CHECK_THROWS(require_same_grid(test::constant(g1, 1.0), test::constant(g2, 1.0)));
}

TEST_CASE("interpolation is exact for linear functions") {
  const auto g = build_grid(RadialDomain::annulus(3, 1.0, 2.0), 40, Grading::geometric(1.03));
  const Field f = sample(g, [](double r) { return 3.0 * r - 1.0; });
  for (double r : {1.0, 1.123, 1.5, 1.99, 2.0}) CHECK(interpolate(f, r) == doctest::Approx(3.0 * r - 1.0));
  const auto fine = test::annulus_grid(3, 97);
  const Field h = interpolate(f, fine);
  for (std::size_t i = 0; i < fine->size(); ++i) CHECK(h[i] == doctest::Approx(3.0 * fine->node(i) - 1.0));
}

TEST_CASE("grid hash distinguishes node sets") {
  CHECK(test::annulus_grid(3, 64)->hash() == test::annulus_grid(3, 64)->hash());
  CHECK(test::annulus_grid(3, 64)->hash() != test::annulus_grid(3, 65)->hash());
  CHECK(test::annulus_grid(3, 64)->hash() != test::annulus_grid(2, 64)->hash());
}
