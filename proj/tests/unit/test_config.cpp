#include <doctest.h>

#include "choquard/config.hpp"

using namespace choquard;

namespace {

std::string first_message(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    parse_config(text, overrides);
  } catch (const ConfigError& e) {
    return e.messages().front();
  }
  return {};
}

}  // namespace

TEST_CASE("minimal config takes the defaults") {
  const ParsedConfig p = parse_config("[problem]\nN = 3\n");
  CHECK(p.warnings.empty());
  CHECK(p.config == RunConfig{});
  CHECK(parse_config("").config == RunConfig{});
}

TEST_CASE("comments, whitespace and sections") {
  const ParsedConfig p = parse_config(
      "# a comment\n"
      "[problem]\n"
      "  alpha = 0.5   \n"
      "; another\n"
      "bc=dirichlet\n"
      "V = expr 1 + exp(-r)\n"
      "[grid]\n"
      "n = 300\n"
      "grading = geometric\n"
      "ratio = 1.01\n"
      "[solver]\n"
      "seed = 18446744073709551615\n"
      "enforce_nonneg = false\n"
      "[sweep]\n"
      "alphas = 0.3, 0.2,0.1\n");
  const RunConfig& c = p.config;
  CHECK(c.problem.alpha == 0.5);
  CHECK(c.problem.bc == BoundaryCondition::dirichlet);
  CHECK(c.problem.V == "expr 1 + exp(-r)");
  CHECK(c.grid.n == 300);
  CHECK(c.grid.grading == Grading::Kind::geometric);
  CHECK(c.solver.seed == 18446744073709551615ull);
  CHECK_FALSE(c.solver.enforce_nonneg);
  CHECK(c.sweep.alphas == std::vector<double>{0.3, 0.2, 0.1});
}

TEST_CASE("exterior p below the existence range warns") {
  const ParsedConfig p = parse_config("[problem]\ndomain = exterior\nalpha = 1\np = 1.2\n");
  REQUIRE(p.warnings.size() == 1);
  CHECK(p.warnings[0].find("outside theorem range p > (N+alpha)/N") != std::string::npos);
  CHECK(p.warnings[0].find("1.333") != std::string::npos);
  CHECK(p.config.make_domain().outer_radius == 16.0);
}

TEST_CASE("located errors") {
  CHECK(first_message("[problem]\nN = 3\nalpha = 3.5\n").find("line 3") == 0);
  CHECK(first_message("[problem]\nalpha = 3.5\n").find("alpha must lie in (0,N)") != std::string::npos);
  CHECK(first_message("[problem]\nfoo = 1\n").find("unknown key 'problem.foo'") != std::string::npos);
  CHECK(first_message("[grid]\nn = many\n").find("line 2") == 0);
  CHECK(first_message("[grid]\nn = -4\n").find("integer") != std::string::npos);
  CHECK(first_message("[problem]\nalpha = 1\nalpha = 2\n").find("duplicate") != std::string::npos);
  CHECK(first_message("[problem\n").find("malformed section") != std::string::npos);
  CHECK(first_message("[problem]\njunk\n").find("expected key = value") != std::string::npos);
  CHECK(first_message("[problem]\nV = const 0\n").find("line 2") == 0);
  CHECK(first_message("[problem]\nV = expr 1 +\n").find("column") != std::string::npos);
  CHECK(first_message("[solver]\narmijo_shrink = 1.5\n").find("armijo_shrink") != std::string::npos);
  CHECK(first_message("[sweep]\nalphas = 0.1, 0.2\n").find("decreasing") != std::string::npos);
  CHECK(first_message("[grid]\ntruncation_R = 20\n").find("exterior domains only") != std::string::npos);
}

TEST_CASE("all errors are collected") {
  try {
    parse_config("[problem]\nfoo = 1\n[grid]\nn = x\n");
    FAIL("expected errors");
  } catch (const ConfigError& e) {
    CHECK(e.messages().size() == 2);
    CHECK(e.code() == "config");
  }
}

TEST_CASE("overrides replace file values") {
  const ParsedConfig p = parse_config("[problem]\nalpha = 0.5\n", {"problem.alpha=1.25", "solver.seed=9"});
  CHECK(p.config.problem.alpha == 1.25);
  CHECK(p.config.solver.seed == 9);
  CHECK(first_message("", {"problem.alpha=7"}).find("--set problem.alpha") == 0);
  CHECK(first_message("", {"nonsense"}).find("--set nonsense") == 0);
}

TEST_CASE("render round-trip") {
  RunConfig c;
  CHECK(parse_config(render_config(c)).config == c);

  c.problem.N = 4;
  c.problem.alpha = 0.1 + 0.2;  // not exactly representable in short decimal
  c.problem.p = 1.0 / 3.0 + 2.0;
  c.problem.bc = BoundaryCondition::dirichlet;
  c.problem.V = "expr 1 + r^2/3";
  c.problem.V_floor = 1.0;
  c.grid.n = 777;
  c.grid.grading = Grading::Kind::geometric;
  c.grid.ratio = 1.0123456789012345;
  c.solver.max_iters = 123;
  c.solver.tol_grad = 3.3e-11;
  c.solver.step_rule = StepRule::fixed(0.25);
  c.solver.seed = 42;
  c.solver.enforce_nonneg = false;
  c.sweep.alphas = {0.7, 0.3, 1e-3};
  c.sweep.warm_start = false;
  c.check.mc_samples = 12345;
  c.output.dir = "out dir";
  const std::string text = render_config(c);
  CHECK(parse_config(text).config == c);
  CHECK(render_config(parse_config(text).config) == text);

  RunConfig e;
  e.problem.domain = DomainKind::exterior;
  e.problem.p = 2.5;
  e.grid.truncation_R = 32.0;
  CHECK(parse_config(render_config(e)).config == e);
}
