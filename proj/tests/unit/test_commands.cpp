#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "choquard/commands.hpp"
#include "choquard/error.hpp"
#include "choquard/solution_io.hpp"

using namespace choquard;

namespace {

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

RunConfig config(const std::vector<std::string>& overrides) { return parse_config("", overrides).config; }

std::string without_created(std::string text) {
  const auto pos = text.find("\"created\"");
  const auto end = text.find('\n', pos);
  return text.erase(pos, end - pos);
}

}  // namespace

TEST_CASE("solve writes a reproducible solution file") {
  TempDir dir("choquard_cmd_solve");
  std::ostringstream out;
  CommandEnv env{dir.path, 1, &out};
  const RunConfig c = config({"grid.n=128", "problem.bc=dirichlet"});
  CHECK(cmd_solve(c, env) == exit_code::success);
  const std::string first = read_text(dir.path / "solution.json");
  CHECK(out.str().find("status=converged") != std::string::npos);
  CHECK(cmd_solve(c, env) == exit_code::success);
  CHECK(without_created(read_text(dir.path / "solution.json")) == without_created(first));

  const SolutionFile f = read_solution(dir.path / "solution.json");
  CHECK(f.v[0] == 0.0);
  CHECK(f.v[f.v.size() - 1] == 0.0);
  CHECK(std::abs(f.mu - 2.0 * f.J) <= 1e-8 * f.J);
}

TEST_CASE("non-convergence exits with 2 and still writes the file") {
  TempDir dir("choquard_cmd_fail");
  std::ostringstream out;
  CommandEnv env{dir.path, 1, &out};
  CHECK(cmd_solve(config({"grid.n=64", "solver.max_iters=1"}), env) == exit_code::not_converged);
  CHECK_FALSE(read_solution(dir.path / "solution.json").converged);
}

TEST_CASE("pohozaev on solution files") {
  TempDir dir("choquard_cmd_pohozaev");
  std::ostringstream out;
  CommandEnv env{dir.path, 1, &out};
  REQUIRE(cmd_solve(config({"grid.n=128", "problem.bc=dirichlet", "problem.p=4"}), env) == exit_code::success);
  CHECK(cmd_pohozaev(dir.path / "solution.json", env) == exit_code::success);
  CHECK(out.str().find("regime=CriticalThreshold") != std::string::npos);
  const std::string csv = read_text(dir.path / "pohozaev.csv");
  CHECK(csv.rfind("term,value\n", 0) == 0);
  CHECK(csv.find("drift_term,0\n") != std::string::npos);

  // zero field: every term vanishes
  SolutionFile zero = read_solution(dir.path / "solution.json");
  for (double& x : zero.v.values) x = 0.0;
  write_solution(zero, dir.path / "zero.json");
  CHECK(cmd_pohozaev(dir.path / "zero.json", env) == exit_code::success);
  CHECK(read_text(dir.path / "pohozaev.csv") ==
        "term,value\ngrad_term,0\npotential_term,0\ndrift_term,0\nboundary_term,0\nresidual,0\n");

  REQUIRE(cmd_solve(config({"grid.n=64"}), env) == exit_code::success);
  try {
    cmd_pohozaev(dir.path / "solution.json", env);
    FAIL("expected dirichlet-only");
  } catch (const Error& e) {
    CHECK(e.code() == "dirichlet-only");
  }
}

TEST_CASE("sweep-alpha writes the CSV in row order") {
  TempDir dir("choquard_cmd_sweep");
  std::ostringstream out;
  CommandEnv env{dir.path, 1, &out};
  CHECK(cmd_sweep_alpha(config({"grid.n=64", "sweep.alphas=0.3"}), env) == exit_code::success);
  std::istringstream csv(read_text(dir.path / "gamma_sweep.csv"));
  std::string header, row, extra;
  std::getline(csv, header);
  std::getline(csv, row);
  CHECK(header == "alpha,J_alpha,J0,h1_dist,mu_alpha");
  CHECK(row.rfind("0.3,", 0) == 0);
  CHECK_FALSE(std::getline(csv, extra));
  CHECK(cmd_sweep_alpha(config({"grid.n=64", "solver.max_iters=1"}), env) == exit_code::not_converged);
}

TEST_CASE("kernel-check passes on the default Newton configuration") {
  TempDir dir("choquard_cmd_check");
  std::ostringstream out;
  CommandEnv env{dir.path, 1, &out};
  CHECK(cmd_kernel_check(config({"problem.alpha=2", "grid.n=256", "check.mc_samples=200000"}), env) ==
        exit_code::success);
  CHECK(out.str().find("Newton shell profile") != std::string::npos);
  CHECK(out.str().find("strictly decreasing ok") != std::string::npos);
}
