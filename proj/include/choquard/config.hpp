#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "choquard/diagnostics.hpp"
#include "choquard/energy.hpp"
#include "choquard/error.hpp"
#include "choquard/radial_grid.hpp"
#include "choquard/solver.hpp"

namespace choquard {

/// Run configuration, read from an INI-style file:
///
///   [problem]  N, alpha, p, bc, domain, a, b, V, V_floor
///   [grid]     n, grading, ratio, truncation_R
///   [solver]   max_iters, tol_grad, tol_constraint, step_rule, step,
///              armijo_c, armijo_shrink, seed, enforce_nonneg
///   [sweep]    alphas, warm_start
///   [check]    mc_samples, mc_radii
///   [output]   dir, solution
///
/// Lines are `key = value`; `#` and `;` start comments. See README.md for
/// defaults and the potential grammar.
struct RunConfig {
  struct ProblemBlock {
    int N = 3;
    double alpha = 1.0;
    double p = 2.0;
    BoundaryCondition bc = BoundaryCondition::neumann;
    DomainKind domain = DomainKind::annulus;
    double a = 1.0;
    double b = 2.0;
    std::string V = "const 1";
    std::optional<double> V_floor;
    bool operator==(const ProblemBlock&) const = default;
  } problem;

  struct GridBlock {
    std::size_t n = 512;
    Grading::Kind grading = Grading::Kind::uniform;
    double ratio = 1.0;
    std::optional<double> truncation_R;  ///< exterior only; 16 a when unset
    bool operator==(const GridBlock&) const = default;
  } grid;

  SolveOptions solver;

  struct SweepBlock {
    std::vector<double> alphas{0.4, 0.2, 0.1, 0.05};
    bool warm_start = true;
    bool operator==(const SweepBlock&) const = default;
  } sweep;

  struct CheckBlock {
    std::size_t mc_samples = 1000000;
    std::size_t mc_radii = 5;
    bool operator==(const CheckBlock&) const = default;
  } check;

  struct OutputBlock {
    std::string dir = ".";
    std::string solution = "solution.json";
    bool operator==(const OutputBlock&) const = default;
  } output;

  bool operator==(const RunConfig&) const = default;

  RadialDomain make_domain() const;
  Problem make_problem() const;
  GridPtr make_grid() const;
};

/// Thrown by parse_config; what() joins all located messages.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> messages);
  const std::vector<std::string>& messages() const noexcept { return messages_; }

 private:
  std::vector<std::string> messages_;
};

struct ParsedConfig {
  RunConfig config;
  std::vector<std::string> warnings;
};

/// Parses and validates. Each override is "section.key=value" and replaces
/// (or adds) that key. Errors are collected and thrown together as a
/// ConfigError, each prefixed with "line N:" or "--set section.key:".
ParsedConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

/// Canonical text form; parse_config(render_config(c)).config == c.
std::string render_config(const RunConfig& config);

}  // namespace choquard
