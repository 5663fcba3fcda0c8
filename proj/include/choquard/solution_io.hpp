#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "choquard/energy.hpp"
#include "choquard/solver.hpp"

namespace choquard {

/// Contents of a solution JSON file:
///
///   {"meta": {"N", "alpha", "p", "bc", "domain": {"kind", "a", "b"}, "V",
///             "seed", "tolerances": {"tol_grad", "tol_constraint", "max_iters"},
///             "created"},
///    "grid": {"nodes"}, "u": {"values"}, "v": {"values"},
///    "J", "mu", "mu_least_squares", "iterations", "grad_norm", "constraint",
///    "rescaled", "status", "converged"}
///
/// "created" is the only field that differs between identical runs.
struct SolutionFile {
  Problem problem;
  std::uint64_t seed = 0;
  double tol_grad = 0.0;
  double tol_constraint = 0.0;
  std::size_t max_iters = 0;
  std::string created;
  Field u;
  Field v;
  double J = 0.0;
  double mu = 0.0;
  double mu_least_squares = 0.0;
  std::size_t iterations = 0;
  double grad_norm = 0.0;
  double constraint = 0.0;
  bool rescaled = false;
  std::string status;
  bool converged = false;
};

SolutionFile make_solution_file(const Problem& problem, const SolveOptions& options, const SolveResult& result);

std::string to_json(const SolutionFile& file);
/// Throws Error("solution-file") on malformed input.
SolutionFile solution_from_json(const std::string& text);

void write_solution(const SolutionFile& file, const std::filesystem::path& path);
SolutionFile read_solution(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace choquard
