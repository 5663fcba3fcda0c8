#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "choquard/config.hpp"
#include "choquard/error.hpp"

namespace choquard {

namespace exit_code {
inline constexpr int success = 0;
inline constexpr int usage = 1;
inline constexpr int not_converged = 2;
inline constexpr int oracle_failure = 3;
}  // namespace exit_code

struct CommandEnv {
  std::filesystem::path out_dir = ".";
  unsigned jobs = 0;
  std::ostream* out = nullptr;  ///< summary lines; std::cout when null
};

/// Solves, writes the solution file into out_dir and prints a summary.
int cmd_solve(const RunConfig& config, const CommandEnv& env);

/// Writes gamma_sweep.csv with header alpha,J_alpha,J0,h1_dist,mu_alpha.
int cmd_sweep_alpha(const RunConfig& config, const CommandEnv& env);

/// Writes pohozaev.csv (term,value) next to out_dir and prints the regime.
int cmd_pohozaev(const std::filesystem::path& solution, const CommandEnv& env);

/// Compares the assembled kernel against the independent oracles.
int cmd_kernel_check(const RunConfig& config, const CommandEnv& env);

std::string gamma_sweep_csv(const GammaSweep& sweep);
std::string pohozaev_csv(const PohozaevReport& report);

}  // namespace choquard
