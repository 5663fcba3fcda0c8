#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "choquard/commands.hpp"
#include "choquard/solution_io.hpp"

using namespace choquard;

int main(int argc, char** argv) {
  CLI::App app{"Radial Choquard ground states on annuli and exterior domains"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 0;
  std::string out_dir;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Override solver.seed");
  app.add_option("--jobs", jobs, "Worker threads (0: all cores)");
  app.add_option("--out", out_dir, "Output directory (default: $CHOQUARD_OUT_DIR, then output.dir)");
  app.add_option("--set", overrides, "Override a key: section.key=value")->take_all();

  auto* solve = app.add_subcommand("solve", "Minimize on the constraint set and write the solution file");
  auto* sweep = app.add_subcommand("sweep-alpha", "Run the alpha -> 0 sweep and write gamma_sweep.csv");
  auto* pohozaev = app.add_subcommand("pohozaev", "Evaluate the Pohozaev identity for a Dirichlet solution file");
  auto* check = app.add_subcommand("kernel-check", "Compare the Riesz kernel against independent oracles");
  std::string solution_path;
  pohozaev->add_option("solution", solution_path, "Solution JSON (default: output.dir/output.solution)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_code::success : exit_code::usage;
  }

  try {
    if (seed) overrides.push_back("solver.seed=" + std::to_string(*seed));
    const std::string text = config_path.empty() ? std::string() : read_text(config_path);
    const ParsedConfig parsed = parse_config(text, overrides);
    for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << "\n";

    CommandEnv env;
    env.jobs = jobs;
    if (!out_dir.empty()) env.out_dir = out_dir;
    else if (const char* dir = std::getenv("CHOQUARD_OUT_DIR"); dir && *dir) env.out_dir = dir;
    else env.out_dir = parsed.config.output.dir;

    if (*solve) return cmd_solve(parsed.config, env);
    if (*sweep) return cmd_sweep_alpha(parsed.config, env);
    if (*pohozaev) {
      const std::filesystem::path path =
          solution_path.empty() ? env.out_dir / parsed.config.output.solution : std::filesystem::path(solution_path);
      return cmd_pohozaev(path, env);
    }
    if (*check) return cmd_kernel_check(parsed.config, env);
  } catch (const ConfigError& e) {
    for (const auto& m : e.messages()) std::cerr << "config error: " << m << "\n";
    return exit_code::usage;
  } catch (const Error& e) {
    std::cerr << "error (" << e.code() << "): " << e.what() << "\n";
    return exit_code::usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::usage;
  }
  return exit_code::usage;
}
