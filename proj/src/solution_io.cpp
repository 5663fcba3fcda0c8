#include "choquard/solution_io.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

#include "choquard/error.hpp"

namespace choquard {

using nlohmann::json;

SolutionFile make_solution_file(const Problem& problem, const SolveOptions& options, const SolveResult& result) {
  SolutionFile f;
  f.problem = problem;
  f.seed = options.seed;
  f.tol_grad = options.tol_grad;
  f.tol_constraint = options.tol_constraint;
  f.max_iters = options.max_iters;
  f.created = utc_timestamp();
  f.u = result.u;
  f.v = result.v;
  f.J = result.J;
  f.mu = result.mu;
  f.mu_least_squares = result.mu_least_squares;
  f.iterations = result.iterations;
  f.grad_norm = result.grad_norm;
  f.constraint = result.constraint;
  f.rescaled = result.rescaled;
  f.status = to_string(result.status);
  f.converged = result.converged;
  return f;
}

std::string to_json(const SolutionFile& f) {
  const RadialDomain& d = f.problem.domain;
  json j;
  j["meta"] = {
      {"N", d.dimension},
      {"alpha", f.problem.alpha},
      {"p", f.problem.p},
      {"bc", to_string(f.problem.bc)},
      {"domain",
       {{"kind", d.kind == DomainKind::exterior ? "exterior" : "annulus"}, {"a", d.inner_radius}, {"b", d.outer_radius}}},
      {"V", f.problem.potential.spec()},
      {"seed", f.seed},
      {"tolerances", {{"tol_grad", f.tol_grad}, {"tol_constraint", f.tol_constraint}, {"max_iters", f.max_iters}}},
      {"created", f.created},
  };
  if (auto floor = f.problem.potential.declared_floor(); floor && !f.problem.potential.is_constant())
    j["meta"]["V_floor"] = *floor;
  const auto nodes = f.u.grid->nodes();
  j["grid"]["nodes"] = std::vector<double>(nodes.begin(), nodes.end());
  j["u"]["values"] = f.u.values;
  j["v"]["values"] = f.v.values;
  j["J"] = f.J;
  j["mu"] = f.mu;
  j["mu_least_squares"] = f.mu_least_squares;
  j["iterations"] = f.iterations;
  j["grad_norm"] = f.grad_norm;
  j["constraint"] = f.constraint;
  j["rescaled"] = f.rescaled;
  j["status"] = f.status;
  j["converged"] = f.converged;
  return j.dump(1) + "\n";
}

SolutionFile solution_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    const json& m = j.at("meta");
    SolutionFile f;
    const json& dom = m.at("domain");
    const int n = m.at("N").get<int>();
    const double a = dom.at("a").get<double>();
    const double b = dom.at("b").get<double>();
    const std::string kind = dom.at("kind").get<std::string>();
    if (kind == "annulus") f.problem.domain = RadialDomain::annulus(n, a, b);
    else if (kind == "exterior") f.problem.domain = RadialDomain::exterior(n, a, b);
    else throw Error("solution-file", "unknown domain kind '" + kind + "'");
    f.problem.alpha = m.at("alpha").get<double>();
    f.problem.p = m.at("p").get<double>();
    f.problem.bc = parse_boundary_condition(m.at("bc").get<std::string>());
    f.problem.potential = Potential::parse(m.at("V").get<std::string>());
    if (m.contains("V_floor")) f.problem.potential = f.problem.potential.with_floor(m.at("V_floor").get<double>());
    f.seed = m.at("seed").get<std::uint64_t>();
    const json& tol = m.at("tolerances");
    f.tol_grad = tol.at("tol_grad").get<double>();
    f.tol_constraint = tol.at("tol_constraint").get<double>();
    f.max_iters = tol.at("max_iters").get<std::size_t>();
    f.created = m.value("created", "");

    const GridPtr grid = grid_from_nodes(f.problem.domain, j.at("grid").at("nodes").get<std::vector<double>>());
    f.u = Field(grid);
    f.v = Field(grid);
    f.u.values = j.at("u").at("values").get<std::vector<double>>();
    f.v.values = j.at("v").at("values").get<std::vector<double>>();
    if (f.u.size() != grid->size() || f.v.size() != grid->size())
      throw Error("solution-file", "value arrays do not match the node count");
    f.J = j.at("J").get<double>();
    f.mu = j.at("mu").get<double>();
    f.mu_least_squares = j.value("mu_least_squares", 0.0);
    f.iterations = j.at("iterations").get<std::size_t>();
    f.grad_norm = j.at("grad_norm").get<double>();
    f.constraint = j.value("constraint", 0.0);
    f.rescaled = j.value("rescaled", false);
    f.status = j.value("status", "");
    f.converged = j.at("converged").get<bool>();
    return f;
  } catch (const json::exception& e) {
    throw Error("solution-file", std::string("malformed solution file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw Error("solution-file", std::string("invalid solution file: ") + e.what());
  }
}

void write_solution(const SolutionFile& file, const std::filesystem::path& path) { write_atomic(path, to_json(file)); }

SolutionFile read_solution(const std::filesystem::path& path) { return solution_from_json(read_text(path)); }

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io", "cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw Error("io", "failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace choquard
