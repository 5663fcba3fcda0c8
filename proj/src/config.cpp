#include "choquard/config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "format.hpp"

namespace choquard {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

struct Entry {
  std::string value;
  std::string origin;  // "line 12" or "--set grid.n"
};

// Conversion failures are reported as plain strings and located by the caller.
struct BadValue {
  std::string message;
};

double to_double(const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw BadValue{"expected a number, got '" + v + "'"};
  return out;
}

template <class Int>
Int to_integer(const std::string& v) {
  Int out = 0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw BadValue{"expected a non-negative integer, got '" + v + "'"};
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw BadValue{"expected true or false, got '" + v + "'"};
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
  if (out.empty()) throw BadValue{"expected a comma-separated list of numbers"};
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"problem.N", [](RunConfig& c, const std::string& v) { c.problem.N = to_integer<int>(v); }},
      {"problem.alpha", [](RunConfig& c, const std::string& v) { c.problem.alpha = to_double(v); }},
      {"problem.p", [](RunConfig& c, const std::string& v) { c.problem.p = to_double(v); }},
      {"problem.bc",
       [](RunConfig& c, const std::string& v) {
         try {
           c.problem.bc = parse_boundary_condition(v);
         } catch (const Error& e) {
           throw BadValue{e.what()};
         }
       }},
      {"problem.domain",
       [](RunConfig& c, const std::string& v) {
         if (v == "annulus") c.problem.domain = DomainKind::annulus;
         else if (v == "exterior") c.problem.domain = DomainKind::exterior;
         else throw BadValue{"domain must be 'annulus' or 'exterior', got '" + v + "'"};
       }},
      {"problem.a", [](RunConfig& c, const std::string& v) { c.problem.a = to_double(v); }},
      {"problem.b", [](RunConfig& c, const std::string& v) { c.problem.b = to_double(v); }},
      {"problem.V",
       [](RunConfig& c, const std::string& v) {
         try {
           (void)Potential::parse(v);
         } catch (const Error& e) {
           throw BadValue{e.what()};
         }
         c.problem.V = v;
       }},
      {"problem.V_floor", [](RunConfig& c, const std::string& v) { c.problem.V_floor = to_double(v); }},
      {"grid.n", [](RunConfig& c, const std::string& v) { c.grid.n = to_integer<std::size_t>(v); }},
      {"grid.grading",
       [](RunConfig& c, const std::string& v) {
         if (v == "uniform") c.grid.grading = Grading::Kind::uniform;
         else if (v == "geometric") c.grid.grading = Grading::Kind::geometric;
         else throw BadValue{"grading must be 'uniform' or 'geometric', got '" + v + "'"};
       }},
      {"grid.ratio", [](RunConfig& c, const std::string& v) { c.grid.ratio = to_double(v); }},
      {"grid.truncation_R", [](RunConfig& c, const std::string& v) { c.grid.truncation_R = to_double(v); }},
      {"solver.max_iters", [](RunConfig& c, const std::string& v) { c.solver.max_iters = to_integer<std::size_t>(v); }},
      {"solver.tol_grad", [](RunConfig& c, const std::string& v) { c.solver.tol_grad = to_double(v); }},
      {"solver.tol_constraint", [](RunConfig& c, const std::string& v) { c.solver.tol_constraint = to_double(v); }},
      {"solver.step_rule",
       [](RunConfig& c, const std::string& v) {
         if (v == "armijo") c.solver.step_rule.kind = StepRule::Kind::armijo;
         else if (v == "fixed") c.solver.step_rule.kind = StepRule::Kind::fixed;
         else throw BadValue{"step_rule must be 'armijo' or 'fixed', got '" + v + "'"};
       }},
      {"solver.step", [](RunConfig& c, const std::string& v) { c.solver.step_rule.step = to_double(v); }},
      {"solver.armijo_c", [](RunConfig& c, const std::string& v) { c.solver.step_rule.c = to_double(v); }},
      {"solver.armijo_shrink", [](RunConfig& c, const std::string& v) { c.solver.step_rule.shrink = to_double(v); }},
      {"solver.seed", [](RunConfig& c, const std::string& v) { c.solver.seed = to_integer<std::uint64_t>(v); }},
      {"solver.enforce_nonneg", [](RunConfig& c, const std::string& v) { c.solver.enforce_nonneg = to_bool(v); }},
      {"sweep.alphas", [](RunConfig& c, const std::string& v) { c.sweep.alphas = to_list(v); }},
      {"sweep.warm_start", [](RunConfig& c, const std::string& v) { c.sweep.warm_start = to_bool(v); }},
      {"check.mc_samples", [](RunConfig& c, const std::string& v) { c.check.mc_samples = to_integer<std::size_t>(v); }},
      {"check.mc_radii", [](RunConfig& c, const std::string& v) { c.check.mc_radii = to_integer<std::size_t>(v); }},
      {"output.dir", [](RunConfig& c, const std::string& v) { c.output.dir = v; }},
      {"output.solution", [](RunConfig& c, const std::string& v) { c.output.solution = v; }},
  };
  return table;
}

// Key blamed for a semantic error code.
std::string key_for(const std::string& code) {
  if (code == "alpha-range") return "problem.alpha";
  if (code == "p-range") return "problem.p";
  if (code == "bc") return "problem.bc";
  if (code == "potential" || code == "potential-floor") return "problem.V";
  if (code == "domain") return "problem.a";
  return {};
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> messages)
    : Error("config",
            [&] {
              std::string joined;
              for (const auto& m : messages) joined += (joined.empty() ? "" : "\n") + m;
              return joined;
            }()),
      messages_(std::move(messages)) {}

RadialDomain RunConfig::make_domain() const {
  if (problem.domain == DomainKind::exterior)
    return RadialDomain::exterior(problem.N, problem.a, grid.truncation_R.value_or(16.0 * problem.a));
  return RadialDomain::annulus(problem.N, problem.a, problem.b);
}

Problem RunConfig::make_problem() const {
  Problem pr;
  pr.domain = make_domain();
  pr.bc = problem.bc;
  pr.potential = Potential::parse(problem.V);
  if (problem.V_floor) pr.potential = pr.potential.with_floor(*problem.V_floor);
  pr.p = problem.p;
  pr.alpha = problem.alpha;
  return pr;
}

GridPtr RunConfig::make_grid() const {
  const Grading g = grid.grading == Grading::Kind::geometric ? Grading::geometric(grid.ratio) : Grading::uniform();
  return build_grid(make_domain(), grid.n, g);
}

ParsedConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  std::vector<std::string> errors;
  std::map<std::string, Entry> entries;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  for (std::size_t line_no = 1; std::getline(in, raw); ++line_no) {
    const std::string where = "line " + std::to_string(line_no);
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back(where + ": malformed section header '" + line + "'");
        continue;
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where + ": expected key = value");
      continue;
    }
    const std::string key = section + "." + trim(std::string_view(line).substr(0, eq));
    if (!setters().count(key)) {
      errors.push_back(where + ": unknown key '" + key + "'");
      continue;
    }
    if (entries.count(key)) {
      errors.push_back(where + ": duplicate key '" + key + "' (first at " + entries[key].origin + ")");
      continue;
    }
    entries[key] = {trim(std::string_view(line).substr(eq + 1)), where};
  }

  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const std::string key = trim(o.substr(0, eq));
    if (eq == std::string::npos || !setters().count(key)) {
      errors.push_back("--set " + o + ": expected section.key=value with a known key");
      continue;
    }
    entries[key] = {trim(std::string_view(o).substr(eq + 1)), "--set " + key};
  }

  ParsedConfig out;
  for (const auto& [key, entry] : entries) {
    try {
      setters().at(key)(out.config, entry.value);
    } catch (const BadValue& e) {
      errors.push_back(entry.origin + ": " + key + ": " + e.message);
    }
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));

  auto locate = [&](const std::string& key) {
    const auto it = entries.find(key);
    return it == entries.end() ? std::string("default ") + key : it->second.origin + ": " + key;
  };

  const RunConfig& c = out.config;
  if (c.problem.domain == DomainKind::exterior && entries.count("problem.b"))
    errors.push_back(locate("problem.b") + ": exterior domains take grid.truncation_R instead of b");
  if (c.problem.domain == DomainKind::annulus && c.grid.truncation_R)
    errors.push_back(locate("grid.truncation_R") + ": truncation_R applies to exterior domains only");
  if (c.problem.domain == DomainKind::exterior && !(c.grid.truncation_R.value_or(16.0 * c.problem.a) > c.problem.a))
    errors.push_back(locate("grid.truncation_R") + ": truncation radius must exceed a");
  if (c.grid.n < 16) errors.push_back(locate("grid.n") + ": n must be at least 16");
  if (c.grid.grading == Grading::Kind::geometric && !(c.grid.ratio > 0.0))
    errors.push_back(locate("grid.ratio") + ": ratio must be > 0");
  if (c.check.mc_radii == 0) errors.push_back(locate("check.mc_radii") + ": must be positive");
  if (c.check.mc_samples == 0) errors.push_back(locate("check.mc_samples") + ": must be positive");
  for (std::size_t k = 1; k < c.sweep.alphas.size(); ++k)
    if (!(c.sweep.alphas[k] < c.sweep.alphas[k - 1])) {
      errors.push_back(locate("sweep.alphas") + ": alphas must be strictly decreasing");
      break;
    }
  for (double a : c.sweep.alphas)
    if (!(a > 0.0 && a < c.problem.N)) {
      errors.push_back(locate("sweep.alphas") + ": alpha must lie in (0,N); got " + detail::format_double(a));
      break;
    }
  try {
    c.solver.validate();
  } catch (const Error& e) {
    errors.push_back("solver: " + std::string(e.what()));
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));

  try {
    const Problem pr = c.make_problem();
    out.warnings = pr.validate(c.make_grid().get());
  } catch (const Error& e) {
    const std::string key = key_for(e.code());
    errors.push_back((key.empty() ? std::string("problem") : locate(key)) + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    errors.push_back(locate("problem.domain") + ": " + e.what());
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return out;
}

std::string render_config(const RunConfig& c) {
  const auto num = detail::format_double;
  std::ostringstream os;
  os << "[problem]\n";
  os << "N = " << c.problem.N << "\n";
  os << "alpha = " << num(c.problem.alpha) << "\n";
  os << "p = " << num(c.problem.p) << "\n";
  os << "bc = " << to_string(c.problem.bc) << "\n";
  os << "domain = " << (c.problem.domain == DomainKind::exterior ? "exterior" : "annulus") << "\n";
  os << "a = " << num(c.problem.a) << "\n";
  if (c.problem.domain == DomainKind::annulus) os << "b = " << num(c.problem.b) << "\n";
  os << "V = " << c.problem.V << "\n";
  if (c.problem.V_floor) os << "V_floor = " << num(*c.problem.V_floor) << "\n";
  os << "\n[grid]\n";
  os << "n = " << c.grid.n << "\n";
  os << "grading = " << (c.grid.grading == Grading::Kind::geometric ? "geometric" : "uniform") << "\n";
  os << "ratio = " << num(c.grid.ratio) << "\n";
  if (c.grid.truncation_R) os << "truncation_R = " << num(*c.grid.truncation_R) << "\n";
  os << "\n[solver]\n";
  os << "max_iters = " << c.solver.max_iters << "\n";
  os << "tol_grad = " << num(c.solver.tol_grad) << "\n";
  os << "tol_constraint = " << num(c.solver.tol_constraint) << "\n";
  os << "step_rule = " << (c.solver.step_rule.kind == StepRule::Kind::fixed ? "fixed" : "armijo") << "\n";
  os << "step = " << num(c.solver.step_rule.step) << "\n";
  os << "armijo_c = " << num(c.solver.step_rule.c) << "\n";
  os << "armijo_shrink = " << num(c.solver.step_rule.shrink) << "\n";
  os << "seed = " << c.solver.seed << "\n";
  os << "enforce_nonneg = " << (c.solver.enforce_nonneg ? "true" : "false") << "\n";
  os << "\n[sweep]\n";
  os << "alphas = ";
  for (std::size_t k = 0; k < c.sweep.alphas.size(); ++k) os << (k ? ", " : "") << num(c.sweep.alphas[k]);
  os << "\n";
  os << "warm_start = " << (c.sweep.warm_start ? "true" : "false") << "\n";
  os << "\n[check]\n";
  os << "mc_samples = " << c.check.mc_samples << "\n";
  os << "mc_radii = " << c.check.mc_radii << "\n";
  os << "\n[output]\n";
  os << "dir = " << c.output.dir << "\n";
  os << "solution = " << c.output.solution << "\n";
  return os.str();
}

}  // namespace choquard
