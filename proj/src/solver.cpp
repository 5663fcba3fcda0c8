#include "choquard/solver.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "choquard/error.hpp"

namespace choquard {

namespace {

// Relative round-off allowance in the Armijo test. Near convergence the
// predicted decrease ||g||_A^2 drops below what Q can resolve.
constexpr double kEnergySlack = 1e-13;

double signed_power(double x, double e) {
  if (x == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(x), e), x);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// D(u) = omega sum_i w_i a_i (M a)_i with a = |u|^p; M = identity gives the
// local constraint \int |u|^{2p}.
class Constraint {
 public:
  Constraint(const GridPtr& grid, const RieszKernel* kernel, double p) : grid_(grid), kernel_(kernel), p_(p) {}

  struct State {
    double value = 0.0;
    std::vector<double> conv;  // M |u|^p
  };

  State evaluate(std::span<const double> u) const {
    const std::size_t n = u.size();
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = std::pow(std::abs(u[i]), p_);
    State s;
    if (kernel_) {
      s.conv.resize(n);
      kernel_->apply(a, s.conv);
    } else {
      s.conv = a;
    }
    const auto w = grid_->weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * a[i] * s.conv[i];
    s.value = grid_->sphere_measure() * acc;
    return s;
  }

  // Euclidean gradient dD/du_i = 2p omega w_i (M a)_i sign(u_i)|u_i|^{p-1}
  void gradient(std::span<const double> u, const State& s, std::span<double> c) const {
    const auto w = grid_->weights();
    const double omega = grid_->sphere_measure();
    for (std::size_t i = 0; i < u.size(); ++i) c[i] = 2.0 * p_ * omega * w[i] * s.conv[i] * signed_power(u[i], p_ - 1.0);
  }

  // Scales u onto the constraint set in place; s is updated accordingly.
  void normalize(std::span<double> u, State& s) const {
    if (!(s.value > 0.0) || !std::isfinite(s.value)) throw Error("zero-field", "cannot renormalize a zero field");
    const double sigma = std::pow(s.value, -1.0 / (2.0 * p_));
    const double sp = std::pow(sigma, p_);
    for (double& x : u) x *= sigma;
    for (double& x : s.conv) x *= sp;
    s.value *= std::pow(sigma, 2.0 * p_);
  }

  double p() const { return p_; }

 private:
  GridPtr grid_;
  const RieszKernel* kernel_;
  double p_;
};

Field profile(const Problem& problem, const GridPtr& grid, std::uint64_t seed) {
  const FixedNodes fixed = fixed_nodes(problem);
  const double a = grid->domain().inner_radius;
  const double b = grid->domain().outer_radius;
  const bool dirichlet = problem.bc == BoundaryCondition::dirichlet;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  Field u(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double r = grid->node(i);
    const double t = (r - a) / (b - a);
    double base = 0.0;
    if (problem.domain.kind == DomainKind::annulus) {
      base = dirichlet ? std::sin(std::numbers::pi * t) : 1.0 + 0.5 * std::sin(std::numbers::pi * t);
    } else {
      base = std::exp(-(r - a)) * (1.0 - t);
      if (dirichlet) base *= 1.0 - std::exp(-4.0 * (r - a));
    }
    u[i] = base * (1.0 + 0.1 * noise(rng));
  }
  zero_fixed(u.values, fixed);
  return u;
}

SolveResult run(const Problem& problem, const GridPtr& grid, const RieszKernel* kernel, const SolveOptions& options,
                const Field* start) {
  options.validate();
  problem.validate(grid.get());
  const double p = problem.p;
  const QuadraticForm A(grid, problem);
  const FixedNodes fixed = A.fixed();
  const Constraint constraint(grid, kernel, p);
  const std::size_t n = grid->size();

  Field u = start ? *start : profile(problem, grid, options.seed);
  if (!u.grid || u.grid->hash() != grid->hash()) throw std::invalid_argument("grid mismatch: start field");
  u.grid = grid;
  if (options.enforce_nonneg)
    for (double& x : u.values) x = std::abs(x);
  zero_fixed(u.values, fixed);
  Constraint::State state = constraint.evaluate(u.values);
  constraint.normalize(u.values, state);
  double q = A.energy(u.values);

  SolveResult result;
  result.energy_history.push_back(q);
  std::vector<double> c(n), z(n), g(n), trial(n);
  const StepRule& rule = options.step_rule;

  for (;;) {
    constraint.gradient(u.values, state, c);
    zero_fixed(c, fixed);
    A.solve(c, z);
    const double beta = dot(u.values, c) / dot(z, c);
    for (std::size_t i = 0; i < n; ++i) g[i] = u[i] - beta * z[i];
    zero_fixed(g, fixed);
    const double g_norm2 = 2.0 * A.energy(g);
    result.grad_norm = std::sqrt(g_norm2 / (2.0 * q));
    result.mu_least_squares = 2.0 * p * beta;
    if (result.grad_norm <= options.tol_grad) {
      result.status = SolveStatus::converged;
      break;
    }
    if (result.iterations >= options.max_iters) {
      result.status = SolveStatus::max_iterations;
      break;
    }

    double tau = rule.step;
    bool accepted = false;
    Constraint::State trial_state;
    double trial_q = 0.0;
    while (!accepted) {
      for (std::size_t i = 0; i < n; ++i) {
        const double x = u[i] - tau * g[i];
        trial[i] = options.enforce_nonneg ? std::abs(x) : x;
      }
      zero_fixed(trial, fixed);
      trial_state = constraint.evaluate(trial);
      if (trial_state.value > 0.0) {
        constraint.normalize(trial, trial_state);
        trial_q = A.energy(trial);
        accepted = rule.kind == StepRule::Kind::fixed ||
                   trial_q <= q - rule.c * tau * g_norm2 + kEnergySlack * std::abs(q);
      }
      if (!accepted) {
        if (rule.kind == StepRule::Kind::fixed) throw Error("zero-field", "fixed step produced a zero field");
        tau *= rule.shrink;
        if (tau < 1e-14 * rule.step) break;
      }
    }
    if (!accepted) {
      result.status = SolveStatus::step_underflow;
      break;
    }
    u.values.swap(trial);
    state = std::move(trial_state);
    q = trial_q;
    result.energy_history.push_back(q);
    ++result.iterations;
  }

  result.converged = result.status == SolveStatus::converged;
  result.constraint = constraint.evaluate(u.values).value;
  result.J = q;
  result.mu = 2.0 * q;
  result.u = u;
  if (p > 1.0) {
    result.v = rescale_to_solution(u, result.mu, p);
    result.rescaled = true;
  } else {
    result.v = u;
    result.rescaled = false;
  }
  return result;
}

}  // namespace

void SolveOptions::validate() const {
  auto bad = [](const std::string& what) { throw Error("options", what); };
  if (max_iters == 0) bad("max_iters must be positive");
  if (!(tol_grad > 0.0)) bad("tol_grad must be > 0");
  if (!(tol_constraint > 0.0)) bad("tol_constraint must be > 0");
  if (!(step_rule.step > 0.0) || !std::isfinite(step_rule.step)) bad("step must be > 0");
  if (!(step_rule.c > 0.0 && step_rule.c < 1.0)) bad("armijo_c must lie in (0,1)");
  if (!(step_rule.shrink > 0.0 && step_rule.shrink < 1.0)) bad("armijo_shrink must lie in (0,1)");
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::step_underflow: return "step_underflow";
  }
  return "unknown";
}

Field initial_guess(const Problem& problem, const RieszKernel& kernel, std::uint64_t seed) {
  return renormalize(profile(problem, kernel.grid(), seed), kernel, problem.p);
}

Field initial_guess_local(const Problem& problem, const GridPtr& grid, std::uint64_t seed) {
  return renormalize_local(profile(problem, grid, seed), problem.p);
}

Field renormalize(const Field& u, const RieszKernel& kernel, double p) {
  if (!u.grid || u.grid->hash() != kernel.grid()->hash()) throw std::invalid_argument("grid mismatch in renormalize");
  const Constraint constraint(u.grid, &kernel, p);
  Field out = u;
  auto state = constraint.evaluate(out.values);
  constraint.normalize(out.values, state);
  return out;
}

Field renormalize_local(const Field& u, double p) {
  const Constraint constraint(u.grid, nullptr, p);
  Field out = u;
  auto state = constraint.evaluate(out.values);
  constraint.normalize(out.values, state);
  return out;
}

SolveResult minimize_constrained(const Problem& problem, const RieszKernel& kernel, const SolveOptions& options,
                                 const Field* start) {
  if (kernel.alpha() != problem.alpha) throw std::invalid_argument("kernel alpha does not match the problem");
  if (!(kernel.grid()->domain() == problem.domain)) throw std::invalid_argument("kernel grid does not match the problem domain");
  return run(problem, kernel.grid(), &kernel, options, start);
}

SolveResult solve_local(const Problem& problem, const GridPtr& grid, const SolveOptions& options, const Field* start) {
  if (!(grid->domain() == problem.domain)) throw std::invalid_argument("grid does not match the problem domain");
  return run(problem, grid, nullptr, options, start);
}

double lagrange_multiplier(const SolveResult& result, const Problem& problem) {
  if (!result.converged) throw Error("not-converged", "lagrange multiplier requested for an unconverged result");
  return 2.0 * Q(result.u, problem);
}

Field rescale_to_solution(const Field& u, double mu, double p) {
  if (p == 1.0) throw Error("no-rescaling", "p = 1: the multiplier cannot be scaled out; report (u, mu)");
  if (!(p > 1.0)) throw std::invalid_argument("rescale_to_solution requires p > 1");
  if (!(mu > 0.0)) throw std::invalid_argument("rescale_to_solution requires mu > 0");
  const double s = std::pow(mu, 1.0 / (2.0 * p - 2.0));
  Field v = u;
  for (double& x : v.values) x *= s;
  return v;
}

namespace {

double residual_norm(const Field& v, const Problem& problem, const RieszKernel* kernel, double factor) {
  const GridPtr& grid = v.grid;
  const std::size_t n = grid->size();
  const QuadraticForm A(grid, problem);
  const FixedNodes fixed = A.fixed();
  const Constraint constraint(grid, kernel, problem.p);
  const auto state = constraint.evaluate(v.values);
  const auto w = grid->weights();
  const double omega = grid->sphere_measure();
  std::vector<double> r(n);
  A.apply(v.values, r);
  for (std::size_t i = 0; i < n; ++i)
    r[i] -= factor * omega * w[i] * state.conv[i] * signed_power(v[i], problem.p - 1.0);
  zero_fixed(r, fixed);
  const QuadraticForm H = QuadraticForm::h1_gram(grid, fixed);
  const double denom = H.bilinear(v.values, v.values);
  if (denom == 0.0) return 0.0;
  std::vector<double> y(n);
  H.solve(r, y);
  return std::sqrt(std::max(0.0, dot(r, y)) / denom);
}

}  // namespace

double pde_residual(const Field& v, const Problem& problem, const RieszKernel& kernel, double factor) {
  if (!v.grid || v.grid->hash() != kernel.grid()->hash()) throw std::invalid_argument("grid mismatch in pde_residual");
  return residual_norm(v, problem, &kernel, factor);
}

double local_pde_residual(const Field& v, const Problem& problem, double factor) {
  return residual_norm(v, problem, nullptr, factor);
}

}  // namespace choquard
