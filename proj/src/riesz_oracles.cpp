#include "choquard/riesz_oracles.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "parallel.hpp"

namespace choquard::oracles {

namespace {

using LD = long double;
using Poly = std::array<LD, 3>;  // c0 + c1 x + c2 x^2

// \int_0^x poly(t) t^beta dt for beta > -1
LD power_primitive(const Poly& c, LD x, LD beta) {
  if (x == 0) return 0;
  LD sum = 0;
  for (int k = 0; k < 3; ++k) sum += c[k] * std::pow(x, k + beta + 1) / (k + beta + 1);
  return sum;
}

// \int poly(t) log(t) dt, vanishing at t = 0
LD log_primitive(const Poly& c, LD x) {
  if (x == 0) return 0;
  LD sum = 0;
  for (int k = 0; k < 3; ++k) {
    const LD e = k + 1;
    sum += c[k] * std::pow(x, e) * (std::log(x) / e - 1 / (e * e));
  }
  return sum;
}

// \int_{s0}^{s1} (A s + B s^2) K(s) ds where K is (r+s)^beta or |r-s|^beta
// (beta != 0) or their logarithms (beta == 0). s0 < s1, no straddling of r.
LD plus_part(LD r, LD s0, LD s1, LD A, LD B, LD beta, bool log_form) {
  const Poly c{B * r * r - A * r, A - 2 * B * r, B};
  auto G = [&](LD u) { return log_form ? log_primitive(c, u) : power_primitive(c, u, beta); };
  return G(r + s1) - G(r + s0);
}

LD minus_part(LD r, LD s0, LD s1, LD A, LD B, LD beta, bool log_form) {
  if (s0 >= r) {
    const Poly c{A * r + B * r * r, A + 2 * B * r, B};
    auto G = [&](LD v) { return log_form ? log_primitive(c, v) : power_primitive(c, v, beta); };
    return G(s1 - r) - G(s0 - r);
  }
  const Poly c{A * r + B * r * r, -A - 2 * B * r, B};
  auto G = [&](LD v) { return log_form ? log_primitive(c, v) : power_primitive(c, v, beta); };
  return G(r - s0) - G(r - s1);
}

LD hat_moment(LD r, LD s0, LD s1, LD A, LD B, double alpha) {
  const LD beta = static_cast<LD>(alpha) - 1;
  const bool log_form = alpha == 1.0;
  auto piece = [&](LD lo, LD hi) {
    const LD diff = plus_part(r, lo, hi, A, B, beta, log_form) - minus_part(r, lo, hi, A, B, beta, log_form);
    return log_form ? diff : diff / beta;
  };
  if (s0 < r && r < s1) return piece(s0, r) + piece(r, s1);
  return piece(s0, s1);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double newton_shell_profile(double a, double b, double r) {
  return (r * r * r - a * a * a) / (3.0 * r) + 0.5 * (b * b - r * r);
}

CellMoments closed_form_cell_moments_3d(double r, double s0, double s1, double alpha) {
  if (!(s1 > s0) || !(s0 > 0.0) || !(r > 0.0)) throw std::invalid_argument("invalid cell");
  const LD pi = std::numbers::pi_v<long double>;
  const LD a = alpha;
  // 2 pi C_{3,alpha}
  const LD constant = std::tgamma((3 - a) / 2) / (std::tgamma(a / 2) * std::pow(pi, 1.5L) * std::pow(2.0L, a));
  const LD prefactor = 2 * pi * constant / static_cast<LD>(r);
  const LD h = static_cast<LD>(s1) - s0;
  CellMoments out;
  out.left = static_cast<double>(prefactor * hat_moment(r, s0, s1, s1 / h, -1 / h, alpha));
  out.right = static_cast<double>(prefactor * hat_moment(r, s0, s1, -s0 / h, 1 / h, alpha));
  return out;
}

MonteCarloEstimate mc_oracle(const Field& f, double alpha, double r, std::size_t samples, std::uint64_t seed,
                             unsigned jobs) {
  const RadialDomain& dom = f.grid->domain();
  const int dimension = dom.dimension;
  const double constant = riesz_constant(dimension, alpha);
  const double a = dom.inner_radius;
  const double b = dom.outer_radius;
  const double rho_max = r + b;
  const double scale = constant * sphere_measure(dimension) * std::pow(rho_max, alpha) / alpha;

  constexpr std::size_t kBlock = 1 << 16;
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<double> sum(blocks, 0.0);
  std::vector<double> sum_sq(blocks, 0.0);

  detail::parallel_for(blocks, jobs, [&](std::size_t blk) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(blk)));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t count = std::min(kBlock, samples - blk * kBlock);
    std::vector<double> dir(static_cast<std::size_t>(dimension));
    double s = 0.0;
    double s2 = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      // 1 - U lies in (0, 1], avoiding rho = 0
      const double rho = rho_max * std::pow(1.0 - uniform(rng), 1.0 / alpha);
      double norm2 = 0.0;
      for (auto& x : dir) {
        x = normal(rng);
        norm2 += x * x;
      }
      const double inv = 1.0 / std::sqrt(norm2);
      double y2 = 0.0;
      for (int c = 0; c < dimension; ++c) {
        const double yc = (c == 0 ? r : 0.0) + rho * dir[static_cast<std::size_t>(c)] * inv;
        y2 += yc * yc;
      }
      const double y = std::sqrt(y2);
      double value = 0.0;
      if (y >= a && y <= b) value = scale * interpolate(f, y);
      s += value;
      s2 += value * value;
    }
    sum[blk] = s;
    sum_sq[blk] = s2;
  });

  double s = 0.0;
  double s2 = 0.0;
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    s += sum[blk];
    s2 += sum_sq[blk];
  }
  const double n = static_cast<double>(samples);
  const double mean = s / n;
  const double var = std::max(0.0, s2 / n - mean * mean) * n / (n - 1.0);
  return {mean, std::sqrt(var / n), samples};
}

std::vector<std::size_t> interior_nodes(const RadialGrid& grid) {
  const double a = grid.domain().inner_radius;
  const double b = grid.domain().outer_radius;
  const double margin = 0.25 * (b - a);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.node(i);
    if (r - a >= margin && b - r >= margin) out.push_back(i);
  }
  return out;
}

std::vector<IdentityLimitRow> identity_limit_check(const GridPtr& grid, const Field& f,
                                                   const std::vector<double>& alphas,
                                                   const KernelAssemblyOptions& options) {
  for (std::size_t k = 1; k < alphas.size(); ++k)
    if (!(alphas[k] < alphas[k - 1])) throw std::invalid_argument("alphas must be strictly decreasing");
  const auto interior = interior_nodes(*grid);
  std::vector<IdentityLimitRow> rows;
  for (double alpha : alphas) {
    const RieszKernel kernel = assemble_kernel(grid, alpha, options);
    const Field conv = apply(kernel, f);
    IdentityLimitRow row{alpha, 0.0, grid->node(interior.empty() ? 0 : interior.front())};
    for (std::size_t i : interior) {
      const double dev = std::abs(conv[i] - f[i]);
      if (dev > row.max_deviation) {
        row.max_deviation = dev;
        row.at_radius = grid->node(i);
      }
    }
    rows.push_back(row);
  }
  return rows;
}

bool strictly_decreasing(const std::vector<IdentityLimitRow>& rows) {
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (!(rows[k].max_deviation < rows[k - 1].max_deviation)) return false;
  return true;
}

ComparisonEstimate comparison_estimate(const RieszKernel& larger, const RieszKernel& smaller, const Field& f) {
  if (!(larger.alpha() > smaller.alpha()))
    throw std::invalid_argument("comparison_estimate expects alpha1 > alpha2");
  Field abs_f(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) abs_f[i] = std::abs(f[i]);
  const Field c1 = apply(larger, abs_f);
  const Field c2 = apply(smaller, abs_f);
  const auto w = f.grid->weights();
  double lhs = 0.0;
  double rhs = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    lhs += w[i] * abs_f[i] * c1[i];
    rhs += w[i] * abs_f[i] * c2[i];
  }
  const double omega = f.grid->sphere_measure();
  const double b = f.grid->domain().outer_radius;
  ComparisonEstimate out;
  out.constant = std::pow(std::max(1.0, 2.0 * b), larger.alpha());
  out.lhs = omega * lhs;
  out.rhs = out.constant * omega * rhs;
  return out;
}

}  // namespace choquard::oracles
