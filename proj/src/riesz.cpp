#include "choquard/riesz.hpp"

#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include "choquard/error.hpp"
#include "parallel.hpp"

namespace choquard {

namespace {

constexpr double kQuadratureTolerance = 1e-12;
constexpr std::size_t kTanhSinhLevels = 12;
constexpr double kTailStart = 9.0;

double log_sinh(double y) { return y > 30.0 ? y - std::numbers::ln2 : std::log(std::sinh(y)); }
double log_cosh(double y) { return y > 30.0 ? y - std::numbers::ln2 : std::log(std::cosh(y)); }

void check_alpha(int dimension, double alpha) {
  if (dimension < 2) throw std::invalid_argument("dimension N must be >= 2");
  if (!(alpha > 0.0 && alpha < dimension) || !std::isfinite(alpha)) {
    throw Error("alpha-range", "alpha must lie in (0,N); got alpha=" + std::to_string(alpha) +
                                   " with N=" + std::to_string(dimension));
  }
}

struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

template <unsigned Points>
GaussRule make_rule() {
  using G = boost::math::quadrature::gauss<double, Points>;
  GaussRule g;
  const auto& ax = G::abscissa();
  const auto& wt = G::weights();
  for (std::size_t i = 0; i < ax.size(); ++i) {
    g.x.push_back(ax[i]);
    g.w.push_back(wt[i]);
    if (ax[i] != 0.0) {
      g.x.push_back(-ax[i]);
      g.w.push_back(wt[i]);
    }
  }
  return g;
}

const GaussRule& gauss_rule(unsigned points) {
  static const GaussRule g4 = make_rule<4>();
  static const GaussRule g6 = make_rule<6>();
  static const GaussRule g10 = make_rule<10>();
  static const GaussRule g20 = make_rule<20>();
  switch (points) {
    case 4: return g4;
    case 6: return g6;
    case 10: return g10;
    default: return g20;
  }
}

template <class F>
double fixed_gauss(F&& f, double lo, double hi, const GaussRule& g) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double sum = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i) sum += g.w[i] * f(mid + half * g.x[i]);
  return half * sum;
}

// exp(log_scale) \int_{t_lo}^{1/2} t^e (1 - t^2)^{(N-3)/2} dt by the binomial
// series of the second factor; t <= 1/2 makes the terms fall off like 4^{-k}.
// The scale is applied in log space because t_lo^e alone may overflow.
double sine_power_integral(double e, int dimension, double t_lo, double log_scale) {
  const double m = 0.5 * (dimension - 3.0);
  const double log_hi = -std::numbers::ln2;
  const double log_lo = std::log(t_lo);
  double coef = 1.0;
  double sum = 0.0;
  for (int k = 0; k < 60; ++k) {
    const double ex = e + 2.0 * k + 1.0;
    const double term = ex == 0.0 ? std::exp(log_scale) * (log_hi - log_lo)
                                  : (std::exp(log_scale + ex * log_hi) - std::exp(log_scale + ex * log_lo)) / ex;
    sum += coef * term;
    coef *= -(m - k) / (k + 1.0);
    if (coef == 0.0 || (k > 2 && std::abs(coef * std::pow(0.25, k)) < 1e-18)) break;
  }
  return sum;
}

// \int_0^pi sin^{N-2}(t) (d^2 + 4 r s sin^2(t/2))^{-(N-alpha)/2} dt, d = |r - s|.
//
// On [0, pi/3] substitute sin(t/2) = (d / sqrt(4rs)) sinh(y): the peak of width
// d/sqrt(rs) at t = 0 becomes a smooth exponential in y and the factor
// d^{alpha-1} comes out analytically. Both pieces are analytic in a strip of
// fixed width, so fixed Gauss panels reach round-off.
double angular_integral(double r, double s, double d, int dimension, double alpha) {
  const double n = dimension;
  const double lambda = 0.5 * (n - alpha);
  const double c = 4.0 * r * s;

  auto outer = [&](double t) {
    const double half = std::sin(0.5 * t);
    const double base = d * d + c * half * half;
    const double w = dimension == 2 ? 1.0 : std::pow(std::sin(t), n - 2.0);
    return w * std::pow(base, -lambda);
  };
  const double far_part = fixed_gauss(outer, std::numbers::pi / 3.0, std::numbers::pi, gauss_rule(20));

  const double prefactor = std::pow(2.0, n - 1.0);
  double near_part = 0.0;
  if (d == 0.0) {
    if (alpha <= 1.0) {
      throw Error("singular-diagonal", "k_alpha(r,r) diverges for alpha <= 1; use cell averages");
    }
    // \int_0^{1/2} t^{alpha-2} (1-t^2)^{(N-3)/2} dt = B_{1/4}((alpha-1)/2, (N-1)/2) / 2
    near_part = prefactor * std::pow(c, -lambda) * 0.5 *
                boost::math::beta(0.5 * (alpha - 1.0), 0.5 * (n - 1.0), 0.25);
  } else {
    const double sqrt_c = std::sqrt(c);
    const double y_max = std::asinh(0.5 * sqrt_c / d);
    auto inner = [&](double y) {
      double log_val = (1.0 - 2.0 * lambda) * log_cosh(y);
      if (dimension != 2) log_val += (n - 2.0) * log_sinh(y);
      double val = std::exp(log_val);
      if (dimension != 3) {
        const double t = d * std::sinh(y) / sqrt_c;
        val *= std::pow(1.0 - t * t, 0.5 * (n - 3.0));
      }
      return val;
    };
    // singularities of cosh^{-1} at y = i pi/2: unit panels with 10 points.
    // Past y = kTailStart the d^2 term is a relative e^{-2y} perturbation and
    // the rest of [0, pi/3] is done in closed form.
    const double y_end = std::min(y_max, kTailStart);
    const int panels = std::max(1, static_cast<int>(std::ceil(y_end)));
    const double width = y_end / panels;
    double integral = 0.0;
    for (int k = 0; k < panels; ++k) integral += fixed_gauss(inner, k * width, (k + 1) * width, gauss_rule(10));
    near_part = prefactor * std::pow(d, alpha - 1.0) * std::pow(c, -0.5 * (n - 1.0)) * integral;
    if (y_end < y_max) {
      const double t_lo = d * std::sinh(y_end) / sqrt_c;
      const double tail = sine_power_integral(alpha - 2.0, dimension, t_lo, 0.0) -
                          lambda * sine_power_integral(alpha - 4.0, dimension, t_lo, 2.0 * std::log(d) - std::log(c));
      near_part += prefactor * std::pow(c, -lambda) * tail;
    }
  }
  return near_part + far_part;
}

// Evaluates k_alpha(r, s) given d = |r - s| computed by the caller without
// cancellation.
class KernelEvaluator {
 public:
  KernelEvaluator(int dimension, double alpha, KernelRoute route)
      : dimension_(dimension),
        alpha_(alpha),
        closed_(route == KernelRoute::automatic && dimension == 3),
        prefactor_(riesz_constant(dimension, alpha) * sphere_measure(dimension - 1)) {}

  double operator()(double r, double s, double d) const {
    if (!closed_) return prefactor_ * angular_integral(r, s, d, dimension_, alpha_);
    const double beta = alpha_ - 1.0;
    double t = 0.0;
    if (d == 0.0) {
      if (alpha_ <= 1.0) {
        throw Error("singular-diagonal", "k_alpha(r,r) diverges for alpha <= 1; use cell averages");
      }
      t = std::pow(r + s, beta) / beta;
    } else {
      // ((r+s)^beta - d^beta) / beta = d^beta expm1(beta L) / beta, L = log((r+s)/d);
      // the expm1 form only matters while beta L is small
      const double log_ratio = std::log((r + s) / d);
      if (beta == 0.0) {
        t = log_ratio;
      } else if (std::abs(beta * log_ratio) < 0.5) {
        t = std::pow(d, beta) * std::expm1(beta * log_ratio) / beta;
      } else {
        t = (std::pow(r + s, beta) - std::pow(d, beta)) / beta;
      }
    }
    return prefactor_ * t / (r * s);
  }

  double alpha() const { return alpha_; }
  int dimension() const { return dimension_; }

 private:
  int dimension_;
  double alpha_;
  bool closed_;
  double prefactor_;
};

// Piece [e, e + sign*len] of a cell whose hat weights are defined on
// [s0, s1]; the kernel is singular at the endpoint e == r like
// delta^{alpha-1} (log delta at alpha = 1). tanh-sinh handles the endpoint
// and sees delta = s - r without cancellation.
CellMoments singular_piece(const KernelEvaluator& k, double r, double sign, double len, double s0,
                           double s1) {
  const double h = s1 - s0;
  const double nm1 = k.dimension() - 1.0;
  thread_local boost::math::quadrature::tanh_sinh<double> rule(kTanhSinhLevels);
  auto base = [&](double delta) {
    const double s = r + sign * delta;
    return k(r, s, delta) * std::pow(s, nm1);
  };
  // right hat = (r - s0)/h + sign*delta/h, so two integrals give both moments
  auto plain = [&](double delta) { return delta > 0.0 ? base(delta) : 0.0; };
  auto weighted = [&](double delta) { return delta > 0.0 ? base(delta) * delta : 0.0; };
  const double i0 = rule.integrate(plain, 0.0, len, kQuadratureTolerance);
  const double i1 = rule.integrate(weighted, 0.0, len, kQuadratureTolerance);
  CellMoments out;
  out.right = ((r - s0) * i0 + sign * i1) / h;
  out.left = ((s1 - r) * i0 - sign * i1) / h;
  return out;
}

// Cell at distance dist > 0 from r: panels graded towards r, each no longer
// than its distance to r, then a fixed Gauss rule per panel.
CellMoments graded_cell(const KernelEvaluator& k, double r, double s0, double s1, double dist) {
  const double h = s1 - s0;
  const double nm1 = k.dimension() - 1.0;
  const bool r_below = r < s0;
  const GaussRule& g = gauss_rule(10);
  CellMoments out;
  double offset = 0.0;  // distance from the near end of the cell
  while (offset < h) {
    const double len = std::min(dist + offset, h - offset);
    const double lo = r_below ? s0 + offset : s1 - offset - len;
    const double mid = lo + 0.5 * len;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      const double s = mid + 0.5 * len * g.x[i];
      const double d = r_below ? (dist + offset) + 0.5 * len * (1.0 + g.x[i]) : (dist + offset) + 0.5 * len * (1.0 - g.x[i]);
      const double v = g.w[i] * 0.5 * len * k(r, s, d) * std::pow(s, nm1);
      out.left += v * (s1 - s) / h;
      out.right += v * (s - s0) / h;
    }
    offset += len;
  }
  return out;
}

CellMoments cell_moments(const KernelEvaluator& k, double r, double s0, double s1) {
  const double h = s1 - s0;
  const double nm1 = k.dimension() - 1.0;

  if (r >= s0 && r <= s1) {
    CellMoments total;
    if (r > s0) {
      const CellMoments a = singular_piece(k, r, -1.0, r - s0, s0, s1);
      total.left += a.left;
      total.right += a.right;
    }
    if (r < s1) {
      const CellMoments b = singular_piece(k, r, 1.0, s1 - r, s0, s1);
      total.left += b.left;
      total.right += b.right;
    }
    return total;
  }

  const double dist = r < s0 ? s0 - r : r - s1;
  if (dist < 2.0 * h) return graded_cell(k, r, s0, s1, dist);

  // Nearest singularity is at least two cell widths away; the Gauss order
  // shrinks with the distance and stays at round-off.
  const GaussRule& g = gauss_rule(dist >= 32.0 * h ? 4 : dist >= 6.0 * h ? 6 : 10);
  const double mid = 0.5 * (s0 + s1);
  CellMoments out;
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    const double s = mid + 0.5 * h * g.x[i];
    const double v = g.w[i] * 0.5 * h * k(r, s, std::abs(r - s)) * std::pow(s, nm1);
    out.left += v * (s1 - s) / h;
    out.right += v * (s - s0) / h;
  }
  return out;
}

}  // namespace

double riesz_constant(int dimension, double alpha) {
  check_alpha(dimension, alpha);
  const double n = dimension;
  return std::tgamma(0.5 * (n - alpha)) /
         (std::tgamma(0.5 * alpha) * std::pow(std::numbers::pi, 0.5 * n) * std::pow(2.0, alpha));
}

double angular_kernel(double r, double s, int dimension, double alpha) {
  if (!(r > 0.0) || !(s > 0.0)) throw std::invalid_argument("angular_kernel requires r, s > 0");
  const KernelEvaluator k(dimension, alpha, KernelRoute::angular);
  return k(r, s, std::abs(r - s));
}

double closed_form_kernel_3d(double r, double s, double alpha) {
  if (!(r > 0.0) || !(s > 0.0)) throw std::invalid_argument("closed_form_kernel_3d requires r, s > 0");
  const KernelEvaluator k(3, alpha, KernelRoute::automatic);
  return k(r, s, std::abs(r - s));
}

CellMoments kernel_cell_moments(double r, double s0, double s1, int dimension, double alpha,
                                KernelRoute route) {
  if (!(s1 > s0) || !(s0 > 0.0) || !(r > 0.0)) throw std::invalid_argument("invalid cell");
  const KernelEvaluator k(dimension, alpha, route);
  return cell_moments(k, r, s0, s1);
}

RieszKernel::RieszKernel(GridPtr grid, double alpha, std::vector<double> entries)
    : grid_(std::move(grid)), alpha_(alpha), n_(grid_->size()), entries_(std::move(entries)) {
  if (entries_.size() != n_ * n_) throw std::invalid_argument("kernel entry count does not match grid");
}

void RieszKernel::apply(std::span<const double> in, std::span<double> out) const {
  if (in.size() != n_ || out.size() != n_) throw std::invalid_argument("grid mismatch in kernel apply");
  for (std::size_t i = 0; i < n_; ++i) {
    const double* row = entries_.data() + i * n_;
    double acc = 0.0;
    for (std::size_t j = 0; j < n_; ++j) acc += row[j] * in[j];
    out[i] = acc;
  }
}

RieszKernel assemble_kernel(const GridPtr& grid, double alpha, const KernelAssemblyOptions& options) {
  const int dimension = grid->dimension();
  check_alpha(dimension, alpha);
  const KernelEvaluator k(dimension, alpha, options.route);
  const std::size_t n = grid->size();
  const auto r = grid->nodes();
  const auto w = grid->weights();

  std::vector<double> m(n * n, 0.0);
  detail::parallel_for(n, options.jobs, [&](std::size_t i) {
    double* row = m.data() + i * n;
    for (std::size_t c = 0; c + 1 < n; ++c) {
      const CellMoments cm = cell_moments(k, r[i], r[c], r[c + 1]);
      row[c] += cm.left;
      row[c + 1] += cm.right;
    }
  });

  std::vector<double> row_sums(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) row_sums[i] += m[i * n + j];

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double sym = 0.5 * (w[i] * m[i * n + j] + w[j] * m[j * n + i]);
      m[i * n + j] = sym / w[i];
      m[j * n + i] = sym / w[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) off += m[i * n + j];
    m[i * n + i] = row_sums[i] - off;
  }
  return RieszKernel(grid, alpha, std::move(m));
}

Field apply(const RieszKernel& kernel, const Field& f) {
  if (!f.grid || f.grid->hash() != kernel.grid()->hash())
    throw std::invalid_argument("grid mismatch: field and kernel live on different grids");
  Field out(f.grid);
  kernel.apply(f.values, out.values);
  return out;
}

void save_kernel(const RieszKernel& kernel, const std::filesystem::path& path) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    char header[256];
    std::snprintf(header, sizeof header, "riesz-kernel v1 N=%d alpha=%.17g gridhash=%016" PRIx64 " size=%zu\n",
                  kernel.grid()->dimension(), kernel.alpha(), kernel.grid()->hash(), kernel.size());
    os << header;
    const auto e = kernel.entries();
    os.write(reinterpret_cast<const char*>(e.data()), static_cast<std::streamsize>(e.size() * sizeof(double)));
    if (!os) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

RieszKernel load_kernel(const std::filesystem::path& path, const GridPtr& grid, double alpha) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open kernel cache " + path.string());
  std::string header;
  std::getline(is, header);
  int dimension = 0;
  double file_alpha = 0.0;
  std::uint64_t hash = 0;
  std::size_t size = 0;
  if (std::sscanf(header.c_str(), "riesz-kernel v1 N=%d alpha=%lg gridhash=%" SCNx64 " size=%zu", &dimension,
                  &file_alpha, &hash, &size) != 4) {
    throw std::runtime_error("not a riesz-kernel v1 file: " + path.string());
  }
  if (dimension != grid->dimension() || hash != grid->hash() || size != grid->size() || file_alpha != alpha)
    throw std::runtime_error("kernel cache " + path.string() + " does not match (N, alpha, grid)");
  std::vector<double> entries(size * size);
  is.read(reinterpret_cast<char*>(entries.data()), static_cast<std::streamsize>(entries.size() * sizeof(double)));
  if (!is) throw std::runtime_error("truncated kernel cache " + path.string());
  return RieszKernel(grid, alpha, std::move(entries));
}

}  // namespace choquard
