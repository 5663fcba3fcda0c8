#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "choquard/radial_grid.hpp"

namespace choquard {

/// C_{N,alpha} = Gamma((N-alpha)/2) / (Gamma(alpha/2) pi^{N/2} 2^alpha).
/// Throws Error("alpha-range") unless 0 < alpha < N.
double riesz_constant(int dimension, double alpha);

/// Radial kernel k_alpha(r, s) such that
///   (I_alpha * f)(r) = \int k_alpha(r, s) f(s) s^{N-1} ds
/// for radial f, computed by adaptive quadrature over the polar angle.
/// Throws Error("singular-diagonal") for r == s and alpha <= 1.
double angular_kernel(double r, double s, int dimension, double alpha);

/// Closed form of k_alpha for N = 3:
///   2 pi C_{3,alpha} ((r+s)^{alpha-1} - |r-s|^{alpha-1}) / ((alpha-1) r s),
/// with the logarithmic limit at alpha = 1.
double closed_form_kernel_3d(double r, double s, double alpha);

enum class KernelRoute {
  automatic,  ///< closed form for N = 3, angular quadrature otherwise
  angular,    ///< always angular quadrature
};

/// Hat-weighted kernel moments over one cell [s0, s1]:
///   left  = \int k(r,s) s^{N-1} (s1 - s)/h ds
///   right = \int k(r,s) s^{N-1} (s - s0)/h ds
/// The cell may touch or contain r; the integration is split at s = r and
/// the endpoint singularity is removed by a power substitution.
struct CellMoments {
  double left = 0.0;
  double right = 0.0;
};
CellMoments kernel_cell_moments(double r, double s0, double s1, int dimension, double alpha,
                                KernelRoute route = KernelRoute::automatic);

struct KernelAssemblyOptions {
  KernelRoute route = KernelRoute::automatic;
  unsigned jobs = 0;  ///< 0: hardware concurrency
};

/// Dense discretization M of f -> I_alpha * (chi_Omega f) on a radial grid.
///
/// Row i starts from the product-integration moments P_ij = \int k(r_i,s)
/// phi_j(s) s^{N-1} ds. Off-diagonal entries are the weighted symmetrization
/// of P, the diagonal absorbs the difference so that every row still sums to
/// \int_Omega k(r_i,s) s^{N-1} ds (constants are reproduced exactly).
/// Afterwards M_ij w_i = M_ji w_j holds exactly.
class RieszKernel {
 public:
  RieszKernel(GridPtr grid, double alpha, std::vector<double> entries);

  double alpha() const noexcept { return alpha_; }
  const GridPtr& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {entries_.data() + i * n_, n_}; }
  std::span<const double> entries() const noexcept { return entries_; }

  /// out = M in
  void apply(std::span<const double> in, std::span<double> out) const;

 private:
  GridPtr grid_;
  double alpha_;
  std::size_t n_;
  std::vector<double> entries_;
};

RieszKernel assemble_kernel(const GridPtr& grid, double alpha, const KernelAssemblyOptions& options = {});

/// I_alpha * f at the grid nodes.
Field apply(const RieszKernel& kernel, const Field& f);

/// Kernel cache: header line
///   riesz-kernel v1 N=<n> alpha=<a> gridhash=<h> size=<m>
/// followed by m*m row-major little-endian doubles.
void save_kernel(const RieszKernel& kernel, const std::filesystem::path& path);
RieszKernel load_kernel(const std::filesystem::path& path, const GridPtr& grid, double alpha);

}  // namespace choquard
