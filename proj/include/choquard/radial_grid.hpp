#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace choquard {

enum class DomainKind { annulus, exterior };

/// Radially symmetric domain {a < |x| < b} in R^N. For exterior domains
/// `outer_radius` is the computational truncation radius R.
struct RadialDomain {
  DomainKind kind = DomainKind::annulus;
  int dimension = 3;
  double inner_radius = 1.0;
  double outer_radius = 2.0;

  static RadialDomain annulus(int dimension, double a, double b);
  static RadialDomain exterior(int dimension, double a, double truncation_radius);

  /// Throws std::invalid_argument when the invariants do not hold.
  void validate() const;
  double volume() const;

  bool operator==(const RadialDomain&) const = default;
};

/// Surface measure of the unit sphere S^{N-1} in R^N.
double sphere_measure(int dimension);

struct Grading {
  enum class Kind { uniform, geometric };
  Kind kind = Kind::uniform;
  /// Ratio between consecutive cell widths (geometric only).
  double ratio = 1.0;

  static Grading uniform() { return {Kind::uniform, 1.0}; }
  static Grading geometric(double ratio) { return {Kind::geometric, ratio}; }
};

/// Nodes r_0 < ... < r_n on [a, b] with weights w_i = \int phi_i(r) r^{N-1} dr
/// for the piecewise-linear hat functions phi_i. Sums of the form
/// omega_{N-1} * sum_i w_i f(r_i) are exact for piecewise-linear f.
class RadialGrid {
 public:
  RadialGrid(RadialDomain domain, std::vector<double> nodes);

  const RadialDomain& domain() const noexcept { return domain_; }
  int dimension() const noexcept { return domain_.dimension; }
  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t cell_count() const noexcept { return nodes_.size() - 1; }

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }
  /// \int_{cell} r^{N-1} dr for each cell [r_m, r_{m+1}].
  std::span<const double> cell_moments() const noexcept { return cell_moments_; }
  double node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  double sphere_measure() const noexcept { return sphere_measure_; }

  /// FNV-1a over the node bytes and the dimension; keys kernel caches.
  std::uint64_t hash() const noexcept { return hash_; }

 private:
  RadialDomain domain_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> cell_moments_;
  double sphere_measure_;
  std::uint64_t hash_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// n cells (n + 1 nodes), n >= 16.
GridPtr build_grid(const RadialDomain& domain, std::size_t n, Grading grading);

/// Grid from explicit nodes, e.g. read back from a solution file.
GridPtr grid_from_nodes(const RadialDomain& domain, std::vector<double> nodes);

/// \int_{r0}^{r1} r^{N-1} (r1 - r)/h dr and \int r^{N-1} (r - r0)/h dr.
struct HatMoments {
  double left;
  double right;
};
HatMoments hat_moments(double r0, double r1, int dimension);

/// Radial function sampled at the nodes of a grid.
struct Field {
  GridPtr grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(GridPtr g);
  Field(GridPtr g, std::vector<double> v);

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

template <class F>
Field sample(const GridPtr& grid, F&& f) {
  Field out(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) out.values[i] = f(grid->node(i));
  return out;
}

/// Throws if the two fields do not live on the same grid.
void require_same_grid(const Field& a, const Field& b);

/// \int_Omega f dx for radial f.
double integrate(const Field& f);

/// (\int f^2 + |f'|^2 dx)^{1/2}; derivative as cellwise difference quotient,
/// mass term by nodal quadrature.
double h1_norm(const Field& f);

/// (\int |f|^q dx)^{1/q}, q >= 1.
double lp_norm(const Field& f, double q);

/// Piecewise-linear interpolation of f at radius r (clamped to the grid).
double interpolate(const Field& f, double r);
Field interpolate(const Field& f, const GridPtr& target);

}  // namespace choquard
