#pragma once

#include <span>
#include <string>
#include <vector>

#include "choquard/potential.hpp"
#include "choquard/radial_grid.hpp"
#include "choquard/riesz.hpp"

namespace choquard {

enum class BoundaryCondition { neumann, dirichlet };

std::string to_string(BoundaryCondition bc);
BoundaryCondition parse_boundary_condition(const std::string& text);

struct Problem {
  RadialDomain domain;
  BoundaryCondition bc = BoundaryCondition::neumann;
  Potential potential = Potential::constant(1.0);
  double p = 2.0;
  double alpha = 1.0;

  /// Hard violations throw Error; soft ones (exterior p outside the existence
  /// range) come back as warnings. With a grid, V is also checked at the nodes.
  std::vector<std::string> validate(const RadialGrid* grid = nullptr) const;

  /// inf V as declared, or the nodal minimum when nothing was declared.
  double potential_floor(const RadialGrid& grid) const;
};

/// Nodes whose values are held at zero: both ends for a Dirichlet annulus,
/// the inner end for a Dirichlet exterior domain, and always the truncation
/// radius of an exterior domain.
struct FixedNodes {
  bool first = false;
  bool last = false;

  bool contains(std::size_t i, std::size_t n) const { return (first && i == 0) || (last && i + 1 == n); }
};
FixedNodes fixed_nodes(const Problem& problem);
void zero_fixed(std::span<double> values, FixedNodes fixed);

/// Symmetric tridiagonal matrix A = omega (K + diag(w V)) with K the P1
/// stiffness matrix under r^{N-1} dr, so that Q(u) = u^T A u / 2. The
/// optional V-free variant (V = 1) gives the H^1 Gram matrix.
class QuadraticForm {
 public:
  QuadraticForm(const GridPtr& grid, const Problem& problem);
  static QuadraticForm h1_gram(const GridPtr& grid, FixedNodes fixed);

  std::size_t size() const noexcept { return diag_.size(); }
  void apply(std::span<const double> u, std::span<double> out) const;
  double energy(std::span<const double> u) const;
  double bilinear(std::span<const double> u, std::span<const double> v) const;
  /// Solves A x = rhs on the free nodes; fixed entries of x are 0.
  void solve(std::span<const double> rhs, std::span<double> x) const;
  FixedNodes fixed() const noexcept { return fixed_; }

 private:
  QuadraticForm() = default;
  std::vector<double> diag_;
  std::vector<double> off_;  // off_[m] couples nodes m and m+1
  std::vector<double> mass_;
  FixedNodes fixed_;
};

/// Weighted quadrature inner product omega sum_i w_i a_i b_i.
double inner(const Field& a, const Field& b);

/// Q(u) = 1/2 \int |u'|^2 + V u^2 dx.
double Q(const Field& u, const Problem& problem);

/// Representer of the first variation of Q in the weighted inner product:
/// inner(grad_Q(u), v) = \int u'v' + V u v dx. Fixed nodes are zeroed.
Field grad_Q(const Field& u, const Problem& problem);

/// D_alpha(u) = \int (I_alpha * |u|^p) |u|^p dx.
double D_alpha(const Field& u, const RieszKernel& kernel, double p);

/// 2p (I_alpha * |u|^p) sign(u) |u|^{p-1}; inner(grad_D(u), v) is the
/// directional derivative of D_alpha.
Field grad_D(const Field& u, const RieszKernel& kernel, double p);

/// \int |u|^{2p} dx and its weighted-inner-product gradient 2p sign(u)|u|^{2p-1}.
double local_constraint(const Field& u, double p);
Field grad_local_constraint(const Field& u, double p);

}  // namespace choquard
