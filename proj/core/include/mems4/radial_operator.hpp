#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mems4/banded.hpp"
#include "mems4/closed_forms.hpp"

namespace mems4 {

/// Graded mesh r_i = (i/(n+1))^gamma, i = 1..n, on (0,1). The origin is not a
/// node; r = 1 is the clamped boundary.
class RadialGrid {
 public:
  static constexpr std::size_t kMinNodes = 16;

  RadialGrid(std::size_t n_nodes, double gamma, Dimension dim);

  std::size_t size() const { return nodes_.size(); }
  double gamma() const { return gamma_; }
  Dimension dimension() const { return dim_; }
  std::span<const double> nodes() const { return nodes_; }
  double node(std::size_t i) const { return nodes_[i]; }

  /// Nodal quadrature for r^{N-1} dr: the exact measure of each dual cell.
  std::span<const double> weights() const { return weights_; }
  /// Half cell [m_{n+1/2}, 1] attached to the boundary node.
  double boundary_weight() const { return boundary_weight_; }

  /// Same gamma and dimension, spacing halved (n -> 2n + 1); nodes nest.
  RadialGrid refined() const;

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
  double boundary_weight_;
  double gamma_;
  Dimension dim_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr build_grid(std::size_t n_nodes, double gamma, Dimension dim);

/// Radial profile sampled at the interior nodes of its grid.
struct RadialField {
  GridPtr grid;
  std::vector<double> values;

  double max() const;
};

/// Discrete clamped bilaplacian in the shifted variable v = u - Phi.
///
/// The radial Laplacian is the flux-form operator L on nodes 1..n+1 with the
/// even extension at the origin and u'(1) = 0 at the boundary node. The
/// bilaplacian is W^{-1} K with K = L^T Omega L, so K is symmetric positive
/// definite and <u, v>_W = sum w_i u_i v_i makes the operator self-adjoint.
class OperatorMatrix {
 public:
  OperatorMatrix(GridPtr grid, BoundaryPair bp);

  const RadialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const BoundaryPair& boundary() const { return bp_; }
  const BandedSymmetric& stiffness() const { return stiffness_; }
  std::span<const double> weights() const { return grid_->weights(); }
  /// Phi sampled at the interior nodes.
  std::span<const double> phi() const { return phi_; }
  /// Laplacian of Phi (a constant, N * beta).
  double phi_laplacian() const { return phi_laplacian_; }

  /// W^{-1} K v for a shifted (homogeneous) field.
  std::vector<double> apply(std::span<const double> v) const;
  /// Discrete bilaplacian of u, using u - Phi for the clamped data.
  std::vector<double> apply_field(std::span<const double> u) const;
  /// Discrete Laplacian of v at nodes 1..n+1 (last entry is r = 1).
  std::vector<double> laplacian(std::span<const double> v) const;
  /// The same discrete bilaplacian applied to a closed-form profile, with
  /// sampling and stencil arithmetic in long double. Used for consistency
  /// checks against exact bilaplacians, where the 1/h^4 cancellation would
  /// otherwise swamp the truncation error in double.
  std::vector<double> apply_profile(const PowerSum& u) const;
  /// v with K v = W f, i.e. the homogeneous clamped solve of Delta^2 v = f.
  std::vector<double> solve(std::span<const double> f) const;

  /// sum_i omega_i (Delta u)_i^2 over nodes 1..n+1 for u = v + Phi.
  double bending_energy(std::span<const double> v) const;

 private:
  GridPtr grid_;
  BoundaryPair bp_;
  // Laplacian rows: lower/diag/upper coefficients for nodes 1..n+1.
  std::vector<double> lap_lower_, lap_diag_, lap_upper_;
  BandedSymmetric stiffness_;
  std::shared_ptr<const BandedLDLT> factor_;
  std::vector<double> phi_;
  double phi_laplacian_;
};

OperatorMatrix assemble_bilaplacian(GridPtr grid, const BoundaryPair& bp = {});

/// Dense row-major n x n matrix.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> data;
  double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

/// Discrete Green operator G = K^{-1} W: u = G f solves Delta^2 u = f with
/// homogeneous clamped data. Column j is the response to a unit load at r_j.
DenseMatrix green_matrix(const OperatorMatrix& op);

struct BoggioCheck {
  double min_entry;
  double max_entry;
  double tolerance;  // eps_pos * max_entry
  bool holds;
};

/// Entrywise nonnegativity up to -eps_pos * max entry.
BoggioCheck boggio_check(const DenseMatrix& g, double eps_pos = 1e-10);

/// max |G W^{-1} - (G W^{-1})^T| / max |G W^{-1}|.
double weighted_asymmetry(const DenseMatrix& g, std::span<const double> weights);

struct EigenResult {
  double value = 0.0;
  RadialField eigenfunction;
  bool converged = false;
  int iterations = 0;
  std::vector<std::string> log;
};

struct EigenOptions {
  double rel_tol = 1e-10;
  int max_iterations = 500;
};

/// Smallest eigenvalue of K x = nu W x (first clamped eigenvalue of Delta^2).
EigenResult nu1(const OperatorMatrix& op, const EigenOptions& opts = {});

/// Smallest eigenvalue of (K - W diag(weight)) x = mu W x, i.e. the discrete
/// stability eigenvalue when weight = 2 lambda / (1 - u)^3.
EigenResult smallest_weighted_eigenvalue(const OperatorMatrix& op, std::span<const double> weight,
                                         const EigenOptions& opts = {});

/// (x^T (K - W diag(weight)) x) / (x^T W x).
double rayleigh_quotient(const OperatorMatrix& op, std::span<const double> weight,
                         std::span<const double> x);

}  // namespace mems4
