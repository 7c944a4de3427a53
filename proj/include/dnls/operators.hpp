#pragma once

#include <Eigen/Dense>

#include "dnls/grid.hpp"

namespace dnls {

/// Symmetric tridiagonal matrix: diagonal d (n), superdiagonal e (n-1).
struct Tridiag {
  Eigen::VectorXd d, e;

  int n() const { return static_cast<int>(d.size()); }
  Eigen::MatrixXd dense() const;
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
};

/// H = -1/2 d^2/dx^2 + q delta_0 on the grid: 3-point Laplacian, delta folded
/// in as q/h on the origin diagonal, homogeneous Dirichlet one node past each end.
Tridiag build_hamiltonian(const Grid& g, double q);

/// Potentials of the conjugated system: v1 = sigma (p+2)/2 Q^p,
/// v2 = sigma p/2 Q^p. The scalar blocks recombine as
/// L- = H + omega + (v1 - v2) and L+ = H + omega + (v1 + v2).
double potential_v1_at(const SolitonParams& sp, double x);
double potential_v2_at(const SolitonParams& sp, double x);
Eigen::VectorXd potential_v1(const Grid& g, const SolitonParams& sp);
Eigen::VectorXd potential_v2(const Grid& g, const SolitonParams& sp);

Tridiag build_lminus(const Grid& g, const SolitonParams& sp);
Tridiag build_lplus(const Grid& g, const SolitonParams& sp);

/// Precomputed blocks of the linearization [[0, L-], [-L+, 0]] around Q_omega.
struct LinearizedOps {
  Grid grid;
  SolitonParams params;
  Tridiag lminus, lplus;
  Eigen::VectorXd v1, v2;

  LinearizedOps(const Grid& g, const SolitonParams& sp);

  /// Dense 2N x 2N [[0, L-], [-L+, 0]] acting on (real part, imag part).
  Eigen::MatrixXd dense() const;

  /// -i U^* L U applied to a complex pair, U = (1/sqrt2)[[1,1],[i,-i]].
  void apply_conjugated_via_u(const Eigen::VectorXcd& z1, const Eigen::VectorXcd& z2,
                              Eigen::VectorXcd& out1, Eigen::VectorXcd& out2) const;

  /// The closed form of the same operator:
  /// [[H+omega+v1, v2], [-v2, -(H+omega+v1)]].
  void apply_conjugated(const Eigen::VectorXcd& z1, const Eigen::VectorXcd& z2,
                        Eigen::VectorXcd& out1, Eigen::VectorXcd& out2) const;
};

/// All eigenvalues of a symmetric tridiagonal matrix, ascending (LAPACK MRRR).
Eigen::VectorXd tridiag_eigenvalues(const Tridiag& t);

/// Smallest eigenvalue; if vec != nullptr also its normalized eigenvector.
double tridiag_smallest(const Tridiag& t, Eigen::VectorXd* vec = nullptr);

} // namespace dnls
