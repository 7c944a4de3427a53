#pragma once

#include <Eigen/Dense>

#include "dnls/params.hpp"

namespace dnls {

/// Uniform symmetric grid on [-X, X] with 2*n_half+1 nodes; node n_half is x=0.
struct Grid {
  double X = 20.0;
  int n_half = 400;

  double h() const { return X / n_half; }
  int size() const { return 2 * n_half + 1; }
  int origin() const { return n_half; }
  double x(int i) const { return (i - n_half) * h(); }
};

/// Real pair (c1, c2) standing for the complex field c1 + i*c2.
struct TwoComponentField {
  Eigen::VectorXd c1, c2;
};

Eigen::VectorXd sample_profile(const Grid& g, const SolitonParams& sp);
Eigen::VectorXd sample_domega(const Grid& g, const SolitonParams& sp);

/// h-weighted dot product. Plain rectangle weights so that the projection
/// identities below hold to rounding, not just to quadrature error.
double grid_ip(const Grid& g, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

} // namespace dnls
