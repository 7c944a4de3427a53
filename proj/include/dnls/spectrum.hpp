#pragma once

#include <complex>
#include <vector>

#include "dnls/operators.hpp"

namespace dnls {

/// Spectrum of [[0, L-], [-L+, 0]] computed through its square, which is
/// block-diagonal: L^2 = diag(-L-L+, -L+L-). The two blocks are transposes
/// of each other and carry one common spectrum {nu}; each nu lifts to the
/// eigenvalue pair lambda = +-sqrt(nu) of L. The near-zero cluster dimension
/// is the rank test on L^2 with tolerance zero_tol (counted once per block,
/// hence doubled).
struct SpectrumReport {
  std::vector<std::complex<double>> nu;      // eigenvalues of -L-L+
  std::vector<std::complex<double>> lambdas; // +-sqrt(nu), the spectrum of L
  int zero_cluster_dim = 0;                  // 2 * #{ |nu| < zero_tol }
  std::vector<double> gap_imag;              // |lambda| of internal imaginary pairs
  std::vector<double> unstable_real;         // lambda > 0 of real pairs
  double zero_tol = 0.0;
};

/// zero_tol = max(zero_tol_factor * h^2, twice the perturbation-theory estimate
/// of the discrete zero-mode displacement). Internal pairs are imaginary
/// eigenvalues strictly inside the gap: zero_tol < -nu and sqrt(-nu) < omega - gap_margin.
SpectrumReport linearized_spectrum(const Grid& g, const SolitonParams& sp,
                                   double zero_tol_factor = 10.0, double gap_margin = 1e-3);

/// Eigenvalues inside the closed box [re_min,re_max] x [im_min,im_max].
std::vector<std::complex<double>> filter_window(const std::vector<std::complex<double>>& lambdas,
                                                double re_min, double re_max, double im_min,
                                                double im_max);

} // namespace dnls
