#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "dnls/params.hpp"

namespace dnls {

/// Jost machinery for the matrix eigenvalue problem at energy omega + xi^2/2.
///
/// Writing V1 = sigma (p+2)/2 Q^p and V2 = sigma p/2 Q^p, the two-component
/// second-order form away from the origin is
///   u1'' = -xi^2 u1 + 2(V1 u1 + V2 u2),
///   u2'' = +mu^2 u2 + 2(V2 u1 + V1 u2),   mu = sqrt(xi^2 + 4 omega),
/// and both components jump at 0: u'(0+) - u'(0-) = 2q u(0).  The coefficient
/// matrix is symmetric, so the plain bilinear Wronskian
///   W[f,g] = f1' g1 + f2' g2 - f1 g1' - f2 g2'
/// is constant in x on each half-line and across the origin.
///
/// Four solutions are pinned by their x -> +infinity data:
///   f1 ~ e^{+i xi x} [1,0],  f2 ~ e^{-i xi x} [1,0] = conj f1,
///   f3 ~ e^{-mu x} [0,1],    f4 ~ e^{+mu x} [0,1]  (modulo f1,f2,f3),
/// with W[f1,f2] = 2 i xi, W[f1,f3] = W[f2,f3] = 0, W[f3,f4] = -2 mu.
/// Reflections g_j(x) = f_j(-x) solve the same problem from -infinity.
///
/// f4's admissible freedom (adding multiples of f1, f2, f3) is fixed here by
/// W[f1,f4] = W[f2,f4] = 0 plus a real gauge row orthogonal to the f3 data;
/// every quantity exposed by ScatteringData except the second row of B is
/// invariant under that choice, and f4 so normalized already satisfies the
/// cleaned-solution conditions (the c1, c2 Wronskian corrections vanish).
struct JostOptions {
  double x_max = 40.0;          // truncation radius; Q(x_max)^p must be < 1e-14
  double h = 1e-3;              // march step
  double potential_scale = 1.0; // multiplies V1, V2; 0 keeps only the delta
  double reset_interval = 0.0;  // f1 re-orthogonalization spacing; 0 = automatic
};

/// Solution role; g-labels denote data-at-zero reflections of the f-solutions.
enum class JostLabel { f1, f2, f3, f4tilde, f4, g1, g2, g3, g4 };

/// One Jost solution stored in rescaled form on a uniform grid.
///
/// The arrays hold F = e^{-rate x} f and its derivative F', so the true
/// solution is f(x) = e^{rate x} F(x) and f'(x) = e^{rate x}(F' + rate F).
/// Rates: f1 -> +i xi, f2 -> -i xi, f3 -> -mu, f4 -> +mu; the rescaled arrays
/// stay O(1) where the true solutions would overflow at mu x_max ~ 10^3.
struct JostSolution {
  JostLabel label = JostLabel::f3;
  double xi = 0.0;
  double mu = 0.0;
  double x0 = 0.0; // grid start; node j sits at x0 + j h
  double h = 0.0;
  double potential_scale = 1.0; // scale the potential was built with
  std::complex<double> rate{0.0, 0.0};
  std::vector<std::complex<double>> u1, u2;   // rescaled components
  std::vector<std::complex<double>> du1, du2; // derivatives of the rescaled components

  int nodes() const { return static_cast<int>(u1.size()); }
  double x_at(int j) const { return x0 + h * j; }

  /// Unrescaled value and one-sided derivative (from x > 0) at the origin.
  Eigen::Vector2cd value0() const;
  Eigen::Vector2cd deriv0() const;
};

/// W[f,g] evaluated at grid node j of both solutions (grids must coincide).
/// The exponential prefactor e^{(rate_f + rate_g) x} is applied; pairs whose
/// rates cancel (f1/f2, f3/f4) are overflow-free at every x.
std::complex<double> wronskian_at(const JostSolution& f, const JostSolution& g, int j);

/// Wronskian of f with the reflection g of h, evaluated at the origin using
/// only data at 0: with a = h(0), b = h'(0+), the jump condition gives
/// g'(0+) = 2q a - b, whence W[f, refl h] = f'(0).a + f(0).b - 2q f(0).a.
/// The expression is symmetric in its two arguments.
std::complex<double> wronskian_reflected(const JostSolution& f, const JostSolution& h, double q);

/// The four Jost solutions at one xi, sharing a grid on [0, x_max].
struct JostFamily {
  double xi = 0.0;
  double mu = 0.0;
  JostSolution f1, f2, f3, f4; // f4 normalized as documented above (f4tilde == f4)
};

/// Backward-ODE construction of the family (primary method).
///
/// f3 is marched from x_max with data [0,1]; f1 is marched with data [1,0]
/// and periodically re-orthogonalized against the backward-growing f3
/// direction (a pure gauge operation for every reported quantity), then a
/// restore pass rewrites the stored arrays as one consistent representative.
/// f4's data at 0 is solved from its Wronskian pinnings and marched forward.
/// Throws std::invalid_argument if Q(x_max)^p >= 1e-14 (truncation tail too fat).
JostFamily solve_jost_backward(const SolitonParams& prm, double xi, const JostOptions& opt = {});

/// Independent Volterra fixed-point construction of f3 only, used as an
/// oracle for the backward march.  Iterates m = [0,1] + 2 int_x^{xmax}
/// K(y-x) (V m)(y) dy with K = e^{-mu z} diag(sin(xi z)/xi, sinh(mu z)/mu)
/// until the sup distance of successive iterates is < 1e-12; if the distance
/// grows three times in a row the quadrature step is halved (at most twice).
/// Requires xi != 0 (the row-1 kernel is implemented in its sin/xi form).
JostSolution solve_f3_volterra(const SolitonParams& prm, double xi, const JostOptions& opt = {});

/// March a family member across the origin onto [-span, 0], applying the
/// derivative jump 2q f(0) at 0.  Used to test Wronskian constancy across 0.
JostSolution continue_to_negative(const JostSolution& f, const SolitonParams& prm, double span);

/// Scattering coefficients at one xi.
///
/// D = [[W[f1,g1], W[f1,g3]], [W[f3,g1], W[f3,g3]]] is symmetric; A, B solve
/// [f1 f3] = [g2 g4] A + [g1 g3] B by matching value and derivative at 0.
/// Ttilde = 2 i xi D22 / det D and
/// Rtilde = -(W[f1,g2] D22 - W[f3,g2] D21) / det D.
/// The identity D = diag(2 i xi, -2 mu) A is recomputed as a check (da_gap),
/// never used as a definition.
struct ScatteringData {
  double xi = 0.0;
  double mu = 0.0;
  Eigen::Matrix2cd D, A, B;
  std::complex<double> detD{0.0, 0.0};
  std::complex<double> Ttilde{0.0, 0.0};
  std::complex<double> Rtilde{0.0, 0.0};
  std::complex<double> w12{0.0, 0.0}; // W[f1,f2], expect 2 i xi
  std::complex<double> w34{0.0, 0.0}; // W[f3,f4], expect -2 mu
  std::complex<double> w13{0.0, 0.0}; // W[f1,f3], expect 0
  double w12_err = 0.0;  // max relative drift of W[f1,f2] over the grid
  double w34_err = 0.0;  // max relative drift of W[f3,f4] over the grid
  double da_gap = 0.0;   // relative defect of D = diag(2 i xi, -2 mu) A
  bool threshold_singular = false; // |det D| < 1e-12
};

/// Build ScatteringData from a solved family (q from prm) or from scratch.
/// A and B require f4 and degenerate as xi -> 0; D, Ttilde, Rtilde stay
/// well defined (use |xi| >= 1e-6).
ScatteringData scattering_data(const JostFamily& fam, const SolitonParams& prm);
ScatteringData scattering_data(const SolitonParams& prm, double xi, const JostOptions& opt = {});

/// det D at the bottom of the continuous spectrum, sampled at xi = +-1e-6 and
/// averaged; the average is real by the symmetry det D(-xi) = conj det D(xi).
/// Signed version: the root in omega of the signed form marks a threshold
/// resonance or eigenvalue; positive below the resonance frequency.
double threshold_indicator_signed(const SolitonParams& prm, const JostOptions& opt = {});
/// |det D(0)|, the magnitude form of the indicator.
double threshold_indicator(const SolitonParams& prm, const JostOptions& opt = {});

/// Sweep of the signed indicator over [omega_lo, omega_hi] with bracketed
/// roots refined by bisection to 1e-7.
struct ThresholdScan {
  std::vector<double> omega;
  std::vector<double> indicator; // signed det D(0) per omega
  std::vector<double> roots;     // bisected zero crossings, ascending
};
ThresholdScan threshold_scan(const SolitonParams& prm, double omega_lo, double omega_hi, int n,
                             const JostOptions& opt = {});

/// |det D| over a xi grid; a minimum bounded away from zero (relative to the
/// large-xi scale 4 xi mu) excludes embedded eigenvalues on the grid.
struct EmbeddedScan {
  std::vector<double> xi;
  std::vector<double> abs_detD;
  double min_abs_detD = 0.0;
  double xi_at_min = 0.0;
};
EmbeddedScan embedded_eigenvalue_scan(const SolitonParams& prm, const std::vector<double>& xi_grid,
                                      const JostOptions& opt = {});

} // namespace dnls
