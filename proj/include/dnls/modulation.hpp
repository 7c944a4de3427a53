#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dnls/evolution.hpp"
#include "dnls/grid.hpp"
#include "dnls/params.hpp"

namespace dnls {

/// One decomposition u = e^{i phi} (Q_omega + v) with v orthogonal to Q_omega
/// and to i d_omega Q_omega (real inner products).  phi is the total frame
/// phase; a series splits it as phi = theta + integral of omega.
struct ModulationState {
  double phi = 0.0;
  double omega = 0.0;
  Eigen::VectorXcd v;
};

/// 2d Newton iteration on F = [Re<e^{-i phi}u - Q, Q>; Re<e^{-i phi}u - Q, i d_omega Q>]
/// from the given guess; converged when |F|_1 < 1e-12 ||Q||^2.  Throws
/// runtime_error (with the final residual) if 50 steps do not converge or the
/// frequency leaves the regime valid for sigma.
ModulationState decompose(const Grid& g, const SolitonParams& base, const Eigen::VectorXcd& u,
                          double phi_guess, double omega_guess);

struct ModulationSample {
  double t = 0.0;
  double theta = 0.0; // phi - integral of omega
  double omega = 0.0;
  double thetadot = 0.0; // centered differences at the sample spacing
  double omegadot = 0.0;
  double v_h1 = 0.0;         // sqrt(||v||^2 + ||v'||^2)
  double v_lr = 0.0;         // L^r norm
  double v_l2w = 0.0;        // || <x>^{-alpha} v ||_L2
  double ode_residual = 0.0; // |A [omegadot; thetadot] - RHS| normalized
  double rhs_norm = 0.0;     // |RHS|, quadratic in v: halving the data size quarters it
  double det_a = 0.0;
  bool reseeded = false; // Newton needed the fallback guess
};

struct ModulationSeries {
  SolitonParams params; // omega field = omega_0 of the run
  Grid grid;
  double alpha = 1.2;
  double r = 12.0;
  double eta = 0.0;
  std::vector<ModulationSample> samples;
  int failure_index = -1; // first sample where decomposition failed; -1 = none
};

/// Decompose every stored sample with continuation guesses (previous phase
/// advanced by omega*dt, previous omega).  A failed sample is retried once
/// from (previous phi, omega_0) and flagged; a second failure truncates the
/// series and records the index.
///
/// baseline, when given, must be the eta = 0 run of the same configuration
/// sampled at the same times.  Its decomposition is subtracted sample by
/// sample (v fields, thetadot, omegadot) before norms and residuals are
/// formed: this calibrates away the mesh's systematic soliton deformation
/// and frequency bias, which otherwise floor the eta^2-scale observables.
/// theta and omega stay the run's own fitted values.
ModulationSeries track(const Trajectory& traj, double r = 12.0,
                       const Trajectory* baseline = nullptr);

/// Residual of A [omegadot; thetadot] = [Im<N, Q>; -Re<N, d_omega Q>] with
///   A = [[<Q,dQ> - Re<v,dQ>, -Im<v,Q>], [-Im<v,ddQ>, <Q,dQ> + Re<v,dQ>]]
///   N = sigma { |Q+v|^p (Q+v) - Q^{p+1} - (p+2)/2 Q^p v - (p/2) Q^p conj(v) }
/// normalized by ||Q||^2 (|omegadot| + |thetadot| + 1e-300).  det A is
/// written to *det_a when given.
Eigen::Vector2d ode_residual(const Grid& g, const SolitonParams& base, const ModulationState& st,
                             double thetadot, double omegadot, double* det_a = nullptr,
                             Eigen::Vector2d* rhs_out = nullptr);

struct DecayReport {
  double lr_slope = 0.0; // log-log fit of ||v||_Lr over the window
  double lr_target = 0.0;
  double weighted_slope = 0.0; // same for ||<x>^{-alpha} v||
  double weighted_target = 0.0;
  double h1_sup_over_eta = 0.0;
  double scattering_max_rise = 0.0; // worst relative increase, final third
  bool lr_ok = false;
  bool weighted_ok = false;
  bool scattering_ok = false;
};

/// Fit the decay exponents of the tracked norms over t in [t_min, t_max] and
/// compare with -(1/2 - 1/r) and -alpha.  Requires >= 20 samples inside the
/// window.  The scattering diagnostic checks that the weighted norm decreases
/// across the final third of the series up to 5% jitter.
DecayReport decay_report(const ModulationSeries& s, double t_min, double t_max,
                         double lr_tol = 0.15, double weighted_tol = 0.3);

} // namespace dnls
