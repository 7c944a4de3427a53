#pragma once

#include <vector>

#include "dnls/grid.hpp"
#include "dnls/jost.hpp"
#include "dnls/operators.hpp"

namespace dnls {

/// Time stepping of dz/dt = L z, L = [[0, L-], [-L+, 0]], by the implicit
/// midpoint rule.  Eliminating the second component turns each step into one
/// banded solve with the fixed pentadiagonal matrix I + (dt^2/4) L- L+, which
/// is factored once; the scheme is symmetric (time-reversible) and
/// unconditionally stable.
struct PropagatorOptions {
  Grid grid{200.0, 4000}; // X = 200, h = 0.05
  double dt = 0.01;
  /// Re-apply P_c every this many steps to purge discretization leakage into
  /// the generalized kernel (0 disables; initial data is always projected).
  int reproject_every = 100;
  /// 0 switches the soliton potentials off: L reduces to -i(H + omega) and
  /// the projection removes the bound state phi_0 from both components.
  double potential_scale = 1.0;
  /// Refuse to propagate when |det D(0)| of the scattering module falls below
  /// this value: a threshold resonance invalidates the dispersive decay rates
  /// this module measures.  Set to 0 to override (resonance studies).
  double spectral_tolerance = 1e-3;
  JostOptions jost; // used only for the spectral-condition check
};

/// Norm trace of a propagated field: |v|(t) sampled in the sup norm, the
/// <x>^{-1}-localized sup norm, L^2, the <x>^{-alpha}-weighted L^2, and L^r.
struct DecaySeries {
  double alpha = 1.2;
  double r = 12.0;
  std::vector<double> times;
  std::vector<double> linf, linf_loc, l2, l2w, lr;
};

enum class DecayNorm { linf, linf_loc, l2, l2_weighted, lr };

struct DecayFit {
  double slope = 0.0;
  double half_width = 0.0; // ~95% confidence half-width of the slope
  int samples = 0;
};

/// Evolve v0 (projected first) and return the field at each requested time.
/// t_grid must be commensurate with dt and advance from 0 in the direction of
/// dt's sign (negative dt with negative times runs the reversed flow).
/// Throws std::runtime_error when the spectral-condition check fails.
std::vector<TwoComponentField> propagate(const SolitonParams& prm, const TwoComponentField& v0,
                                         const std::vector<double>& t_grid,
                                         const PropagatorOptions& opt = {});

/// propagate() plus norm sampling at the requested times.
DecaySeries measure_decay(const SolitonParams& prm, const TwoComponentField& v0,
                          const std::vector<double>& t_grid, const PropagatorOptions& opt = {},
                          double alpha = 1.2, double r = 12.0);

/// Least-squares slope of log(norm) vs log(t) over t in [t_lo, t_hi].
/// Requires >= 10 samples in the window; the caller keeps the window inside
/// the pre-reflection era t < X / (2 * max group speed of the data).
DecayFit fit_decay(const DecaySeries& s, DecayNorm key, double t_lo, double t_hi);

/// P_c as the run uses it: projection off the generalized kernel of the
/// discretized linearization (bound-state removal per component when
/// scale = 0).  The kernel directions are the discrete operator's own
/// invariant pair, so the projection commutes with propagate() to roundoff.
TwoComponentField project_for(const SolitonParams& prm, const TwoComponentField& f,
                              const PropagatorOptions& opt);

} // namespace dnls
