#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dnls/params.hpp"

namespace dnls {

enum class Parity { even, odd };

/// Solution of the edge boundary-value system on [0, x0]:
///   L- g1 = -omega f2,  L- g2 = omega f1,
///   L+ f1 =  omega g2,  L+ f2 = -omega g1,
/// with parity conditions at 0 (even: u'(0) = q u(0); odd: u(0) = 0) and far
/// rows f1(x0) = 1 (normalization) and f1'(x0) = 0. The system decouples into
/// the pairs (f1, g2) and (f2, g1), and multiplication by i maps one pair
/// into the other, so every solution is a complex multiple of a (f1, g2)-only
/// one; the solver fixes that gauge and returns f2 = g1 = 0 exactly. The
/// x -> infinity limits of the equations force g2 = f1 and g1 = -f2 on the
/// flat branch; at a resonance the computed g2(x0) approaches f1(x0) = 1
/// without being imposed.
struct BvpSolution {
  double omega = 0.0;
  Parity parity = Parity::even;
  double h = 0.0;
  Eigen::VectorXd f1, f2, g1, g2; // node j at x = j*h
  bool singular = false;          // factorization hit an exact zero pivot
};

struct ShooterOptions {
  double x0 = 50.0;
  double h = 0.01;
  /// Rejected variant kept for the record: u'(x0) = 0 on all four unknowns
  /// and no normalization; the direct solve then returns the zero solution.
  bool far_neumann_all = false;
};

BvpSolution solve_edge_bvp(const SolitonParams& sp, Parity parity,
                           const ShooterOptions& opt = {});

/// RMS of the four forward-difference derivatives over the trailing window
/// (default last 10% of the domain). Small value = asymptotically flat.
double flatness(const BvpSolution& sol, double window_frac = 0.1);

struct ScanPoint {
  double omega = 0.0;
  double flat = 0.0;
};

struct ResonanceScan {
  std::vector<ScanPoint> points;
  std::vector<ScanPoint> minima; // strict interior local minima
};

/// Flatness sampled on a uniform omega grid; solver failures propagate as
/// +inf samples and never count as minima.
ResonanceScan scan_resonances(const SolitonParams& base, Parity parity, double lo, double hi,
                              int n_samples, const ShooterOptions& opt = {});

/// Iterated factor-10 grid refinement of a bracketed flatness minimum until
/// the bracket width drops below 1e-5; returns the minimizer. The location
/// converges at O(h^2) with a large constant (the potential has a kink at the
/// origin), so the mesh, not the bracket width, limits the accuracy.
double refine_resonance(const SolitonParams& base, Parity parity, double lo, double hi,
                        const ShooterOptions& opt = {});

/// refine_resonance at mesh h and h/2 combined by Richardson extrapolation,
/// (4 w(h/2) - w(h)) / 3. Cancels the leading mesh error; the p = 5 even
/// resonance moves from +1.2% (h = 0.01) to within 2e-4 of the converged
/// value.
double refine_resonance_extrapolated(const SolitonParams& base, Parity parity, double lo,
                                     double hi, const ShooterOptions& opt = {});

struct TableRow {
  double p = 0.0;
  double omega1 = 0.0; // even resonance
  double mass = 0.0;   // mass of Q at omega1
  double omega2 = 0.0; // odd resonance
  double Omega = 0.0;  // sign change of <Q, dQ/domega>
};

/// One row per p: even and odd resonances, soliton mass at the even one, and
/// the critical frequency. q < 0; every p must exceed 4.
std::vector<TableRow> resonance_table(double q, const std::vector<double>& ps,
                                      const ShooterOptions& opt = {});

/// ceil(200 * decades), the default scan density.
int scan_samples(double lo, double hi);

} // namespace dnls
