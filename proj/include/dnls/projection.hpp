#pragma once

#include "dnls/grid.hpp"

namespace dnls {

/// Projection P_c off the generalized kernel span{[dQ/domega, 0], [0, Q]}:
///   (I - P_c) f = (<f1,Q>/D) [dQ/domega, 0] + (<f2,dQ/domega>/D) [0, Q]
/// with D = <Q, dQ/domega>, all inner products taken on the grid so that
/// idempotence and annihilation hold to rounding.
struct Projector {
  Grid grid;
  Eigen::VectorXd Q, dQ;
  double D;

  /// Throws if omega is within 1e-6 of the critical frequency (focusing, p>4)
  /// or if the pairing D degenerates.
  Projector(const Grid& g, const SolitonParams& sp);

  TwoComponentField operator()(const TwoComponentField& f) const;
};

} // namespace dnls
