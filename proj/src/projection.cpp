#include "dnls/projection.hpp"

#include <cmath>
#include <stdexcept>

#include "dnls/soliton.hpp"

namespace dnls {

Projector::Projector(const Grid& g, const SolitonParams& sp) : grid(g) {
  sp.validate();
  if (sp.focusing() && sp.p > 4.0) {
    double W = critical_frequency(sp.q, sp.p);
    if (std::abs(sp.omega - W) < 1e-6)
      throw std::invalid_argument("projection degenerates at the critical frequency");
  }
  Q = sample_profile(g, sp);
  dQ = sample_domega(g, sp);
  D = grid_ip(g, Q, dQ);
  if (std::abs(D) < 1e-12 * Q.norm() * dQ.norm() * g.h())
    throw std::invalid_argument("degenerate pairing <Q, dQ/domega>");
}

TwoComponentField Projector::operator()(const TwoComponentField& f) const {
  TwoComponentField out = f;
  out.c1 -= (grid_ip(grid, f.c1, Q) / D) * dQ;
  out.c2 -= (grid_ip(grid, f.c2, dQ) / D) * Q;
  return out;
}

} // namespace dnls
