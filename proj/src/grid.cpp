#include "dnls/grid.hpp"

#include "dnls/soliton.hpp"

namespace dnls {

Eigen::VectorXd sample_profile(const Grid& g, const SolitonParams& sp) {
  Eigen::VectorXd v(g.size());
  for (int i = 0; i < g.size(); ++i) v[i] = soliton_profile(sp, g.x(i));
  return v;
}

Eigen::VectorXd sample_domega(const Grid& g, const SolitonParams& sp) {
  Eigen::VectorXd v(g.size());
  for (int i = 0; i < g.size(); ++i) v[i] = soliton_domega(sp, g.x(i));
  return v;
}

double grid_ip(const Grid& g, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return g.h() * a.dot(b);
}

} // namespace dnls
