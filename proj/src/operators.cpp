#include "dnls/operators.hpp"

#include <lapacke.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dnls/soliton.hpp"

namespace dnls {

Eigen::MatrixXd Tridiag::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n(), n());
  for (int i = 0; i < n(); ++i) {
    m(i, i) = d[i];
    if (i + 1 < n()) {
      m(i, i + 1) = e[i];
      m(i + 1, i) = e[i];
    }
  }
  return m;
}

template <class Vec>
static Vec tridiag_apply(const Tridiag& t, const Vec& v) {
  Vec out = t.d.asDiagonal() * v;
  int n = t.n();
  for (int i = 0; i + 1 < n; ++i) {
    out[i] += t.e[i] * v[i + 1];
    out[i + 1] += t.e[i] * v[i];
  }
  return out;
}

Eigen::VectorXd Tridiag::apply(const Eigen::VectorXd& v) const { return tridiag_apply(*this, v); }
Eigen::VectorXcd Tridiag::apply(const Eigen::VectorXcd& v) const { return tridiag_apply(*this, v); }

Tridiag build_hamiltonian(const Grid& g, double q) {
  const double h = g.h();
  Tridiag t;
  t.d = Eigen::VectorXd::Constant(g.size(), 1.0 / (h * h));
  t.e = Eigen::VectorXd::Constant(g.size() - 1, -0.5 / (h * h));
  t.d[g.origin()] += q / h;
  return t;
}

double potential_v1_at(const SolitonParams& sp, double x) {
  return sp.sigma * 0.5 * (sp.p + 2.0) * std::pow(soliton_profile(sp, x), sp.p);
}

double potential_v2_at(const SolitonParams& sp, double x) {
  return sp.sigma * 0.5 * sp.p * std::pow(soliton_profile(sp, x), sp.p);
}

Eigen::VectorXd potential_v1(const Grid& g, const SolitonParams& sp) {
  Eigen::VectorXd v(g.size());
  for (int i = 0; i < g.size(); ++i) v[i] = potential_v1_at(sp, g.x(i));
  return v;
}

Eigen::VectorXd potential_v2(const Grid& g, const SolitonParams& sp) {
  Eigen::VectorXd v(g.size());
  for (int i = 0; i < g.size(); ++i) v[i] = potential_v2_at(sp, g.x(i));
  return v;
}

Tridiag build_lminus(const Grid& g, const SolitonParams& sp) {
  sp.validate();
  Tridiag t = build_hamiltonian(g, sp.q);
  Eigen::VectorXd qp = sample_profile(g, sp);
  for (int i = 0; i < g.size(); ++i)
    t.d[i] += sp.omega + sp.sigma * std::pow(qp[i], sp.p);
  return t;
}

Tridiag build_lplus(const Grid& g, const SolitonParams& sp) {
  sp.validate();
  Tridiag t = build_hamiltonian(g, sp.q);
  Eigen::VectorXd qp = sample_profile(g, sp);
  for (int i = 0; i < g.size(); ++i)
    t.d[i] += sp.omega + sp.sigma * (sp.p + 1.0) * std::pow(qp[i], sp.p);
  return t;
}

LinearizedOps::LinearizedOps(const Grid& g, const SolitonParams& sp)
    : grid(g),
      params(sp),
      lminus(build_lminus(g, sp)),
      lplus(build_lplus(g, sp)),
      v1(potential_v1(g, sp)),
      v2(potential_v2(g, sp)) {}

Eigen::MatrixXd LinearizedOps::dense() const {
  const int n = grid.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  m.topRightCorner(n, n) = lminus.dense();
  m.bottomLeftCorner(n, n) = -lplus.dense();
  return m;
}

void LinearizedOps::apply_conjugated_via_u(const Eigen::VectorXcd& z1, const Eigen::VectorXcd& z2,
                                           Eigen::VectorXcd& out1, Eigen::VectorXcd& out2) const {
  const std::complex<double> I(0.0, 1.0);
  const double s = 1.0 / std::sqrt(2.0);
  // w = U z
  Eigen::VectorXcd w1 = s * (z1 + z2);
  Eigen::VectorXcd w2 = s * I * (z1 - z2);
  // y = L w = (L- w2, -L+ w1)
  Eigen::VectorXcd y1 = lminus.apply(w2);
  Eigen::VectorXcd y2 = -lplus.apply(w1);
  // out = -i U^* y, U^* = s [[1, -i], [1, i]]
  out1 = -I * s * (y1 - I * y2);
  out2 = -I * s * (y1 + I * y2);
}

void LinearizedOps::apply_conjugated(const Eigen::VectorXcd& z1, const Eigen::VectorXcd& z2,
                                     Eigen::VectorXcd& out1, Eigen::VectorXcd& out2) const {
  // diagonal block H + omega + v1 = L- + v2
  Eigen::VectorXcd v2c = v2.cast<std::complex<double>>();
  Eigen::VectorXcd a1 = lminus.apply(z1) + v2c.cwiseProduct(z1);
  Eigen::VectorXcd a2 = lminus.apply(z2) + v2c.cwiseProduct(z2);
  out1 = a1 + v2c.cwiseProduct(z2);
  out2 = -a2 - v2c.cwiseProduct(z1);
}

Eigen::VectorXd tridiag_eigenvalues(const Tridiag& t) {
  Eigen::VectorXd d = t.d, e = t.e, w(t.n());
  lapack_int m = 0;
  std::vector<lapack_int> isuppz(2 * std::max(1, t.n()));
  lapack_int info =
      LAPACKE_dstevr(LAPACK_COL_MAJOR, 'N', 'A', t.n(), d.data(), e.data(), 0.0, 0.0, 0, 0, 0.0,
                     &m, w.data(), nullptr, 1, isuppz.data());
  if (info != 0) throw std::runtime_error("dstevr failed, info=" + std::to_string(info));
  return w.head(m);
}

double tridiag_smallest(const Tridiag& t, Eigen::VectorXd* vec) {
  Eigen::VectorXd d = t.d, e = t.e, w(t.n());
  lapack_int m = 0;
  std::vector<lapack_int> isuppz(2 * std::max(1, t.n()));
  Eigen::VectorXd z(t.n());
  lapack_int info =
      LAPACKE_dstevr(LAPACK_COL_MAJOR, vec ? 'V' : 'N', 'I', t.n(), d.data(), e.data(), 0.0, 0.0,
                     1, 1, 0.0, &m, w.data(), vec ? z.data() : nullptr, t.n(), isuppz.data());
  if (info != 0 || m < 1) throw std::runtime_error("dstevr failed, info=" + std::to_string(info));
  if (vec) *vec = z / z.norm();
  return w[0];
}

} // namespace dnls
