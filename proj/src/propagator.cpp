#include "dnls/propagator.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <lapacke.h>

#include "dnls/operators.hpp"

namespace dnls {
namespace {

/// Factored banded matrix shift*I + beta L- L+ (kl = ku = 2), LAPACK col-major
/// band storage with kl extra rows for the dgbtrf fill-in.
struct MidpointMatrix {
  static constexpr int KL = 2, KU = 2;
  int n = 0;
  int ldab = 2 * KL + KU + 1;
  std::vector<double> ab;
  std::vector<lapack_int> ipiv;

  MidpointMatrix(const Tridiag& lm, const Tridiag& lp, double beta, double shift = 1.0)
      : n(lm.n()) {
    ab.assign(static_cast<size_t>(ldab) * n, 0.0);
    ipiv.assign(n, 0);
    auto at = [&](int i, int j) -> double& {
      return ab[static_cast<size_t>(j) * ldab + (KL + KU + i - j)];
    };
    auto e = [](const Tridiag& t, int i) { return (i >= 0 && i < t.n() - 1) ? t.e[i] : 0.0; };
    for (int i = 0; i < n; ++i) {
      at(i, i) = shift + beta * (e(lm, i - 1) * e(lp, i - 1) + lm.d[i] * lp.d[i] + e(lm, i) * e(lp, i));
      if (i + 1 < n) {
        at(i, i + 1) = beta * (lm.d[i] * e(lp, i) + e(lm, i) * lp.d[i + 1]);
        at(i + 1, i) = beta * (e(lm, i) * lp.d[i] + lm.d[i + 1] * e(lp, i));
      }
      if (i + 2 < n) {
        at(i, i + 2) = beta * e(lm, i) * e(lp, i + 1);
        at(i + 2, i) = beta * e(lm, i + 1) * e(lp, i);
      }
    }
    lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, KL, KU, ab.data(), ldab, ipiv.data());
    if (info != 0)
      throw std::runtime_error("propagator: dgbtrf failed, info = " + std::to_string(info));
  }

  void solve(Eigen::VectorXd& x, char trans = 'N') const {
    lapack_int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, trans, n, KL, KU, 1, ab.data(), ldab,
                                     ipiv.data(), x.data(), n);
    if (info != 0)
      throw std::runtime_error("propagator: dgbtrs failed, info = " + std::to_string(info));
  }
};

Eigen::VectorXd tridiag_solve(const Tridiag& t, Eigen::VectorXd rhs) {
  Eigen::VectorXd dl = t.e, d = t.d, du = t.e;
  lapack_int info =
      LAPACKE_dgtsv(LAPACK_COL_MAJOR, t.n(), 1, dl.data(), d.data(), du.data(), rhs.data(), t.n());
  if (info != 0)
    throw std::runtime_error("propagator: dgtsv failed, info = " + std::to_string(info));
  return rhs;
}

Tridiag free_block(const Grid& g, const SolitonParams& sp) {
  Tridiag t = build_hamiltonian(g, sp.q);
  t.d.array() += sp.omega;
  return t;
}

/// Projection off the generalized kernel of the discretized linearization.
///
/// Sampling the continuum pair (Q, d_omega Q) leaves an O(h^2) mismatch with
/// the discrete operator's own near-kernel, which the flow then amplifies
/// (the pair rotates at rate sqrt(mu), mu = near-zero eigenvalue of L- L+,
/// with quadrature amplitudes differing by 1/sqrt(mu)).  Instead project off
/// the exact invariant pair of the discrete system:
///   right vectors  [a, 0], [0, L+ a]   with  L- L+ a  = mu a,
///   left  vectors  [a*,0], [0, L+^{-1} a*]  with  L+ L- a* = mu a*.
/// Both subspaces are exactly invariant, so the projector commutes with the
/// discrete flow to roundoff.  In the free mode the blocks are self-adjoint
/// and equal; there the bound state of H is removed per component.
struct RunProjector {
  Grid g;
  bool free_mode;
  Eigen::VectorXd phi0; // free mode: delta bound state
  double phi0_sq = 0.0;
  Eigen::VectorXd ra, rb, la, lb; // potential on: invariant pair + duals
  double dr = 0.0, db = 0.0;

  RunProjector(const Grid& grid, const SolitonParams& sp, const Tridiag& lm, const Tridiag& lp,
               bool free)
      : g(grid), free_mode(free) {
    if (free_mode) {
      tridiag_smallest(lm, &phi0); // omega shift moves eigenvalues, not vectors
      phi0_sq = grid_ip(grid, phi0, phi0);
      return;
    }
    const MidpointMatrix P(lm, lp, 1.0, 0.0); // banded L- L+
    auto iterate = [&](Eigen::VectorXd seed, char trans) {
      seed.normalize();
      double mu = 0.0;
      for (int it = 0; it < 60; ++it) {
        P.solve(seed, trans);
        seed.normalize();
        const Eigen::VectorXd img = trans == 'N' ? lm.apply(lp.apply(seed))
                                                 : lp.apply(lm.apply(seed));
        const double m = seed.dot(img);
        if (it > 0 && std::abs(m - mu) <= 1e-14 * std::abs(m)) {
          mu = m;
          break;
        }
        mu = m;
      }
      const Eigen::VectorXd img = trans == 'N' ? lm.apply(lp.apply(seed))
                                               : lp.apply(lm.apply(seed));
      if ((img - mu * seed).norm() > 1e-6)
        throw std::runtime_error(
            "propagator: generalized-kernel iteration did not converge; the mesh is too coarse "
            "to carry the kernel pair at this omega (refine h)");
      return seed;
    };
    ra = iterate(sample_domega(grid, sp), 'N');
    la = iterate(sample_profile(grid, sp), 'T');
    rb = lp.apply(ra);
    lb = tridiag_solve(lp, la);
    dr = grid_ip(grid, ra, la); // equals <rb, lb> since L+ is symmetric
    db = grid_ip(grid, rb, lb);
    if (std::abs(dr) < 1e-8 || std::abs(db) < 1e-8)
      throw std::runtime_error("propagator: generalized-kernel pairing is degenerate");
  }

  void apply(TwoComponentField& f) const {
    if (free_mode) {
      f.c1 -= (grid_ip(g, f.c1, phi0) / phi0_sq) * phi0;
      f.c2 -= (grid_ip(g, f.c2, phi0) / phi0_sq) * phi0;
      return;
    }
    f.c1 -= (grid_ip(g, f.c1, la) / dr) * ra;
    f.c2 -= (grid_ip(g, f.c2, lb) / db) * rb;
  }
};

double weight_pow(double x, double a) { return std::pow(1.0 + x * x, -0.5 * a); }

} // namespace

TwoComponentField project_for(const SolitonParams& prm, const TwoComponentField& f,
                              const PropagatorOptions& opt) {
  const bool free_mode = opt.potential_scale == 0.0;
  Tridiag lm, lp;
  if (free_mode) {
    lm = free_block(opt.grid, prm);
    lp = lm;
  } else {
    lm = build_lminus(opt.grid, prm);
    lp = build_lplus(opt.grid, prm);
  }
  RunProjector rp(opt.grid, prm, lm, lp, free_mode);
  TwoComponentField out = f;
  rp.apply(out);
  return out;
}

std::vector<TwoComponentField> propagate(const SolitonParams& prm, const TwoComponentField& v0,
                                         const std::vector<double>& t_grid,
                                         const PropagatorOptions& opt) {
  const Grid& g = opt.grid;
  const int n = g.size();
  if (v0.c1.size() != n || v0.c2.size() != n)
    throw std::invalid_argument("propagator: v0 not sampled on the options grid");
  if (opt.dt == 0.0) throw std::invalid_argument("propagator: dt must be nonzero");
  const bool free_mode = opt.potential_scale == 0.0;

  if (!free_mode && opt.spectral_tolerance > 0.0) {
    const double ind = std::abs(threshold_indicator(prm, opt.jost));
    if (ind < opt.spectral_tolerance) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "propagator: spectral condition fails at omega = %.6g: |det D(0)| = %.3e < %.1e "
                    "(threshold resonance); dispersive rates are not valid here",
                    prm.omega, ind, opt.spectral_tolerance);
      throw std::runtime_error(msg);
    }
  }

  Tridiag lm, lp;
  if (free_mode) {
    lm = free_block(g, prm);
    lp = lm;
  } else {
    lm = build_lminus(g, prm);
    lp = build_lplus(g, prm);
  }
  const MidpointMatrix mat(lm, lp, 0.25 * opt.dt * opt.dt);
  const RunProjector proj(g, prm, lm, lp, free_mode);

  TwoComponentField z = v0;
  proj.apply(z);

  std::vector<TwoComponentField> out;
  out.reserve(t_grid.size());
  double prev_t = 0.0;
  long steps_done = 0;

  const double dt = opt.dt;
  Eigen::VectorXd r1(n), r2(n), rhs(n);
  for (double t : t_grid) {
    // Samples advance from 0 in the direction of dt's sign (t_grid of
    // negative times with dt < 0 runs the reversed flow).
    const double k = (t - prev_t) / dt;
    const long nsteps = std::lround(k);
    if (nsteps < 0 || std::abs(k - static_cast<double>(nsteps)) > 1e-9)
      throw std::invalid_argument("propagator: t_grid must advance along dt and be commensurate with it");
    for (long s = 0; s < nsteps; ++s) {
      r1 = z.c1 + 0.5 * dt * lm.apply(z.c2);
      r2 = z.c2 - 0.5 * dt * lp.apply(z.c1);
      rhs = r1 + 0.5 * dt * lm.apply(r2);
      mat.solve(rhs);
      z.c1 = rhs;
      z.c2 = r2 - 0.5 * dt * lp.apply(rhs);
      ++steps_done;
      if (opt.reproject_every > 0 && steps_done % opt.reproject_every == 0) proj.apply(z);
    }
    prev_t = t;
    out.push_back(z);
  }
  return out;
}

DecaySeries measure_decay(const SolitonParams& prm, const TwoComponentField& v0,
                          const std::vector<double>& t_grid, const PropagatorOptions& opt,
                          double alpha, double r) {
  auto fields = propagate(prm, v0, t_grid, opt);
  const Grid& g = opt.grid;
  const double h = g.h();
  DecaySeries s;
  s.alpha = alpha;
  s.r = r;
  for (size_t k = 0; k < fields.size(); ++k) {
    const auto& f = fields[k];
    double mx = 0.0, mxw = 0.0, sq = 0.0, sqw = 0.0, pr = 0.0;
    for (int i = 0; i < g.size(); ++i) {
      const double a = std::hypot(f.c1[i], f.c2[i]);
      const double x = g.x(i);
      mx = std::max(mx, a);
      mxw = std::max(mxw, a * weight_pow(x, 1.0));
      sq += a * a;
      sqw += a * a * weight_pow(x, 2.0 * alpha);
      pr += std::pow(a, r);
    }
    s.times.push_back(t_grid[k]);
    s.linf.push_back(mx);
    s.linf_loc.push_back(mxw);
    s.l2.push_back(std::sqrt(h * sq));
    s.l2w.push_back(std::sqrt(h * sqw));
    s.lr.push_back(std::pow(h * pr, 1.0 / r));
  }
  return s;
}

DecayFit fit_decay(const DecaySeries& s, DecayNorm key, double t_lo, double t_hi) {
  const std::vector<double>* y = nullptr;
  switch (key) {
    case DecayNorm::linf: y = &s.linf; break;
    case DecayNorm::linf_loc: y = &s.linf_loc; break;
    case DecayNorm::l2: y = &s.l2; break;
    case DecayNorm::l2_weighted: y = &s.l2w; break;
    case DecayNorm::lr: y = &s.lr; break;
  }
  std::vector<double> lx, ly;
  for (size_t k = 0; k < s.times.size(); ++k) {
    const double t = s.times[k], v = (*y)[k];
    if (t >= t_lo && t <= t_hi && t > 0.0 && v > 0.0) {
      lx.push_back(std::log(t));
      ly.push_back(std::log(v));
    }
  }
  const int m = static_cast<int>(lx.size());
  if (m < 10) throw std::invalid_argument("fit_decay: fewer than 10 samples in the window");
  double sx = 0.0, sy = 0.0;
  for (int k = 0; k < m; ++k) {
    sx += lx[k];
    sy += ly[k];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (int k = 0; k < m; ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  DecayFit fit;
  fit.samples = m;
  fit.slope = sxy / sxx;
  double rss = 0.0;
  for (int k = 0; k < m; ++k) {
    const double e = ly[k] - my - fit.slope * (lx[k] - mx);
    rss += e * e;
  }
  fit.half_width = 2.0 * std::sqrt(rss / (m - 2) / sxx);
  return fit;
}

} // namespace dnls
