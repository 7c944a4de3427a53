#include "dnls/modulation.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>

#include "dnls/soliton.hpp"

namespace dnls {

namespace {

bool regime_ok(const SolitonParams& base, double omega) {
  if (!std::isfinite(omega)) return false;
  const double edge = base.edge();
  return base.focusing() ? omega > edge + 1e-12 : (omega > 1e-12 && omega < edge - 1e-12);
}

Eigen::VectorXd sample_domega2(const Grid& g, const SolitonParams& sp) {
  Eigen::VectorXd v(g.size());
  for (int i = 0; i < g.size(); ++i) v[i] = soliton_domega2(sp, g.x(i));
  return v;
}

} // namespace

ModulationState decompose(const Grid& g, const SolitonParams& base, const Eigen::VectorXcd& u,
                          double phi_guess, double omega_guess) {
  base.validate();
  if (u.size() != g.size())
    throw std::invalid_argument("decompose: field size does not match the grid");

  const double h = g.h();
  double phi = phi_guess, omega = omega_guess;
  double res = 0.0;
  for (int it = 0; it < 50; ++it) {
    if (!regime_ok(base, omega))
      throw std::runtime_error("decompose: frequency left the regime valid for sigma");
    const SolitonParams sp = base.with_omega(omega);
    const Eigen::VectorXd q = sample_profile(g, sp);
    const Eigen::VectorXd dq = sample_domega(g, sp);
    const double q2 = h * q.squaredNorm();
    const std::complex<double> frame = std::polar(1.0, -phi);

    std::complex<double> sq = 0.0, sd = 0.0;
    for (int i = 0; i < g.size(); ++i) {
      const std::complex<double> w = frame * u[i];
      sq += w * q[i];
      sd += w * dq[i];
    }
    sq *= h;
    sd *= h;
    const double f1 = sq.real() - q2;
    const double f2 = sd.imag();
    res = std::abs(f1) + std::abs(f2);
    if (res < 1e-12 * q2) {
      ModulationState st;
      st.phi = phi;
      st.omega = omega;
      st.v = frame * u - q.cast<std::complex<double>>();
      return st;
    }

    std::complex<double> sdd = 0.0;
    const Eigen::VectorXd ddq = sample_domega2(g, sp);
    for (int i = 0; i < g.size(); ++i) sdd += frame * u[i] * ddq[i];
    sdd *= h;
    const double j11 = sq.imag();                         // dF1/dphi
    const double j12 = sd.real() - 2.0 * grid_ip(g, q, dq); // dF1/domega
    const double j21 = -sd.real();                        // dF2/dphi
    const double j22 = sdd.imag();                        // dF2/domega
    const double det = j11 * j22 - j12 * j21;
    if (std::abs(det) < 1e-300)
      throw std::runtime_error("decompose: singular Jacobian in the Newton iteration");
    const double dphi = (-f1 * j22 + f2 * j12) / det;
    const double domega = (f1 * j21 - f2 * j11) / det;

    // damp steps that would leave the valid frequency regime
    double scale = 1.0;
    for (int k = 0; k < 8 && !regime_ok(base, omega + scale * domega); ++k) scale *= 0.5;
    phi += scale * dphi;
    omega += scale * domega;
  }
  char msg[120];
  std::snprintf(msg, sizeof msg, "decompose: no convergence in 50 Newton steps; residual %.3e",
                res);
  throw std::runtime_error(msg);
}

Eigen::Vector2d ode_residual(const Grid& g, const SolitonParams& base, const ModulationState& st,
                             double thetadot, double omegadot, double* det_a,
                             Eigen::Vector2d* rhs_out) {
  const SolitonParams sp = base.with_omega(st.omega);
  const Eigen::VectorXd q = sample_profile(g, sp);
  const Eigen::VectorXd dq = sample_domega(g, sp);
  const Eigen::VectorXd ddq = sample_domega2(g, sp);
  const double h = g.h();
  const double p = sp.p;
  const double sig = static_cast<double>(sp.sigma);

  std::complex<double> vq = 0.0, vd = 0.0, vdd = 0.0;
  double rhs1 = 0.0, rhs2 = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const std::complex<double> vi = st.v[i];
    vq += vi * q[i];
    vd += vi * dq[i];
    vdd += vi * ddq[i];
    const double qp = std::pow(q[i], p);
    const std::complex<double> full = std::pow(std::abs(q[i] + vi), p) * (q[i] + vi);
    const std::complex<double> n =
        sig * (full - qp * q[i] - 0.5 * (p + 2.0) * qp * vi - 0.5 * p * qp * std::conj(vi));
    rhs1 += n.imag() * q[i];
    rhs2 -= n.real() * dq[i];
  }
  vq *= h;
  vd *= h;
  vdd *= h;
  rhs1 *= h;
  rhs2 *= h;

  const double qdq = grid_ip(g, q, dq);
  const double a11 = qdq - vd.real();
  const double a12 = -vq.imag();
  const double a21 = -vdd.imag();
  const double a22 = qdq + vd.real();
  if (det_a) *det_a = a11 * a22 - a12 * a21;
  if (rhs_out) *rhs_out = {rhs1, rhs2};

  const double scale = h * q.squaredNorm() * (std::abs(omegadot) + std::abs(thetadot) + 1e-300);
  return {(a11 * omegadot + a12 * thetadot - rhs1) / scale,
          (a21 * omegadot + a22 * thetadot - rhs2) / scale};
}

namespace {

// decomposition of every sample with continuation; returns states consumed
// by track(), truncating at the first unrecoverable failure
struct TrackedStates {
  std::vector<ModulationState> st;
  std::vector<bool> reseeded;
  int failure_index = -1;
};

TrackedStates decompose_all(const Trajectory& traj, double dt) {
  const EvolutionConfig& cfg = traj.config;
  const int m = static_cast<int>(traj.times.size());
  TrackedStates out;
  out.st.reserve(m);
  const double om0 = cfg.params.omega;
  for (int k = 0; k < m; ++k) {
    const double pg = k ? out.st[k - 1].phi + out.st[k - 1].omega * dt : 0.0;
    const double og = k ? out.st[k - 1].omega : om0;
    bool flag = false;
    try {
      out.st.push_back(decompose(cfg.grid, cfg.params, traj.fields[k], pg, og));
    } catch (const std::runtime_error&) {
      try {
        out.st.push_back(
            decompose(cfg.grid, cfg.params, traj.fields[k], k ? out.st[k - 1].phi : 0.0, om0));
        flag = true;
      } catch (const std::runtime_error&) {
        out.failure_index = k;
        break;
      }
    }
    out.reseeded.push_back(flag);
  }
  return out;
}

} // namespace

ModulationSeries track(const Trajectory& traj, double r, const Trajectory* baseline) {
  const EvolutionConfig& cfg = traj.config;
  const int m = static_cast<int>(traj.times.size());
  if (m < 2) throw std::invalid_argument("track: need at least two samples");
  const double dt = traj.times[1] - traj.times[0];
  for (int k = 0; k + 1 < m; ++k)
    if (std::abs(traj.times[k + 1] - traj.times[k] - dt) > 1e-9)
      throw std::invalid_argument("track: samples are not uniformly spaced");
  if (baseline) {
    if (baseline->times.size() != traj.times.size() ||
        baseline->config.grid.size() != cfg.grid.size())
      throw std::invalid_argument("track: baseline does not match the trajectory sampling");
    for (int k = 0; k < m; ++k)
      if (std::abs(baseline->times[k] - traj.times[k]) > 1e-9)
        throw std::invalid_argument("track: baseline does not match the trajectory sampling");
  }

  ModulationSeries s;
  s.params = cfg.params;
  s.grid = cfg.grid;
  s.alpha = cfg.alpha;
  s.r = r;
  s.eta = cfg.perturbation.eta;

  TrackedStates ts = decompose_all(traj, dt);
  s.failure_index = ts.failure_index;
  TrackedStates bs;
  if (baseline) {
    bs = decompose_all(*baseline, dt);
    if (bs.failure_index >= 0 && bs.failure_index < static_cast<int>(ts.st.size())) {
      s.failure_index = bs.failure_index;
      ts.st.resize(bs.failure_index);
    }
  }
  const std::vector<ModulationState>& st = ts.st;

  const int n = static_cast<int>(st.size());
  const Grid& g = cfg.grid;
  const double h = g.h();
  const auto dot_pair = [&](const std::vector<ModulationState>& v, int k, int lo, int hi,
                            double span) {
    const double thetadot = (v[hi].phi - v[lo].phi) / span - v[k].omega;
    const double omegadot = (v[hi].omega - v[lo].omega) / span;
    return std::pair<double, double>{thetadot, omegadot};
  };
  double omega_int = 0.0; // trapezoid of omega from t=0
  for (int k = 0; k < n; ++k) {
    if (k > 0) omega_int += 0.5 * (st[k].omega + st[k - 1].omega) * dt;
    const int lo = std::max(k - 1, 0), hi = std::min(k + 1, n - 1);
    const double span = (hi - lo) * dt;
    auto [thetadot, omegadot] = dot_pair(st, k, lo, hi, span);
    ModulationState cal = st[k];
    if (baseline) {
      auto [btd, bod] = dot_pair(bs.st, k, lo, hi, span);
      thetadot -= btd;
      omegadot -= bod;
      cal.v -= bs.st[k].v;
    }

    ModulationSample out;
    out.t = traj.times[k];
    out.theta = st[k].phi - omega_int;
    out.omega = st[k].omega;
    out.thetadot = thetadot;
    out.omegadot = omegadot;
    out.reseeded = ts.reseeded[k];

    const Eigen::VectorXcd& v = cal.v;
    double grad = 0.0, lr = 0.0, l2w = 0.0;
    for (int i = 0; i < g.size(); ++i) {
      const double a2 = std::norm(v[i]);
      if (i + 1 < g.size()) grad += std::norm(v[i + 1] - v[i]) / (h * h);
      lr += std::pow(a2, 0.5 * r);
      const double x = g.x(i);
      l2w += std::pow(1.0 + x * x, -s.alpha) * a2;
    }
    out.v_h1 = std::sqrt(h * (v.squaredNorm() + grad));
    out.v_lr = std::pow(h * lr, 1.0 / r);
    out.v_l2w = std::sqrt(h * l2w);

    double det = 0.0;
    Eigen::Vector2d rhs;
    out.ode_residual = ode_residual(g, cfg.params, cal, thetadot, omegadot, &det, &rhs).norm();
    out.rhs_norm = rhs.norm();
    out.det_a = det;
    s.samples.push_back(out);
  }
  return s;
}

DecayReport decay_report(const ModulationSeries& s, double t_min, double t_max, double lr_tol,
                         double weighted_tol) {
  if (t_min <= 0.0) throw std::invalid_argument("decay_report: window must start at t > 0");
  double slt = 0.0, sllr = 0.0, slw = 0.0, sltt = 0.0, sltlr = 0.0, sltw = 0.0;
  int cnt = 0;
  for (const ModulationSample& m : s.samples) {
    if (m.t < t_min || m.t > t_max || m.v_lr <= 0.0 || m.v_l2w <= 0.0) continue;
    const double lt = std::log(m.t);
    slt += lt;
    sltt += lt * lt;
    sllr += std::log(m.v_lr);
    slw += std::log(m.v_l2w);
    sltlr += lt * std::log(m.v_lr);
    sltw += lt * std::log(m.v_l2w);
    ++cnt;
  }
  if (cnt < 20) throw std::invalid_argument("decay_report: window holds fewer than 20 samples");

  DecayReport rep;
  const double denom = cnt * sltt - slt * slt;
  rep.lr_slope = (cnt * sltlr - slt * sllr) / denom;
  rep.weighted_slope = (cnt * sltw - slt * slw) / denom;
  rep.lr_target = -(0.5 - 1.0 / s.r);
  rep.weighted_target = -s.alpha;
  rep.lr_ok = std::abs(rep.lr_slope - rep.lr_target) <= lr_tol;
  rep.weighted_ok = std::abs(rep.weighted_slope - rep.weighted_target) <= weighted_tol;

  double h1 = 0.0;
  for (const ModulationSample& m : s.samples) h1 = std::max(h1, m.v_h1);
  rep.h1_sup_over_eta = h1 / (s.eta > 0.0 ? s.eta : 1.0);

  const int n = static_cast<int>(s.samples.size());
  rep.scattering_max_rise = 0.0;
  for (int k = 2 * n / 3; k + 1 < n; ++k) {
    const double prev = s.samples[k].v_l2w;
    if (prev <= 0.0) continue;
    rep.scattering_max_rise =
        std::max(rep.scattering_max_rise, s.samples[k + 1].v_l2w / prev - 1.0);
  }
  rep.scattering_ok = rep.scattering_max_rise <= 0.05;
  return rep;
}

} // namespace dnls
