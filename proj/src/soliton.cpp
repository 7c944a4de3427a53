#include "dnls/soliton.hpp"

#include <cmath>
#include <stdexcept>

#include "dnls/quad.hpp"

namespace dnls {

namespace {

// log cosh(t) without overflow, t any sign
double log_cosh(double t) {
  double a = std::abs(t);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// log sinh(t), t > 0
double log_sinh(double t) {
  return t + std::log1p(-std::exp(-2.0 * t)) - std::log(2.0);
}

struct ProfileTerms {
  double theta;     // p sqrt(w/2) |x| + c(w)
  double theta_w;   // d theta / d omega
  double theta_ww;  // d^2 theta / d omega^2
  double T;         // tanh(theta) focusing, coth(theta) defocusing
  double Tp;        // dT/dtheta
  double logQ;
  bool focusing;
};

ProfileTerms eval_terms(const SolitonParams& sp, double x) {
  sp.validate();
  const double w = sp.omega, p = sp.p, aq = std::abs(sp.q);
  const double s2w = std::sqrt(2.0 * w);
  const double ax = std::abs(x);

  ProfileTerms t;
  t.focusing = sp.focusing();
  double c, cw, cww;
  if (t.focusing) {
    c = std::atanh(aq / s2w);
    const double d = 2.0 * w - sp.q * sp.q; // > 0
    cw = -aq / (s2w * d);
    cww = aq * (1.0 / (s2w * s2w * s2w * d) + 2.0 / (s2w * d * d));
  } else {
    c = std::atanh(s2w / aq);
    const double d = sp.q * sp.q - 2.0 * w; // > 0
    cw = aq / (s2w * d);
    cww = aq * (-1.0 / (s2w * s2w * s2w * d) + 2.0 / (s2w * d * d));
  }
  t.theta = p * std::sqrt(0.5 * w) * ax + c;
  t.theta_w = 0.5 * p * ax / s2w + cw;
  t.theta_ww = -0.5 * p * ax / (s2w * s2w * s2w) + cww;

  const double amp = std::log(0.5 * (p + 2.0) * w) / p;
  if (t.focusing) {
    t.T = std::tanh(t.theta);
    t.Tp = 1.0 - t.T * t.T;
    t.logQ = amp - (2.0 / p) * log_cosh(t.theta);
  } else {
    t.T = 1.0 / std::tanh(t.theta);
    t.Tp = 1.0 - t.T * t.T; // d coth/dtheta = -csch^2 = 1 - coth^2
    t.logQ = amp - (2.0 / p) * log_sinh(t.theta);
  }
  return t;
}

} // namespace

double soliton_profile(const SolitonParams& sp, double x) {
  return std::exp(eval_terms(sp, x).logQ);
}

double soliton_dx(const SolitonParams& sp, double x) {
  ProfileTerms t = eval_terms(sp, x);
  double sgn = (x < 0.0) ? -1.0 : 1.0; // x = 0 treated as 0+
  return -sgn * std::sqrt(2.0 * sp.omega) * t.T * std::exp(t.logQ);
}

double soliton_domega(const SolitonParams& sp, double x) {
  ProfileTerms t = eval_terms(sp, x);
  double dlog = 1.0 / (sp.p * sp.omega) - (2.0 / sp.p) * t.T * t.theta_w;
  return dlog * std::exp(t.logQ);
}

double soliton_domega2(const SolitonParams& sp, double x) {
  ProfileTerms t = eval_terms(sp, x);
  const double p = sp.p, w = sp.omega;
  double dlog = 1.0 / (p * w) - (2.0 / p) * t.T * t.theta_w;
  double d2log = -1.0 / (p * w * w) -
                 (2.0 / p) * (t.Tp * t.theta_w * t.theta_w + t.T * t.theta_ww);
  return (dlog * dlog + d2log) * std::exp(t.logQ);
}

double tail_extent(const SolitonParams& sp) {
  double q0 = soliton_profile(sp, 0.0);
  double X = 1.0;
  while (soliton_profile(sp, X) > 1e-12 * q0) {
    X *= 1.5;
    if (X > 1e6) throw std::runtime_error("tail_extent: no decay found");
  }
  return X;
}

double soliton_mass(const SolitonParams& sp) {
  double X = tail_extent(sp);
  auto f = [&](double x) {
    double Q = soliton_profile(sp, x);
    return Q * Q;
  };
  return 2.0 * adaptive_simpson(f, 0.0, X, 1e-11);
}

double ip_q_domega(const SolitonParams& sp) {
  double X = tail_extent(sp);
  auto f = [&](double x) { return soliton_profile(sp, x) * soliton_domega(sp, x); };
  return 2.0 * adaptive_simpson(f, 0.0, X, 1e-12);
}

double mass_derivative(const SolitonParams& sp) { return 2.0 * ip_q_domega(sp); }

double critical_frequency(double q, double p) {
  if (!(p > 4.0)) throw std::invalid_argument("critical_frequency needs p > 4");
  SolitonParams sp;
  sp.q = q;
  sp.sigma = -1;
  sp.p = p;
  const double edge = sp.edge();

  auto g = [&](double w) { return ip_q_domega(sp.with_omega(w)); };

  double lo = edge * (1.0 + 1e-4);
  if (g(lo) <= 0.0) {
    lo = edge * (1.0 + 1e-7);
    if (g(lo) <= 0.0) throw std::runtime_error("critical_frequency: no positive side near edge");
  }
  double hi = 2.0 * lo;
  int tries = 0;
  while (g(hi) > 0.0) {
    hi *= 2.0;
    if (++tries > 60) throw std::runtime_error("critical_frequency: no sign change found");
  }
  // bisection; g > 0 at lo, < 0 at hi
  while (hi - lo > 1e-10) {
    double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double omega_identity_gap(double q, double p, double omega) {
  const double aq = std::abs(q);
  const double s2w = std::sqrt(2.0 * omega);
  const double a0 = std::atanh(aq / s2w);
  auto sech_pow = [&](double t) { return std::exp(-(4.0 / p) * log_cosh(t)); };
  double hi = a0 + 0.25 * p * 40.0; // integrand ~ e^{-4t/p}; tail < e^{-40}
  double lhs = (p - 4.0) / p * adaptive_simpson(sech_pow, a0, hi, 1e-13);
  double rhs = (aq / s2w) * std::pow(1.0 - q * q / (2.0 * omega), 2.0 / p - 1.0);
  return lhs - rhs;
}

double zero_frequency_profile(double q, double p, double x) {
  double denom = p * std::abs(q) * std::abs(x) + 2.0;
  return std::pow((p + 2.0) * q * q / (denom * denom), 1.0 / p);
}

} // namespace dnls
