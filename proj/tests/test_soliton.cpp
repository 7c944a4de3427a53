#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dnls/soliton.hpp"

using namespace dnls;

namespace {

SolitonParams foc(double p, double w) {
  SolitonParams s;
  s.q = -1.0;
  s.sigma = -1;
  s.p = p;
  s.omega = w;
  return s;
}

SolitonParams defoc(double p, double w) {
  SolitonParams s;
  s.q = -1.0;
  s.sigma = +1;
  s.p = p;
  s.omega = w;
  return s;
}

// residual of -1/2 Q'' + w Q + sigma Q^{p+1} at x != 0 (5-point stencil)
double stationary_residual(const SolitonParams& sp, double x, double h) {
  double m2 = soliton_profile(sp, x - 2 * h), m1 = soliton_profile(sp, x - h);
  double c0 = soliton_profile(sp, x);
  double p1 = soliton_profile(sp, x + h), p2 = soliton_profile(sp, x + 2 * h);
  double d2 = (-m2 + 16 * m1 - 30 * c0 + 16 * p1 - p2) / (12 * h * h);
  return -0.5 * d2 + sp.omega * c0 + sp.sigma * std::pow(c0, sp.p + 1.0);
}

double rel_gap(double a, double b) { return std::abs(a - b) / (std::abs(a) + std::abs(b) + 1e-300); }

} // namespace

TEST_CASE("profile carries the derivative jump of the delta potential") {
  for (const auto& sp : {foc(5.0, 1.5), foc(4.2, 2.3), foc(9.0, 0.7),
                         defoc(5.0, 0.3), defoc(4.5, 0.45), defoc(7.0, 0.05)}) {
    double Q0 = soliton_profile(sp, 0.0);
    double dQ0 = soliton_dx(sp, 0.0); // 0+ side; evenness gives the full jump 2qQ(0)
    CHECK(std::abs(dQ0 - sp.q * Q0) < 1e-12 * std::abs(Q0));
  }
}

TEST_CASE("profile solves the stationary equation away from the origin") {
  const double h = 0.01;
  for (const auto& sp : {foc(5.0, 1.5), foc(4.2, 2.3), defoc(5.0, 0.3), defoc(6.0, 0.45)}) {
    for (double x : {0.15, 0.6, 1.7, -0.9, 4.0}) {
      double scale = sp.omega * soliton_profile(sp, x);
      CHECK(std::abs(stationary_residual(sp, x, h)) < 1e-4 * scale);
    }
  }
}

TEST_CASE("profile is even and its derivative is odd") {
  auto sp = foc(5.0, 1.3);
  for (double x : {0.4, 1.1, 3.3}) {
    CHECK(soliton_profile(sp, -x) == soliton_profile(sp, x));
    CHECK(soliton_dx(sp, -x) == -soliton_dx(sp, x));
  }
}

TEST_CASE("analytic omega derivatives match finite differences") {
  const double dw = 1e-4;
  for (const auto& sp : {foc(5.0, 1.5), foc(4.3, 2.2), defoc(5.0, 0.3), defoc(6.0, 0.42)}) {
    for (double x : {0.0, 0.3, 1.0, 2.5}) {
      double fd1 = (soliton_profile(sp.with_omega(sp.omega + dw), x) -
                    soliton_profile(sp.with_omega(sp.omega - dw), x)) /
                   (2 * dw);
      double a1 = soliton_domega(sp, x);
      CHECK(std::abs(a1 - fd1) < 1e-6 * (std::abs(a1) + 1.0));

      // smaller step: fourth omega-derivatives grow near the defocusing edge
      const double dw2 = 2e-5;
      double fd2 = (soliton_domega(sp.with_omega(sp.omega + dw2), x) -
                    soliton_domega(sp.with_omega(sp.omega - dw2), x)) /
                   (2 * dw2);
      double a2 = soliton_domega2(sp, x);
      CHECK(std::abs(a2 - fd2) < 1e-6 * (std::abs(a2) + 1.0));
    }
  }
}

TEST_CASE("mass at the tabulated resonance frequencies") {
  // reference values computed independently with q = -1
  CHECK(rel_gap(soliton_mass(foc(5.0, 1.482)), 1.089) < 5e-3);
  CHECK(rel_gap(soliton_mass(foc(4.2, 2.278)), 1.286) < 5e-3);
  CHECK(rel_gap(soliton_mass(foc(6.2, 1.072)), 0.976) < 5e-3);
}

TEST_CASE("mass derivative agrees with differentiated quadrature") {
  auto sp = foc(5.0, 1.2);
  const double dw = 1e-3;
  double fd = (soliton_mass(sp.with_omega(sp.omega + dw)) -
               soliton_mass(sp.with_omega(sp.omega - dw))) /
              (2 * dw);
  double an = mass_derivative(sp);
  CHECK(std::abs(an - fd) < 1e-5 * std::abs(an));
}

TEST_CASE("critical frequency zeroes both characterizations") {
  for (double p : {4.5, 5.0, 6.0}) {
    double W = critical_frequency(-1.0, p);
    CHECK(W > 0.5);
    // independent scalar identity for the same root
    CHECK(std::abs(omega_identity_gap(-1.0, p, W)) < 1e-8);
    double below = W - 0.4 * (W - 0.5), above = W + 0.4 * (W - 0.5);
    CHECK(omega_identity_gap(-1.0, p, below) * omega_identity_gap(-1.0, p, above) < 0.0);
    // mass slope changes sign from + to - across W
    CHECK(ip_q_domega(foc(p, 0.5 + 0.3 * (W - 0.5))) > 0.0);
    CHECK(ip_q_domega(foc(p, W + (W - 0.5))) < 0.0);
  }
}

TEST_CASE("critical frequency decreases toward the spectral edge as p grows") {
  double w45 = critical_frequency(-1.0, 4.5);
  double w5 = critical_frequency(-1.0, 5.0);
  double w6 = critical_frequency(-1.0, 6.0);
  double w8 = critical_frequency(-1.0, 8.0);
  CHECK(w45 > w5);
  CHECK(w5 > w6);
  CHECK(w6 > w8);
  CHECK(w8 > 0.5);
  // regression pin, cross-validated against the integral identity above
  CHECK(std::abs(w5 - 5.85163262) < 1e-6);
}

TEST_CASE("defocusing mass decreases in omega") {
  double m1 = soliton_mass(defoc(5.0, 0.1));
  double m2 = soliton_mass(defoc(5.0, 0.25));
  double m3 = soliton_mass(defoc(5.0, 0.4));
  CHECK(m1 > m2);
  CHECK(m2 > m3);
  CHECK(ip_q_domega(defoc(5.0, 0.25)) < 0.0);
}

TEST_CASE("zero frequency endpoint of the defocusing branch") {
  for (double p : {4.5, 5.0}) {
    auto sp = defoc(p, 1e-5);
    for (double x : {0.0, 1.0, 5.0}) {
      CHECK(rel_gap(soliton_profile(sp, x), zero_frequency_profile(-1.0, p, x)) < 1e-3);
    }
  }
  // algebraic tail exponent -2/p in log-log slope
  double p = 5.0;
  double slope = (std::log(zero_frequency_profile(-1.0, p, 1e4)) -
                  std::log(zero_frequency_profile(-1.0, p, 1e3))) /
                 std::log(10.0);
  CHECK(std::abs(slope + 2.0 / p) < 1e-4);
}

TEST_CASE("near the spectral edge the shape collapses onto the bound state") {
  auto sp = foc(5.0, 0.5 * (1.0 + 1e-6));
  double Q0 = soliton_profile(sp, 0.0);
  for (double x : {1.0, 2.0}) {
    CHECK(std::abs(soliton_profile(sp, x) / Q0 - std::exp(-x)) < 1e-5);
  }
}

TEST_CASE("parameter validation rejects out-of-regime input") {
  SolitonParams s;
  s.q = 1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  CHECK_THROWS_AS(foc(5.0, 0.3).validate(), std::invalid_argument);   // below edge
  CHECK_THROWS_AS(defoc(5.0, 0.7).validate(), std::invalid_argument); // above edge
  s = foc(5.0, 1.0);
  s.sigma = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
