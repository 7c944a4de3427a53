#pragma once

#include "dnls/params.hpp"

namespace dnls {

/// Q_omega(x) from the closed form (cosh branch focusing, sinh branch
/// defocusing). Even in x, strictly positive, kink at 0 carrying the jump
/// condition Q'(0+)-Q'(0-) = 2q Q(0).
double soliton_profile(const SolitonParams& sp, double x);

/// One-sided spatial derivative; for x = 0 returns the x->0+ limit.
double soliton_dx(const SolitonParams& sp, double x);

/// Analytic d/domega of the profile (hand-differentiated closed form).
double soliton_domega(const SolitonParams& sp, double x);

/// Analytic d^2/domega^2 of the profile.
double soliton_domega2(const SolitonParams& sp, double x);

/// Half-width X with Q(X) < 1e-12 * Q(0); truncation point for quadratures.
double tail_extent(const SolitonParams& sp);

/// M = int Q^2 dx, adaptive Simpson on [0,X] doubled by evenness.
double soliton_mass(const SolitonParams& sp);

/// <Q, dQ/domega> over the full line (sign decides stability regime).
double ip_q_domega(const SolitonParams& sp);

/// d/domega of the mass = 2 <Q, dQ/domega>.
double mass_derivative(const SolitonParams& sp);

/// Unique focusing frequency Omega with <Q,dQ/domega> = 0, p > 4.
/// Bracketing + bisection, absolute tolerance 1e-10 in omega.
double critical_frequency(double q, double p);

/// Residual lhs-rhs of the integral identity characterizing Omega:
/// (p-4)/p * int_{atanh(|q|/sqrt(2w))}^inf sech^{4/p}  =
/// |q|/sqrt(2w) * (1 - q^2/(2w))^{2/p-1}.
double omega_identity_gap(double q, double p, double omega);

/// Q_0(x) = [(p+2)q^2 / (p|q||x|+2)^2]^{1/p}, the omega=0 endpoint profile.
double zero_frequency_profile(double q, double p, double x);

} // namespace dnls
