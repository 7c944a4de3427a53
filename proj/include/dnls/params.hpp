#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace dnls {

/// Parameters of i u_t = -1/2 u_xx + q delta_0 u + sigma |u|^p u and of the
/// solitary wave Q_omega attached to it.
///
/// Regime rules: q < 0 always; defocusing (sigma=+1) waves exist for
/// 0 < omega < q^2/2, focusing (sigma=-1) waves for omega > q^2/2.
struct SolitonParams {
  double q = -1.0;    // delta coupling, attractive
  int sigma = -1;     // -1 focusing, +1 defocusing
  double p = 5.0;     // nonlinearity power
  double omega = 1.0; // frequency

  double edge() const { return 0.5 * q * q; }
  bool focusing() const { return sigma < 0; }

  void validate() const {
    if (q >= 0.0) throw std::invalid_argument("q must be negative (attractive delta)");
    if (p <= 0.0) throw std::invalid_argument("p must be positive");
    if (sigma != 1 && sigma != -1) throw std::invalid_argument("sigma must be +1 or -1");
    if (focusing()) {
      if (!(omega > edge()))
        throw std::invalid_argument("focusing regime needs omega > q^2/2, got omega=" +
                                    std::to_string(omega));
    } else {
      if (!(omega > 0.0 && omega < edge()))
        throw std::invalid_argument("defocusing regime needs 0 < omega < q^2/2, got omega=" +
                                    std::to_string(omega));
    }
  }

  SolitonParams with_omega(double w) const {
    SolitonParams s = *this;
    s.omega = w;
    return s;
  }
};

} // namespace dnls
