#include "dnls/shooter.hpp"

#include <lapacke.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dnls/soliton.hpp"

namespace dnls {

namespace {

// unknown layout: idx(j,k) = 2j + k with k = 0:f1, 1:g2
constexpr int KL = 3; // widest reach below the diagonal (far ghost fold)
constexpr int KU = 2; // widest reach above (next-node coupling)

struct Banded {
  int n;
  int ldab = 2 * KL + KU + 1;
  std::vector<double> ab;  // col-major LAPACK band storage
  std::vector<double> rhs;

  explicit Banded(int n_) : n(n_), ab(static_cast<size_t>(ldab) * n_, 0.0), rhs(n_, 0.0) {}

  void add(int i, int j, double v) { ab[static_cast<size_t>(j) * ldab + (KL + KU + i - j)] += v; }
};

} // namespace

BvpSolution solve_edge_bvp(const SolitonParams& sp, Parity parity, const ShooterOptions& opt) {
  sp.validate();
  const double h = opt.h, x0 = opt.x0;
  const int n = static_cast<int>(std::lround(x0 / h));
  if (n < 10) throw std::invalid_argument("x0/h too small");
  if (std::pow(soliton_profile(sp, x0), sp.p) >= 1e-12)
    throw std::invalid_argument("x0 too small: potential tail not negligible");

  // The four real equations decouple into closed pairs: (f1, g2) obeying
  // L+ f1 = omega g2, L- g2 = omega f1, and (f2, g1) obeying the same system
  // with flipped sign of g1. Multiplying a complex solution by i swaps the
  // pairs, so the full solution space is the complexification of the (f1, g2)
  // system and the gauge f2 = g1 = 0 is exact. Solving only the (f1, g2)
  // block keeps the linear system square: imposing the far pairings on top of
  // f1(x0) = 1, f1'(x0) = 0 would overdetermine it (and dgbsv flags the
  // leftover (f2, g1) block as singular).
  const int ntot = 2 * (n + 1);
  Banded sys(ntot);
  auto idx = [](int j, int k) { return 2 * j + k; }; // k = 0:f1, 1:g2

  const double inv2h2 = 0.5 / (h * h);
  for (int j = 1; j < n; ++j) {
    double qp = std::pow(soliton_profile(sp, j * h), sp.p);
    double vm = sp.omega + sp.sigma * qp;              // L- potential part
    double vp = sp.omega + sp.sigma * (sp.p + 1) * qp; // L+ potential part
    // L+ f1 - omega g2 = 0
    int r = idx(j, 0);
    sys.add(r, idx(j - 1, 0), -inv2h2);
    sys.add(r, idx(j, 0), 2 * inv2h2 + vp);
    sys.add(r, idx(j + 1, 0), -inv2h2);
    sys.add(r, idx(j, 1), -sp.omega);
    // L- g2 - omega f1 = 0
    r = idx(j, 1);
    sys.add(r, idx(j - 1, 1), -inv2h2);
    sys.add(r, idx(j, 1), 2 * inv2h2 + vm);
    sys.add(r, idx(j + 1, 1), -inv2h2);
    sys.add(r, idx(j, 0), -sp.omega);
  }

  // x = 0, even parity: fold the centered equation with the ghost node
  // u_{-1} = u_1 - 2 h q u_0 implied by the jump condition u'(0+) = q u(0).
  // This matches the delta row of the discrete Hamiltonian and keeps the
  // truncation constant small where u''' is large. Odd parity: u(0) = 0.
  {
    double qp0 = std::pow(soliton_profile(sp, 0.0), sp.p);
    double pot0[2] = {sp.omega + sp.sigma * (sp.p + 1) * qp0,
                      sp.omega + sp.sigma * qp0};
    for (int k = 0; k < 2; ++k) {
      int r = idx(0, k);
      if (parity == Parity::even) {
        sys.add(r, idx(0, k), 1.0 / (h * h) + sp.q / h + pot0[k]);
        sys.add(r, idx(1, k), -1.0 / (h * h));
        sys.add(r, idx(0, 1 - k), -sp.omega);
      } else {
        sys.add(r, idx(0, k), 1.0);
      }
    }
  }

  // x = x0: a Neumann condition u'(x0) = 0 folds the centered equation with
  // the reflected ghost node u_{n+1} = u_{n-1}.
  double qpn = std::pow(soliton_profile(sp, x0), sp.p);
  auto far_neumann_eq = [&](int r, int k) {
    double pot = sp.omega + sp.sigma * (k == 0 ? sp.p + 1 : 1.0) * qpn;
    sys.add(r, idx(n, k), 1.0 / (h * h) + pot);
    sys.add(r, idx(n - 1, k), -1.0 / (h * h));
    sys.add(r, idx(n, 1 - k), -sp.omega);
  };

  if (opt.far_neumann_all) {
    far_neumann_eq(idx(n, 0), 0);
    far_neumann_eq(idx(n, 1), 1);
  } else {
    sys.add(idx(n, 0), idx(n, 0), 1.0); // f1(x0) = 1
    sys.rhs[idx(n, 0)] = 1.0;
    far_neumann_eq(idx(n, 1), 0);       // f1'(x0) = 0, housed in the g2 slot
  }

  std::vector<lapack_int> ipiv(ntot);
  lapack_int info = LAPACKE_dgbsv(LAPACK_COL_MAJOR, ntot, KL, KU, 1, sys.ab.data(), sys.ldab,
                                  ipiv.data(), sys.rhs.data(), ntot);
  BvpSolution sol;
  sol.omega = sp.omega;
  sol.parity = parity;
  sol.h = h;
  sol.f1.resize(n + 1);
  sol.g2.resize(n + 1);
  sol.f2 = Eigen::VectorXd::Zero(n + 1);
  sol.g1 = Eigen::VectorXd::Zero(n + 1);
  if (info > 0) {
    sol.singular = true;
    sol.f1.setZero();
    sol.g2.setZero();
    return sol;
  }
  if (info < 0) throw std::runtime_error("dgbsv: bad argument " + std::to_string(-info));
  for (int j = 0; j <= n; ++j) {
    sol.f1[j] = sys.rhs[idx(j, 0)];
    sol.g2[j] = sys.rhs[idx(j, 1)];
  }
  return sol;
}

double flatness(const BvpSolution& sol, double window_frac) {
  if (sol.singular) return std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(sol.f1.size()) - 1;
  const int j0 = static_cast<int>(std::floor((1.0 - window_frac) * n));
  double sum = 0.0;
  int count = 0;
  for (const auto* u : {&sol.f1, &sol.f2, &sol.g1, &sol.g2}) {
    for (int j = j0; j < n; ++j) {
      double d = ((*u)[j + 1] - (*u)[j]) / sol.h;
      sum += d * d;
      ++count;
    }
  }
  return std::sqrt(sum / count);
}

ResonanceScan scan_resonances(const SolitonParams& base, Parity parity, double lo, double hi,
                              int n_samples, const ShooterOptions& opt) {
  if (!(hi > lo) || n_samples < 3) throw std::invalid_argument("bad scan range");
  ResonanceScan out;
  out.points.reserve(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    double w = lo + (hi - lo) * i / (n_samples - 1);
    double f = flatness(solve_edge_bvp(base.with_omega(w), parity, opt));
    out.points.push_back({w, f});
  }
  for (size_t i = 1; i + 1 < out.points.size(); ++i) {
    double f = out.points[i].flat;
    if (std::isfinite(f) && f < out.points[i - 1].flat && f < out.points[i + 1].flat)
      out.minima.push_back(out.points[i]);
  }
  return out;
}

double refine_resonance(const SolitonParams& base, Parity parity, double lo, double hi,
                        const ShooterOptions& opt) {
  const int pts = 21; // interior minimum shrinks the bracket by 10x per round
  while (hi - lo > 1e-5) {
    int best = -1;
    double best_f = std::numeric_limits<double>::infinity();
    for (int i = 0; i < pts; ++i) {
      double w = lo + (hi - lo) * i / (pts - 1);
      double f = flatness(solve_edge_bvp(base.with_omega(w), parity, opt));
      if (f < best_f) {
        best_f = f;
        best = i;
      }
    }
    if (best <= 0 || best >= pts - 1)
      throw std::runtime_error("resonance minimum escaped the bracket");
    double step = (hi - lo) / (pts - 1);
    double mid = lo + best * step;
    lo = mid - step;
    hi = mid + step;
  }
  return 0.5 * (lo + hi);
}

double refine_resonance_extrapolated(const SolitonParams& base, Parity parity, double lo,
                                     double hi, const ShooterOptions& opt) {
  double wh = refine_resonance(base, parity, lo, hi, opt);
  ShooterOptions fine = opt;
  fine.h = 0.5 * opt.h;
  // The minimizer moves by roughly C h^2 between the meshes; bracket the fine
  // pass around the coarse result, widening once if the shift is unusually
  // large.
  double pad = 0.03 * std::max(std::abs(wh), 1.0);
  for (int attempt = 0;; ++attempt) {
    try {
      double wf = refine_resonance(base, parity, wh - pad, wh + pad, fine);
      return (4.0 * wf - wh) / 3.0;
    } catch (const std::runtime_error&) {
      if (attempt >= 1) throw;
      pad *= 4.0;
    }
  }
}

int scan_samples(double lo, double hi) {
  return static_cast<int>(std::ceil(200.0 * std::log10(hi / lo))) + 1;
}

std::vector<TableRow> resonance_table(double q, const std::vector<double>& ps,
                                      const ShooterOptions& opt) {
  std::vector<TableRow> rows;
  for (double p : ps) {
    SolitonParams sp;
    sp.q = q;
    sp.sigma = -1;
    sp.p = p;
    TableRow row;
    row.p = p;
    row.Omega = critical_frequency(q, p);

    const double edge = sp.edge();
    auto deepest = [](const ResonanceScan& scan) {
      const ScanPoint* best = nullptr;
      for (const auto& m : scan.minima)
        if (!best || m.flat < best->flat) best = &m;
      if (!best) throw std::runtime_error("no flatness minimum in scan range");
      return best->omega;
    };

    { // even resonance and the mass there
      double lo = 1.2 * edge, hi = 6.6 * edge;
      sp.omega = 2.0 * edge;
      auto scan = scan_resonances(sp, Parity::even, lo, hi, scan_samples(lo, hi), opt);
      double w = deepest(scan);
      double dw = (hi - lo) / (scan.points.size() - 1);
      row.omega1 = refine_resonance_extrapolated(sp, Parity::even, w - dw, w + dw, opt);
      row.mass = soliton_mass(sp.with_omega(row.omega1));
    }
    { // odd resonance
      double lo = 8.0 * edge, hi = 130.0 * edge;
      auto scan = scan_resonances(sp, Parity::odd, lo, hi, scan_samples(lo, hi), opt);
      double w = deepest(scan);
      double dw = (hi - lo) / (scan.points.size() - 1);
      row.omega2 = refine_resonance_extrapolated(sp, Parity::odd, w - dw, w + dw, opt);
    }
    rows.push_back(row);
  }
  return rows;
}

} // namespace dnls
