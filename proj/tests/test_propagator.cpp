#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dnls/propagator.hpp"
#include "dnls/shooter.hpp"
#include "dnls/soliton.hpp"

using namespace dnls;

namespace {

SolitonParams foc(double w = 1.0) {
  SolitonParams s;
  s.q = -1.0;
  s.sigma = -1;
  s.p = 5.0;
  s.omega = w;
  return s;
}

// Gaussian of width s in the first component; spectral content ~ 3/s keeps
// the pre-reflection era t < X s / 6.
TwoComponentField bump(const Grid& g, double s, bool odd = false) {
  TwoComponentField f;
  f.c1.resize(g.size());
  f.c2 = Eigen::VectorXd::Zero(g.size());
  for (int i = 0; i < g.size(); ++i) {
    double x = g.x(i);
    f.c1[i] = (odd ? x : 1.0) * std::exp(-0.5 * (x / s) * (x / s));
  }
  return f;
}

std::vector<double> times(double a, double b, double step) {
  std::vector<double> t;
  for (double v = a; v <= b + 1e-12; v += step) t.push_back(v);
  return t;
}

double sup(const TwoComponentField& f) {
  return std::max(f.c1.cwiseAbs().maxCoeff(), f.c2.cwiseAbs().maxCoeff());
}

} // namespace

TEST_CASE("projection annihilates the generalized kernel and is idempotent") {
  SolitonParams prm = foc();
  PropagatorOptions opt;
  const Grid& g = opt.grid;

  TwoComponentField k1, k2;
  k1.c1 = sample_domega(g, prm);
  k1.c2 = Eigen::VectorXd::Zero(g.size());
  k2.c1 = Eigen::VectorXd::Zero(g.size());
  k2.c2 = sample_profile(g, prm);

  // Kernel parts of the sampled pair per the module's own projector; the
  // continuum-sampled vectors lie within O(h^2) of the discrete directions.
  TwoComponentField p1 = project_for(prm, k1, opt);
  TwoComponentField p2 = project_for(prm, k2, opt);
  TwoComponentField v0;
  v0.c1 = k1.c1 - p1.c1;
  v0.c2 = k2.c2 - p2.c2;
  CHECK(v0.c1.norm() > 0.9 * k1.c1.norm());
  CHECK(v0.c2.norm() > 0.9 * k2.c2.norm());

  const double scale = sup(v0);
  TwoComponentField pv = project_for(prm, v0, opt);
  CHECK(sup(pv) <= 1e-10 * scale);

  auto fields = propagate(prm, v0, {1.0, 3.0, 5.0}, opt);
  for (const auto& f : fields) CHECK(sup(f) <= 1e-8 * scale);

  // Idempotency on generic data.
  TwoComponentField b = bump(g, 2.0);
  TwoComponentField pb = project_for(prm, b, opt);
  TwoComponentField ppb = project_for(prm, pb, opt);
  CHECK((ppb.c1 - pb.c1).cwiseAbs().maxCoeff() <= 1e-12 * sup(pb));
  CHECK((ppb.c2 - pb.c2).cwiseAbs().maxCoeff() <= 1e-12 * sup(pb));
}

TEST_CASE("free mode matches the exact eigensolver oracle") {
  SolitonParams prm = foc();
  PropagatorOptions opt;
  opt.grid = Grid{100.0, 500}; // h = 0.2 keeps the dense solve cheap
  opt.potential_scale = 0.0;
  const Grid& g = opt.grid;
  const int n = g.size();

  // Odd data is orthogonal to the (even) bound state automatically.
  TwoComponentField v0 = bump(g, 1.0, true);

  Tridiag H = build_hamiltonian(g, prm.q);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H.dense());
  REQUIRE(eig.info() == Eigen::Success);
  Eigen::VectorXd c = eig.eigenvectors().transpose() * v0.c1;

  auto tg = times(0.5, 20.0, 0.5);
  DecaySeries oracle;
  oracle.times = tg;
  for (double t : tg) {
    double mx = 0.0;
    Eigen::VectorXcd u =
        eig.eigenvectors() *
        (c.array() * (std::complex<double>(0, -1) * (eig.eigenvalues().array() + prm.omega) * t)
                         .exp())
            .matrix();
    for (int i = 0; i < n; ++i) mx = std::max(mx, std::abs(u[i]));
    oracle.linf.push_back(mx);
    oracle.linf_loc.push_back(1.0);
    oracle.l2.push_back(1.0);
    oracle.l2w.push_back(1.0);
    oracle.lr.push_back(1.0);
  }

  DecaySeries s = measure_decay(prm, v0, tg, opt);
  DecayFit fo = fit_decay(oracle, DecayNorm::linf, 2.0, 14.0);
  DecayFit fm = fit_decay(s, DecayNorm::linf, 2.0, 14.0);
  CHECK(fo.slope == doctest::Approx(-0.5).epsilon(0.2)); // -0.5 +- 0.1
  CHECK(std::abs(fm.slope - fo.slope) < 0.02);

  // Terminal field at t = 5: the only separation is time discretization.
  Eigen::VectorXcd uex =
      eig.eigenvectors() *
      (c.array() *
       (std::complex<double>(0, -1) * (eig.eigenvalues().array() + prm.omega) * 5.0).exp())
          .matrix();
  auto fld = propagate(prm, v0, {5.0}, opt);
  double err = 0.0, nrm = 0.0;
  for (int i = 0; i < n; ++i) {
    std::complex<double> un(fld[0].c1[i], fld[0].c2[i]);
    err += std::norm(un - uex[i]);
    nrm += std::norm(uex[i]);
  }
  CHECK(std::sqrt(err / nrm) < 2e-3);

  // The self-adjoint flow conserves the L^2 norm; the Cayley step is exact
  // on it, so the drift is pure roundoff.
  double mx = 0.0, mn = 1e300;
  for (double v : s.l2) {
    mx = std::max(mx, v);
    mn = std::min(mn, v);
  }
  CHECK(mx / mn - 1.0 < 1e-2);
  CHECK(mx / mn - 1.0 < 1e-10);
}

TEST_CASE("dispersive rates at omega = 1 and their resonance degradation") {
  SolitonParams prm = foc();
  PropagatorOptions opt;
  opt.grid = Grid{400.0, 8000}; // doubled box delays the finite-box floor
  TwoComponentField v0 = bump(opt.grid, 2.0);
  auto tg = times(1.0, 90.0, 1.0);

  DecaySeries s = measure_decay(prm, v0, tg, opt);
  for (size_t i = 0; i < s.times.size(); ++i) {
    CHECK(s.linf[i] > 0.0);
    if (i > 0) CHECK(s.times[i] > s.times[i - 1]);
  }

  DecayFit fi = fit_decay(s, DecayNorm::linf, 30.0, 90.0);
  DecayFit fl = fit_decay(s, DecayNorm::linf_loc, 30.0, 90.0);
  DecayFit fw = fit_decay(s, DecayNorm::l2_weighted, 30.0, 90.0);
  DecayFit fr = fit_decay(s, DecayNorm::lr, 30.0, 90.0);
  CHECK(fi.slope == doctest::Approx(-0.5).epsilon(0.2));    // -1/2 +- 0.1
  CHECK(fl.slope == doctest::Approx(-1.5).epsilon(0.1334)); // -3/2 +- 0.2
  CHECK(fw.slope == doctest::Approx(-1.2).epsilon(0.1667)); // -alpha +- 0.2
  CHECK(fr.slope == doctest::Approx(-5.0 / 12.0).epsilon(0.36)); // -(1/2-1/r) +- 0.15

  // The vector flow is not skew (d/dt |z|^2 = -4<c1, V2 c2>): the L^2 norm is
  // bounded along the run, not conserved.
  double mx = 0.0, mn = 1e300;
  for (double v : s.l2) {
    mx = std::max(mx, v);
    mn = std::min(mn, v);
  }
  CHECK(mx / mn < 1.5);

  // Tune omega to the threshold resonance of this very mesh: the -3/2 local
  // rate collapses toward the unweighted -1/2.
  ShooterOptions sh;
  sh.h = 0.05;
  double w1h = refine_resonance(prm, Parity::even, 1.3, 1.45, sh);
  CHECK(w1h > 1.35);
  CHECK(w1h < 1.44);

  PropagatorOptions ro = opt;
  ro.spectral_tolerance = 0.0; // the gate would rightly refuse this run
  DecaySeries rs = measure_decay(prm.with_omega(w1h), v0, tg, ro);
  DecayFit rl = fit_decay(rs, DecayNorm::linf_loc, 30.0, 90.0);
  DecayFit rw = fit_decay(rs, DecayNorm::l2_weighted, 30.0, 90.0);
  CHECK(rl.slope == doctest::Approx(-0.5).epsilon(0.5));
  CHECK(rl.slope - fl.slope > 0.5);
  CHECK(rw.slope - fw.slope > 0.5);
}

TEST_CASE("time reversal and commutation with the projection") {
  SolitonParams prm = foc();
  PropagatorOptions opt;
  opt.grid = Grid{100.0, 2000};
  opt.reproject_every = 0; // projections are not time-symmetric

  TwoComponentField v0 = project_for(prm, bump(opt.grid, 1.0), opt);
  auto fwd = propagate(prm, v0, {5.0}, opt);
  PropagatorOptions back = opt;
  back.dt = -opt.dt;
  auto rev = propagate(prm, fwd[0], {-5.0}, back);
  double err = std::max((rev[0].c1 - v0.c1).cwiseAbs().maxCoeff(),
                        (rev[0].c2 - v0.c2).cwiseAbs().maxCoeff());
  CHECK(err <= 1e-8);

  TwoComponentField w0 = bump(opt.grid, 1.0);
  auto w = propagate(prm, w0, {10.0}, opt);
  TwoComponentField pw = project_for(prm, w[0], opt);
  double num = std::max((pw.c1 - w[0].c1).cwiseAbs().maxCoeff(),
                        (pw.c2 - w[0].c2).cwiseAbs().maxCoeff());
  CHECK(num / sup(w[0]) <= 1e-6);
}

TEST_CASE("threshold resonance refusal and its override") {
  SolitonParams prm = foc(1.4917); // |det D(0)| = 1.7e-5 here
  PropagatorOptions opt;
  opt.grid = Grid{50.0, 500};
  TwoComponentField v0 = bump(opt.grid, 1.0);

  bool threw = false;
  try {
    (void)propagate(prm, v0, {1.0}, opt);
  } catch (const std::runtime_error& e) {
    threw = true;
    CHECK(std::string(e.what()).find("spectral condition") != std::string::npos);
    CHECK(std::string(e.what()).find("det D(0)") != std::string::npos);
  }
  CHECK(threw);

  // Override on the default mesh (the coarse one above cannot carry the
  // kernel pair this close to the resonance).
  PropagatorOptions over;
  over.spectral_tolerance = 0.0;
  auto fields = propagate(prm, bump(over.grid, 1.0), {1.0}, over);
  CHECK(fields.size() == 1);
  CHECK(sup(fields[0]) > 0.0);
}

TEST_CASE("fit_decay rejects underfilled windows") {
  DecaySeries s;
  for (int i = 1; i <= 20; ++i) {
    double t = 0.5 * i;
    s.times.push_back(t);
    s.linf.push_back(1.0 / t);
    s.linf_loc.push_back(1.0 / t);
    s.l2.push_back(1.0 / t);
    s.l2w.push_back(1.0 / t);
    s.lr.push_back(1.0 / t);
  }
  CHECK_THROWS_AS((void)fit_decay(s, DecayNorm::linf, 8.0, 10.0), std::invalid_argument);
  DecayFit f = fit_decay(s, DecayNorm::linf, 1.0, 10.0);
  CHECK(f.slope == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(f.samples == 19);
}
