#include <doctest.h>

#include "qcc/split_operator.hpp"
#include "qcc/tangent.hpp"
#include "qcc/wigner.hpp"

#include <cmath>
#include <complex>

using namespace qcc;

namespace {

const Vec2 kPaperQ(0.40, 0.60);
const Vec2 kPaperP(0.50, 0.414);

GridSpec grid_for(double hbar) {
  GridSpec g;
  if (hbar >= 0.2) {
    g.n = 256;
    g.half_width = 13.0;
  } else if (hbar >= 0.02) {
    g.n = 512;
    g.half_width = 6.0;
  } else {
    g.n = 1024;
    g.half_width = 6.0;
  }
  g.hbar = hbar;
  return g;
}

// correlated coherent state built directly from the mode formula; used where
// the production initializer's resolution gate does not apply (tiny grids)
WaveState raw_gaussian(const GridSpec& grid, const GaussianSpec& spec) {
  WaveState s;
  s.grid = grid;
  s.amp.resize(static_cast<std::size_t>(grid.n) * grid.n);
  for (int i1 = 0; i1 < grid.n; ++i1)
    for (int i2 = 0; i2 < grid.n; ++i2) {
      std::complex<double> v = 1.0;
      const double x[2] = {grid.position(i1), grid.position(i2)};
      for (int m = 0; m < 2; ++m) {
        const double r = spec.r(m);
        const double eta = spec.eta(m);
        const double d = x[m] - spec.qbar[m];
        const std::complex<double> shape(1.0, -r / std::sqrt(1.0 - r * r));
        v *= std::exp(-shape * (d * d / (4.0 * eta * eta)) +
                      std::complex<double>(0.0, spec.pbar[m] * d / spec.hbar));
      }
      s.at(i1, i2) = v;
    }
  s.normalize();
  return s;
}

}  // namespace

TEST_CASE("init_correlated_coherent: moments reproduce the covariance") {
  const double hbar = 0.5;
  const GridSpec grid = grid_for(hbar);
  const double eta = std::sqrt(hbar / 2.0);

  // minimum-uncertainty product state: Var(q) Var(p) = hbar^2/4 per mode
  const GaussianSpec sym = GaussianSpec::coherent(hbar, kPaperQ, kPaperP);
  WaveState s = init_correlated_coherent(grid, sym);
  CHECK(std::abs(s.norm_sq() - 1.0) < 1e-12);
  const QuantumMoments m = quantum_moments(s);
  for (int mode = 0; mode < 2; ++mode) {
    CHECK(m.mean[mode] == doctest::Approx(kPaperQ[mode]).epsilon(1e-9));
    CHECK(m.mean[mode + 2] == doctest::Approx(kPaperP[mode]).epsilon(1e-9));
    CHECK(m.variance[mode] * m.variance[mode + 2] ==
          doctest::Approx(hbar * hbar / 4.0).epsilon(1e-6));
  }

  // correlated state: variances match Eq.-level covariance within 1e-6
  const GaussianSpec corr = GaussianSpec::correlated(hbar, 0.6, 0.6, eta, eta, kPaperQ, kPaperP);
  const Mat4 sigma = covariance_from_spec(corr);
  WaveState sc = init_correlated_coherent(grid, corr);
  const QuantumMoments mc = quantum_moments(sc);
  for (int j = 0; j < 4; ++j)
    CHECK(mc.variance[static_cast<std::size_t>(j)] == doctest::Approx(sigma(j, j)).epsilon(1e-6));
  // Var(p) = hbar/(2*0.64) at eta^2 = hbar/2, r = 0.6
  CHECK(mc.variance[2] == doctest::Approx(hbar / (2.0 * 0.64)).epsilon(1e-6));
}

TEST_CASE("init_correlated_coherent: resolution gate names the failing mode") {
  GridSpec g;
  g.n = 32;
  g.half_width = 5.0;
  g.hbar = 0.5;
  const GaussianSpec spec = GaussianSpec::coherent(0.5, Vec2::Zero(), Vec2::Zero());
  CHECK_THROWS_WITH_AS(init_correlated_coherent(g, spec),
                       doctest::Contains("mode 1"), std::invalid_argument);

  // mode 1 resolved in q and p, mode 2 too wide in position for the box's
  // momentum resolution
  GridSpec g2;
  g2.n = 512;
  g2.half_width = 2.0;
  g2.hbar = 0.5;
  GaussianSpec aniso = GaussianSpec::correlated(0.5, 0.0, 0.0, 0.06, 0.3, Vec2::Zero(), Vec2::Zero());
  CHECK_THROWS_WITH_AS(init_correlated_coherent(g2, aniso),
                       doctest::Contains("mode 2"), std::invalid_argument);
}

TEST_CASE("kinetic-only evolution leaves the spectral density invariant") {
  const double hbar = 0.05;
  const GridSpec grid = grid_for(hbar);
  const GaussianSpec spec = GaussianSpec::coherent(hbar, kPaperQ, kPaperP);
  SplitOperator prop(grid, ModelParams::quartic(1.0, 0.01), 1e-3);
  prop.load(init_correlated_coherent(grid, spec));
  const QuantumMoments before = prop.moments();
  prop.advance_kinetic(200);
  const QuantumMoments after = prop.moments();
  CHECK(after.mean[2] == doctest::Approx(before.mean[2]).epsilon(1e-12));
  CHECK(after.mean[3] == doctest::Approx(before.mean[3]).epsilon(1e-12));
  CHECK(after.variance[2] == doctest::Approx(before.variance[2]).epsilon(1e-12));
  CHECK(after.variance[3] == doctest::Approx(before.variance[3]).epsilon(1e-12));
  // free spreading in position
  CHECK(after.variance[0] > before.variance[0]);
}

TEST_CASE("Ehrenfest: <q> follows the classical centroid for the quadratic model") {
  const double hbar = 0.05;
  const GridSpec grid = grid_for(hbar);
  const ModelParams mp = ModelParams::quadratic_test(1.0, 1.3);
  const GaussianSpec spec = GaussianSpec::coherent(hbar, Vec2(0.4, -0.3), Vec2(0.2, 0.5));
  SplitOperator prop(grid, mp, 1e-3);
  prop.load(init_correlated_coherent(grid, spec));
  prop.advance(1000);  // t = 1

  TangentMember cm = TangentMember::start(mp, spec.centroid());
  propagate_tangent(mp, cm, 1e-3, 1000);
  const Vec4 classical = cm.gamma();
  const QuantumMoments m = prop.moments();
  for (int j = 0; j < 4; ++j)
    CHECK(std::abs(m.mean[static_cast<std::size_t>(j)] - classical[j]) < 1e-6);
}

TEST_CASE("split-operator: dt^2 self-convergence of <q1^2>") {
  const double hbar = 0.05;
  const GridSpec grid = grid_for(hbar);
  const ModelParams mp = ModelParams::quartic(1.0, 0.01);
  const GaussianSpec spec = GaussianSpec::coherent(hbar, kPaperQ, kPaperP);
  const WaveState init = init_correlated_coherent(grid, spec);

  auto q1sq_at_t1 = [&](double dt, long steps) {
    SplitOperator prop(grid, mp, dt);
    prop.load(init);
    prop.advance(steps);
    const QuantumMoments m = prop.moments();
    return m.variance[0] + m.mean[0] * m.mean[0];
  };
  const double a = q1sq_at_t1(4e-3, 250);
  const double b = q1sq_at_t1(2e-3, 500);
  const double c = q1sq_at_t1(1e-3, 1000);
  const double ratio = (a - b) / (b - c);
  CHECK(ratio > 2.5);
  CHECK(ratio < 6.0);
}

TEST_CASE("split-operator invariants: norm, energy drift, reversal, swap symmetry") {
  const double hbar = 0.05;
  const GridSpec grid = grid_for(hbar);
  const ModelParams mp = ModelParams::quartic(1.0, 0.01);
  const GaussianSpec spec = GaussianSpec::coherent(hbar, kPaperQ, kPaperP);
  const WaveState init = init_correlated_coherent(grid, spec);

  SplitOperator prop(grid, mp, 1e-3);
  prop.load(init);
  const double e0 = prop.energy();
  prop.advance(1000);
  CHECK(std::abs(prop.norm_sq() - 1.0) < 1e-10);
  CHECK(std::abs(prop.energy() - e0) / std::abs(e0) < 1e-6);

  // unitarity / time reversal
  prop.set_dt(-1e-3);
  prop.advance(1000);
  CHECK(overlap_magnitude(init, prop.snapshot()) > 1.0 - 1e-8);

  // mode exchange: swap state and (already symmetric) quartic model
  const GaussianSpec aniso =
      GaussianSpec::correlated(hbar, 0.3, -0.2, 0.20, 0.20, kPaperQ, kPaperP);
  SplitOperator p1(grid, mp, 1e-3);
  p1.load(init_correlated_coherent(grid, aniso));
  p1.advance(500);
  SplitOperator p2(grid, mp, 1e-3);
  p2.load(init_correlated_coherent(grid, aniso.swapped_modes()));
  p2.advance(500);
  const double chi_a = p1.chi2q();
  const double chi_b = p2.chi2q();
  CHECK(std::abs(chi_a - chi_b) / chi_a < 1e-8);
}

TEST_CASE("chi2q at t=0: closed forms") {
  const double hbar = 0.05;
  const GridSpec grid = grid_for(hbar);
  const GaussianSpec sym = GaussianSpec::coherent(hbar, kPaperQ, kPaperP);
  WaveState s = init_correlated_coherent(grid, sym);
  CHECK(chi2q_variance(s) == doctest::Approx(8.944271909999159).epsilon(1e-6));

  // chaining through the covariance: chi^2 = (2/hbar^2) tr(Sigma)
  const double eta = std::sqrt(hbar / 2.0);
  const GaussianSpec corr = GaussianSpec::correlated(hbar, 0.6, -0.6, eta, eta, kPaperQ, kPaperP);
  WaveState sc = init_correlated_coherent(grid, corr);
  const Mat4 sigma = covariance_from_spec(corr);
  CHECK(chi2q_variance(sc) ==
        doctest::Approx(std::sqrt(2.0 * sigma.trace() / (hbar * hbar))).epsilon(1e-6));
  // identity chi^2 hbar^2 / 2 = sum of variances holds by construction
  const QuantumMoments m = quantum_moments(sc);
  double vsum = 0.0;
  for (double v : m.variance) vsum += v;
  CHECK(chi2q_variance(sc) * chi2q_variance(sc) * hbar * hbar / 2.0 ==
        doctest::Approx(vsum).epsilon(1e-12));
}

TEST_CASE("Wigner diagnostic: integral, positivity, marginals, gradient chi") {
  // sized so the y-windowed correlation has decayed below 1e-9 at the cut
  // and the Wigner momentum range covers ~4 widths
  GridSpec g;
  g.n = 32;
  g.half_width = 6.5;
  g.hbar = 0.5;
  const GaussianSpec spec =
      GaussianSpec::coherent(0.5, Vec2(0.3, -0.2), Vec2(0.05, -0.04));
  const WaveState s = raw_gaussian(g, spec);

  const WignerDiag diag = build_wigner(s);
  CHECK(std::abs(diag.integral() - 1.0) < 1e-6);
  // Gaussian Wigner is the positive-definite case
  CHECK(diag.min_value() > -1e-9);

  // marginal over p equals |psi(q)|^2
  const int n = g.n;
  double max_err = 0.0;
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2) {
      long double acc = 0.0L;
      for (int l1 = 0; l1 < n; ++l1)
        for (int l2 = 0; l2 < n; ++l2) acc += diag.value(i1, i2, l1, l2);
      const double marginal = static_cast<double>(acc) * diag.dpw * diag.dpw;
      max_err = std::max(max_err, std::abs(marginal - std::norm(s.at(i1, i2))));
    }
  CHECK(max_err < 1e-9);

  // gradient-definition chi agrees with the variance identity within 2%
  const double chi_grad = chi2q_spectral_diag(s);
  const double chi_var = chi2q_variance(s);
  CHECK(chi_grad == doctest::Approx(chi_var).epsilon(0.02));

  GridSpec big = g;
  big.n = 128;
  WaveState sb = raw_gaussian(big, spec);
  CHECK_THROWS_AS(chi2q_spectral_diag(sb), std::invalid_argument);
}

TEST_CASE("quantum moments: initial coherent widths") {
  const double hbar = 0.05;
  const GridSpec grid = grid_for(hbar);
  const GaussianSpec spec = GaussianSpec::coherent(hbar, kPaperQ, kPaperP);
  const QuantumMoments m = quantum_moments(init_correlated_coherent(grid, spec));
  for (double v : m.variance) CHECK(v == doctest::Approx(hbar / 2.0).epsilon(1e-6));
}
