#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "fixtures.hpp"
#include "optomech/dynamics.hpp"
#include "optomech/errors.hpp"

using namespace optomech;
using fixtures::fig3;

namespace {

std::vector<cplx> sorted_spectrum(const CMat6& m) {
  const Eigen::ComplexEigenSolver<CMat6> solver(m, false);
  std::vector<cplx> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + 6);
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return ev;
}

// Greedy matching of two multisets; returns the largest pairing distance.
double spectral_distance(std::vector<cplx> a, std::vector<cplx> b) {
  double worst = 0.0;
  for (const cplx& x : a) {
    auto best = std::min_element(b.begin(), b.end(),
                                 [&](cplx u, cplx v) { return std::abs(u - x) < std::abs(v - x); });
    worst = std::max(worst, std::abs(*best - x));
    b.erase(best);
  }
  return worst;
}

MeanFields means_with(double g_eff, double delta_eff, double lambda) {
  MeanFields m;
  m.alpha = 1.0;
  m.g_eff = g_eff;
  m.delta_eff = delta_eff;
  m.lambda_nl = lambda;
  m.converged = true;
  return m;
}

}  // namespace

TEST_CASE("decoupled limit") {
  SystemParams p = fig3(0.0);
  p.jm = 0.0;
  const MeanFields m = means_with(0.0, -1.0, 0.0);
  const CMat6 a = complex_matrix(p, m);
  const Mat6 md = drift_matrix(p, m);
  const cplx i(0.0, 1.0);
  CHECK(a(0, 0) == -i - 0.1);
  CHECK(a(1, 1) == i - 0.1);
  CHECK(a(2, 2) == -(0.5e-5 + i));
  CHECK(a(3, 3) == -(0.5e-5 - i));
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 6; ++c) {
      if (r / 2 != c / 2) {
        CHECK(a(r, c) == cplx(0.0));
        CHECK(md(r, c) == 0.0);
      }
    }
  }
  Mat2 cav;
  cav << -0.1, 1.0, -1.0, -0.1;
  CHECK(md.block<2, 2>(0, 0) == cav);
  Mat2 mech;
  mech << -0.5e-5, 1.0, -1.0, -0.5e-5;
  CHECK(md.block<2, 2>(2, 2) == mech);
  CHECK(md.block<2, 2>(4, 4) == mech);
}

TEST_CASE("hopping entries at theta = pi/2") {
  const SystemParams p = fig3(0.0);
  const MeanFields m = means_with(0.3, -1.0, 0.0);
  const CMat6 a = complex_matrix(p, m);
  CHECK(std::abs(a(2, 4) - cplx(0.2, 0.0)) < 1e-16);
  CHECK(std::abs(a(4, 2) - cplx(-0.2, 0.0)) < 1e-16);
  const Mat6 md = drift_matrix(p, m);
  CHECK(std::abs(md(2, 4) - 0.2) < 1e-16);
  CHECK(std::abs(md(3, 5) - 0.2) < 1e-16);
  CHECK(std::abs(md(2, 5)) < 1e-16);
  CHECK(std::abs(md(4, 2) + 0.2) < 1e-16);
  CHECK(std::abs(md(5, 3) + 0.2) < 1e-16);
  CHECK(std::abs(md(4, 3)) < 1e-16);
}

TEST_CASE("optomechanical coupling enters both directions") {
  const SystemParams p = fig3(0.0);
  const Mat6 md = drift_matrix(p, means_with(0.25, -1.0, 0.0));
  CHECK(md(1, 2) == 0.5);
  CHECK(md(1, 4) == 0.5);
  CHECK(md(3, 0) == 0.5);
  CHECK(md(5, 0) == 0.5);
  CHECK(md(0, 2) == 0.0);
  CHECK(md(2, 1) == 0.0);
}

TEST_CASE("Duffing shift only touches the p1-q1 entry") {
  const SystemParams p = fig3(0.0);
  const Mat6 base = drift_matrix(p, means_with(0.25, -1.0, 0.0));
  const Mat6 shifted = drift_matrix(p, means_with(0.25, -1.0, 0.03));
  CHECK(shifted(3, 2) == -(1.0 + 2.0 * 0.03));
  Mat6 diff = shifted - base;
  diff(3, 2) = 0.0;
  CHECK(diff.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("quadrature transform maps A to M") {
  for (double eta : {0.0, 5e-6, 5e-5}) {
    const SystemParams p = fig3(eta);
    const MeanFields m = steady_state(p);
    const LinearModel lin = linear_model(p, m);
    const CMat6 t = quadrature_transform();
    const CMat6 mapped = t * lin.a_complex * t.inverse();
    CHECK((mapped - lin.m_drift.cast<cplx>()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(spectral_distance(sorted_spectrum(lin.a_complex), sorted_spectrum(lin.m_drift.cast<cplx>())) <
          1e-9);
  }
}

TEST_CASE("eigenvalues of A come in conjugate pairs") {
  const SystemParams p = fig3(5e-6);
  const CMat6 a = complex_matrix(p, steady_state(p));
  const auto ev = sorted_spectrum(a);
  std::vector<cplx> conj;
  for (cplx z : ev) conj.push_back(std::conj(z));
  CHECK(spectral_distance(ev, conj) < 1e-9);
}

TEST_CASE("noise matrix") {
  SystemParams p = fig3(0.0);
  const Mat6 d = noise_matrix(p);
  CHECK(d(0, 0) == 0.1);
  CHECK(d(1, 1) == 0.1);
  CHECK(d(2, 2) == doctest::Approx(1e-5 * 201.0 / 2.0).epsilon(1e-15));
  CHECK(d(5, 5) == doctest::Approx(1e-5 * 201.0 / 2.0).epsilon(1e-15));
  CHECK((d - Mat6(d.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
  p.nth1 = p.nth2 = 0.0;
  const Mat6 vac = noise_matrix(p);
  CHECK(vac(2, 2) == 0.5e-5);
  CHECK(vac(4, 4) == 0.5e-5);
}

TEST_CASE("stability report") {
  const StabilityReport r = assess_stability(-Mat6::Identity());
  CHECK(r.stable);
  CHECK(r.max_real_part == -1.0);
  CHECK_FALSE(assess_stability(-Mat6::Identity(), 1.5).stable);
  CHECK_FALSE(assess_stability(Mat6::Zero()).stable);
  Mat6 bad = Mat6::Identity();
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(assess_stability(bad), NumericalError);
}

TEST_CASE("stability claims at caption parameters") {
  SystemParams p2b = fig3(1e-5);
  p2b.jm = 0.01;
  const StabilityReport a = assess_stability(drift_matrix(p2b, steady_state(p2b)));
  CHECK(a.stable);
  CHECK(a.max_real_part == doctest::Approx(-0.0054883182336773234005).epsilon(1e-9));

  const SystemParams neg = fig3(-5e-6);
  CHECK_FALSE(assess_stability(drift_matrix(neg, steady_state(neg))).stable);

  const SystemParams p3 = fig3(5e-6);
  CHECK(assess_stability(drift_matrix(p3, steady_state(p3))).max_real_part ==
        doctest::Approx(-0.0085223719309750901466).epsilon(1e-9));
}

TEST_CASE("Routh-Hurwitz verdict agrees with the spectrum") {
  std::mt19937_64 rng(20261016);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto log_uniform = [&](double lo, double hi) {
    return std::exp(std::log(lo) + u(rng) * (std::log(hi) - std::log(lo)));
  };
  int agree = 0;
  int evaluated = 0;
  int stable = 0;
  for (int k = 0; k < 1200 && evaluated < 1000; ++k) {
    SystemParams p = fig3(0.0);
    p.gamma1 = log_uniform(1e-3, 1e-1);
    p.gamma2 = log_uniform(1e-3, 1e-1);
    p.kappa = 0.05 + 0.5 * u(rng);
    p.jm = 0.3 * u(rng);
    p.theta = 2.0 * std::numbers::pi * u(rng);
    const MeanFields m = means_with(0.6 * u(rng), -1.5 + 3.0 * u(rng), 0.05 * u(rng));
    const Mat6 md = drift_matrix(p, m);
    const StabilityReport r = assess_stability(md);
    if (std::abs(r.max_real_part) < 1e-6) continue;  // marginal: verdict ill-posed
    ++evaluated;
    stable += r.stable ? 1 : 0;
    agree += r.stable == hurwitz_stable(md) ? 1 : 0;
  }
  CHECK(evaluated == 1000);
  CHECK(agree == evaluated);
  CHECK(stable > 50);
  CHECK(stable < 950);
}

TEST_CASE("characteristic polynomial of a diagonal matrix") {
  Mat6 m = Mat6::Zero();
  m.diagonal() << -1, -2, -3, -4, -5, -6;
  const auto c = characteristic_polynomial(m);
  // (x+1)(x+2)...(x+6)
  const long double expected[] = {1, 21, 175, 735, 1624, 1764, 720};
  for (int k = 0; k < 7; ++k) CHECK(static_cast<double>(c[k]) == static_cast<double>(expected[k]));
  CHECK(hurwitz_stable(m));
  m(5, 5) = 0.5;
  CHECK_FALSE(hurwitz_stable(m));
}

TEST_CASE("resonator sign flip and theta shift") {
  const Mat6 s = Eigen::Matrix<double, 6, 1>(1, 1, 1, 1, -1, -1).asDiagonal();
  const SystemParams p = fig3(0.0);
  for (double theta : {0.0, 0.4, 2.5}) {
    SystemParams a = p;
    a.theta = theta;
    SystemParams b = p;
    b.theta = theta + std::numbers::pi;
    // The hopping blocks obey the sign rule exactly.
    const MeanFields uncoupled = means_with(0.0, -1.0, 0.01);
    CHECK((s * drift_matrix(a, uncoupled) * s - drift_matrix(b, uncoupled)).cwiseAbs().maxCoeff() <
          1e-15);
    // With G != 0 the flip also reverses the cavity-resonator-2 coupling.
    const MeanFields coupled = means_with(0.3, -1.0, 0.01);
    const Mat6 diff = s * drift_matrix(a, coupled) * s - drift_matrix(b, coupled);
    CHECK(diff(1, 4) == doctest::Approx(-1.2));
    CHECK(diff(5, 0) == doctest::Approx(-1.2));
  }
}

TEST_CASE("preconditions") {
  const SystemParams p = fig3(0.0);
  MeanFields m = means_with(0.3, -1.0, 0.0);
  m.converged = false;
  CHECK_THROWS_AS(complex_matrix(p, m), PreconditionError);
  CHECK_THROWS_AS(drift_matrix(p, m), PreconditionError);
  m = means_with(0.3, -1.0, 0.0);
  m.g_eff = cplx(0.3, 0.01);
  CHECK_THROWS_AS(drift_matrix(p, m), GaugeError);
  CHECK_NOTHROW(complex_matrix(p, m));
}
