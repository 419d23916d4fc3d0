#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "fixtures.hpp"
#include "optomech/errors.hpp"
#include "optomech/gaussian.hpp"

using namespace optomech;
using fixtures::fig3;

namespace {

// Row-major vectorization, written independently of the library solver.
Mat6 kronecker_lyapunov(const Mat6& m, const Mat6& d) {
  Eigen::Matrix<double, 36, 36> k = Eigen::Matrix<double, 36, 36>::Zero();
  Eigen::Matrix<double, 36, 1> rhs;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      const int row = 6 * i + j;
      rhs[row] = -d(i, j);
      for (int l = 0; l < 6; ++l) {
        k(row, 6 * l + j) += m(i, l);
        k(row, 6 * i + l) += m(j, l);
      }
    }
  }
  const Eigen::Matrix<double, 36, 1> x = k.fullPivLu().solve(rhs);
  Mat6 v;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) v(i, j) = x[6 * i + j];
  }
  return v;
}

struct Fig3State {
  SystemParams p;
  Mat6 m;
  Mat6 d;
  CovarianceMatrix cov;
};

Fig3State fig3_state(double eta) {
  Fig3State s;
  s.p = fig3(eta);
  s.m = drift_matrix(s.p, steady_state(s.p));
  s.d = noise_matrix(s.p);
  s.cov = solve_lyapunov(s.m, s.d);
  return s;
}

BipartiteBlock tmsv(double r) {
  BipartiteBlock b;
  b.a = 0.5 * std::cosh(2.0 * r) * Mat2::Identity();
  b.b = b.a;
  b.c << 0.5 * std::sinh(2.0 * r), 0.0, 0.0, -0.5 * std::sinh(2.0 * r);
  return b;
}

Mat2 rotation(double phi) {
  Mat2 r;
  r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return r;
}

}  // namespace

TEST_CASE("thermal fixed point of a single oscillator") {
  for (double n : {0.0, 3.0, 100.0}) {
    Mat6 m = Mat6::Zero();
    Mat6 d = Mat6::Zero();
    for (int k = 0; k < 3; ++k) {
      const double gamma = 1e-3 * (k + 1);
      m.block<2, 2>(2 * k, 2 * k) << -gamma / 2, 1.0, -1.0, -gamma / 2;
      d.block<2, 2>(2 * k, 2 * k) = gamma * (2 * n + 1) / 2 * Mat2::Identity();
    }
    for (auto method : {LyapunovMethod::direct, LyapunovMethod::schur}) {
      const CovarianceMatrix cov = solve_lyapunov(m, d, {method});
      CHECK((cov.v - (n + 0.5) * Mat6::Identity()).cwiseAbs().maxCoeff() < 1e-9 * (n + 1));
    }
  }
}

TEST_CASE("zero noise gives zero covariance") {
  const Fig3State s = fig3_state(5e-6);
  const CovarianceMatrix cov = solve_lyapunov(s.m, Mat6::Zero());
  CHECK(cov.v.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Fig. 3 covariance against the vectorized oracle") {
  const Fig3State s = fig3_state(5e-6);
  CHECK(lyapunov_residual(s.m, s.d, s.cov.v) <= 1e-10 * s.d.cwiseAbs().maxCoeff());
  CHECK((s.cov.v - kronecker_lyapunov(s.m, s.d)).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((s.cov.v - s.cov.v.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * s.cov.v.norm());
  // 40-digit solve of the same system.
  CHECK(s.cov.v(0, 0) == doctest::Approx(0.61350203471425527568).epsilon(1e-9));
  CHECK(s.cov.v(2, 3) == doctest::Approx(-0.0075594139387045702088).epsilon(1e-8));
  CHECK(s.cov.v(0, 4) == doctest::Approx(0.16344142921335714423).epsilon(1e-9));

  const CovarianceMatrix schur = solve_lyapunov(s.m, s.d, {LyapunovMethod::schur});
  CHECK((schur.v - s.cov.v).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("Lyapunov preconditions") {
  CHECK_THROWS_AS(solve_lyapunov(Mat6::Identity(), Mat6::Identity()), PreconditionError);
  CHECK_THROWS_AS(solve_lyapunov(Mat6::Zero(), Mat6::Identity()), PreconditionError);
}

TEST_CASE("bipartite reduction") {
  const CovarianceMatrix vac{0.5 * Mat6::Identity()};
  for (ModePair pair : all_mode_pairs()) {
    CHECK(reduce_bipartite(vac, pair).assembled() == Mat4(0.5 * Mat4::Identity()));
    CHECK(log_negativity(reduce_bipartite(vac, pair)) == 0.0);
  }

  const Fig3State s = fig3_state(5e-6);
  const BipartiteBlock b = reduce_bipartite(s.cov, ModePair::cav_m2);
  const int idx[] = {0, 1, 4, 5};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) CHECK(b.assembled()(r, c) == s.cov.v(idx[r], idx[c]));
  }

  Mat6 block_diag = Mat6::Zero();
  block_diag.block<2, 2>(0, 0) << 2.0, 0.1, 0.1, 1.0;
  block_diag.block<2, 2>(2, 2) << 1.0, 0.0, 0.0, 3.0;
  block_diag.block<2, 2>(4, 4) = Mat2::Identity();
  CHECK(reduce_bipartite({block_diag}, ModePair::m1_m2).c == Mat2::Zero());
  CHECK_THROWS_AS(reduce_bipartite(s.cov, static_cast<ModePair>(7)), DomainError);
}

TEST_CASE("logarithmic negativity on analytic states") {
  CHECK(std::abs(log_negativity(tmsv(0.5)) - 1.0) <= 1e-9);
  CHECK(std::abs(log_negativity_spectral(tmsv(0.5)) - 1.0) <= 1e-9);
  CHECK(std::abs(pt_nu_minus(tmsv(0.5)) - 0.5 * std::exp(-1.0)) <= 1e-12);

  BipartiteBlock thermal;
  thermal.a = thermal.b = 3.5 * Mat2::Identity();
  CHECK(log_negativity(thermal) == 0.0);
  BipartiteBlock vacuum;
  vacuum.a = vacuum.b = 0.5 * Mat2::Identity();
  CHECK(log_negativity(vacuum) == 0.0);
  CHECK(pt_nu_minus(vacuum) == 0.5);
}

TEST_CASE("unphysical blocks are rejected") {
  BipartiteBlock b;
  b.a = b.b = 0.2 * Mat2::Identity();
  CHECK_THROWS_AS(log_negativity(b), PreconditionError);
}

TEST_CASE("Fig. 3 entanglement values") {
  const Fig3State s = fig3_state(5e-6);
  // 40-digit evaluation via the spectrum of the partially transposed state.
  const double expected[] = {0.029672522025721786643, 0.16943871528119530952, 0.0};
  for (ModePair pair : all_mode_pairs()) {
    const BipartiteBlock b = reduce_bipartite(s.cov, pair);
    const double en = log_negativity(b);
    CHECK(std::abs(en - expected[static_cast<int>(pair)]) <= 1e-9);
    CHECK(std::abs(en - log_negativity_spectral(b)) <= 1e-9);
  }
}

TEST_CASE("local rotations leave the negativity unchanged") {
  const Fig3State s = fig3_state(5e-6);
  for (ModePair pair : all_mode_pairs()) {
    const BipartiteBlock b = reduce_bipartite(s.cov, pair);
    for (double phi : {0.3, 1.7}) {
      BipartiteBlock r = b;
      const Mat2 rot1 = rotation(phi);
      const Mat2 rot2 = rotation(-2.0 * phi);
      r.a = rot1 * b.a * rot1.transpose();
      r.b = rot2 * b.b * rot2.transpose();
      r.c = rot1 * b.c * rot2.transpose();
      CHECK(std::abs(log_negativity(r) - log_negativity(b)) <= 1e-9);
    }
  }
}

TEST_CASE("symplectic eigenvalues") {
  const auto vac = symplectic_eigenvalues(0.5 * Eigen::MatrixXd::Identity(6, 6));
  REQUIRE(vac.size() == 3);
  for (double nu : vac) CHECK(nu == doctest::Approx(0.5).epsilon(1e-15));
  const auto th = symplectic_eigenvalues(7.5 * Eigen::MatrixXd::Identity(4, 4));
  REQUIRE(th.size() == 2);
  for (double nu : th) CHECK(nu == doctest::Approx(7.5).epsilon(1e-15));

  const Fig3State s = fig3_state(5e-6);
  const auto nus = symplectic_eigenvalues(s.cov.v);
  CHECK(nus.front() >= 0.5 - 1e-9);
  CHECK(nus.front() == doctest::Approx(0.50941336978776875001).epsilon(1e-9));
  CHECK(std::is_sorted(nus.begin(), nus.end()));

  Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(4, 4);
  asym(0, 1) = 0.3;
  CHECK_THROWS_AS(symplectic_eigenvalues(asym), DomainError);
  CHECK_THROWS_AS(symplectic_eigenvalues(Eigen::MatrixXd::Identity(3, 3)), DomainError);
}

TEST_CASE("bright and dark modes") {
  SystemParams p = fig3(0.0);
  p.jm = 0.0;
  MeanFields m = steady_state(p);
  DarkModeDiagnostic dm = dark_mode_coupling(p, m);
  CHECK(dm.cavity_dark <= 1e-15 * dm.cavity_bright);
  CHECK(dm.cavity_bright > 0.0);

  // theta = pi at eta = 0: the hopping term is diagonal in the (B, D)
  // basis, so the two modes no longer exchange excitations.
  p = fig3(0.0);
  p.theta = std::numbers::pi;
  m = steady_state(p);
  dm = dark_mode_coupling(p, m);
  CHECK(dm.bright_dark <= 1e-12);
  CHECK(dm.cavity_dark <= 1e-12 * dm.cavity_bright);

  p = fig3(5e-6);
  m = steady_state(p);
  dm = dark_mode_coupling(p, m);
  // Independent 40-digit construction of the rotated matrix.
  CHECK(dm.bright_dark == doctest::Approx(0.36989147121356373029).epsilon(1e-9));
  CHECK(dm.cavity_bright == doctest::Approx(0.314658387763776305).epsilon(1e-9));
  CHECK(dm.cavity_dark <= 1e-15);
}
