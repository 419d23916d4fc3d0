#include "optomech/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

void require_converged(const MeanFields& means) {
  if (!means.converged || !std::isfinite(means.residual)) {
    throw PreconditionError("mean fields are not a converged steady state");
  }
}

}  // namespace

CMat6 complex_matrix(const SystemParams& p, const MeanFields& means) {
  require_converged(means);
  const cplx i(0.0, 1.0);
  const cplx G = means.g_eff;
  const cplx Gc = std::conj(G);
  const double dt = means.delta_eff;
  const double lam = means.lambda_nl;
  const cplx hop12 = -i * p.jm * std::exp(i * p.theta);   // db1 <- db2
  const cplx hop21 = -i * p.jm * std::exp(-i * p.theta);  // db2 <- db1

  CMat6 a = CMat6::Zero();
  // cavity
  a(0, 0) = i * dt - 0.5 * p.kappa;
  a(1, 1) = -i * dt - 0.5 * p.kappa;
  for (int c : {2, 3, 4, 5}) {
    a(0, c) = i * G;
    a(1, c) = -i * Gc;
  }
  // mechanics <- cavity: i(G* da + G da+) and its conjugate
  for (int r : {2, 4}) {
    a(r, 0) = i * Gc;
    a(r, 1) = i * G;
    a(r + 1, 0) = -i * Gc;
    a(r + 1, 1) = -i * G;
  }
  // mechanical resonator 1 with the linearized Duffing term
  a(2, 2) = -(0.5 * p.gamma1 + i * (p.omega1 + lam));
  a(2, 3) = -i * lam;
  a(3, 2) = i * lam;
  a(3, 3) = -(0.5 * p.gamma1 - i * (p.omega1 + lam));
  // mechanical resonator 2
  a(4, 4) = -(0.5 * p.gamma2 + i * p.omega2);
  a(5, 5) = -(0.5 * p.gamma2 - i * p.omega2);
  // phonon hopping
  a(2, 4) = hop12;
  a(3, 5) = std::conj(hop12);
  a(4, 2) = hop21;
  a(5, 3) = std::conj(hop21);
  return a;
}

Mat6 drift_matrix(const SystemParams& p, const MeanFields& means) {
  require_converged(means);
  const double scale = std::max(1.0, std::abs(means.g_eff));
  if (std::abs(means.g_eff.imag()) > 1e-12 * scale) {
    throw GaugeError(fmt::format("drift matrix needs a real coupling G (Im G = {})",
                                 means.g_eff.imag()));
  }
  const double G = means.g_eff.real();
  const double dt = means.delta_eff;
  const double lam = means.lambda_nl;
  const double js = p.jm * std::sin(p.theta);
  const double jc = p.jm * std::cos(p.theta);

  Mat6 m = Mat6::Zero();
  m.block<2, 2>(0, 0) << -0.5 * p.kappa, -dt, dt, -0.5 * p.kappa;
  m.block<2, 2>(2, 2) << -0.5 * p.gamma1, p.omega1, -(2.0 * lam + p.omega1), -0.5 * p.gamma1;
  m.block<2, 2>(4, 4) << -0.5 * p.gamma2, p.omega2, -p.omega2, -0.5 * p.gamma2;
  // y <- q_j and p_j <- x
  m(1, 2) = 2.0 * G;
  m(1, 4) = 2.0 * G;
  m(3, 0) = 2.0 * G;
  m(5, 0) = 2.0 * G;
  Mat2 hop;
  hop << js, jc, -jc, js;
  m.block<2, 2>(2, 4) = hop;
  m.block<2, 2>(4, 2) = -hop.transpose();
  return m;
}

Mat6 noise_matrix(const SystemParams& p) {
  validate(p);
  Mat6 d = Mat6::Zero();
  const double mech1 = 0.5 * p.gamma1 * (2.0 * p.nth1 + 1.0);
  const double mech2 = 0.5 * p.gamma2 * (2.0 * p.nth2 + 1.0);
  d.diagonal() << 0.5 * p.kappa, 0.5 * p.kappa, mech1, mech1, mech2, mech2;
  return d;
}

LinearModel linear_model(const SystemParams& params, const MeanFields& means) {
  return {complex_matrix(params, means), drift_matrix(params, means), noise_matrix(params)};
}

CMat6 quadrature_transform() {
  const double s = 1.0 / std::sqrt(2.0);
  const cplx i(0.0, 1.0);
  CMat6 t = CMat6::Zero();
  for (int k = 0; k < 3; ++k) {
    t(2 * k, 2 * k) = s;
    t(2 * k, 2 * k + 1) = s;
    t(2 * k + 1, 2 * k) = -i * s;
    t(2 * k + 1, 2 * k + 1) = i * s;
  }
  return t;
}

StabilityReport assess_stability(const Mat6& m_drift, double margin) {
  if (!m_drift.allFinite()) throw NumericalError("drift matrix has non-finite entries");
  const Eigen::EigenSolver<Mat6> solver(m_drift, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigenvalue solver failed on the drift matrix");
  }
  StabilityReport report;
  const auto& ev = solver.eigenvalues();
  report.max_real_part = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 6; ++k) {
    report.eigenvalues[k] = ev[k];
    report.max_real_part = std::max(report.max_real_part, ev[k].real());
  }
  report.stable = report.max_real_part < -margin;
  return report;
}

std::array<long double, 7> characteristic_polynomial(const Mat6& m_drift) {
  // Faddeev-LeVerrier recursion.
  using LMat = Eigen::Matrix<long double, 6, 6>;
  const LMat a = m_drift.cast<long double>();
  std::array<long double, 7> c{};
  c[0] = 1.0L;
  LMat mk = LMat::Zero();
  for (int k = 1; k <= 6; ++k) {
    mk = a * mk + c[k - 1] * LMat::Identity();
    c[k] = -(a * mk).trace() / static_cast<long double>(k);
  }
  return c;
}

bool hurwitz_stable(const Mat6& m_drift) {
  const auto c = characteristic_polynomial(m_drift);
  // Routh array; first-column entries must all be positive.
  constexpr int n = 6;
  std::array<std::array<long double, 4>, n + 1> routh{};
  for (int k = 0; k <= n; ++k) routh[k % 2][k / 2] = c[k];
  for (int row = 2; row <= n; ++row) {
    const long double pivot = routh[row - 1][0];
    if (!(pivot > 0.0L)) return false;
    for (int col = 0; col < 3; ++col) {
      routh[row][col] =
          (pivot * routh[row - 2][col + 1] - routh[row - 2][0] * routh[row - 1][col + 1]) / pivot;
    }
  }
  for (int row = 0; row <= n; ++row) {
    if (!(routh[row][0] > 0.0L)) return false;
  }
  return true;
}

}  // namespace optomech
