#include "optomech/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <fmt/format.h>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

using Mat36 = Eigen::Matrix<double, 36, 36>;
using Vec36 = Eigen::Matrix<double, 36, 1>;

Mat6 solve_direct(const Mat6& m, const Mat6& d, const LyapunovOptions& options) {
  // Column-major vec: vec(M V) = (I (x) M) vec V, vec(V M^T) = (M (x) I) vec V.
  Mat36 k = Mat36::Zero();
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 6; ++c) {
      k.block<6, 6>(6 * r, 6 * c) += m(r, c) * Mat6::Identity();
      if (r == c) k.block<6, 6>(6 * r, 6 * c) += m;
    }
  }
  const Eigen::PartialPivLU<Mat36> lu(k);
  const double rcond = lu.rcond();
  if (!(rcond >= options.min_rcond)) {
    throw NumericalError(
        fmt::format("Lyapunov system is ill-conditioned (rcond estimate {:.3e})", rcond), rcond);
  }
  const Vec36 rhs = -Eigen::Map<const Vec36>(d.data());
  Vec36 x = lu.solve(rhs);
  x += lu.solve(rhs - k * x);  // one step of iterative refinement
  return Eigen::Map<const Mat6>(x.data());
}

Mat6 solve_schur(const Mat6& m, const Mat6& d, const LyapunovOptions& options) {
  // Complex Schur form M = U T U^H turns the equation into
  // T Y + Y T^H = -U^H D U, solved by back substitution.
  const Eigen::ComplexSchur<CMat6> schur(m.cast<cplx>());
  if (schur.info() != Eigen::Success) throw NumericalError("Schur decomposition failed");
  const CMat6& t = schur.matrixT();
  const CMat6& u = schur.matrixU();

  double min_sep = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) min_sep = std::min(min_sep, std::abs(t(i, i) + std::conj(t(j, j))));
  }
  const double rcond = min_sep / std::max(1e-300, 2.0 * t.cwiseAbs().maxCoeff());
  if (!(rcond >= options.min_rcond)) {
    throw NumericalError(
        fmt::format("Lyapunov system is ill-conditioned (rcond estimate {:.3e})", rcond), rcond);
  }

  const auto solve = [&](const Mat6& rhs_real) {
    const CMat6 c = -u.adjoint() * rhs_real.cast<cplx>() * u;
    CMat6 y = CMat6::Zero();
    for (int j = 5; j >= 0; --j) {
      for (int i = 5; i >= 0; --i) {
        cplx acc = c(i, j);
        for (int k = i + 1; k < 6; ++k) acc -= t(i, k) * y(k, j);
        for (int k = j + 1; k < 6; ++k) acc -= y(i, k) * std::conj(t(j, k));
        y(i, j) = acc / (t(i, i) + std::conj(t(j, j)));
      }
    }
    return Mat6((u * y * u.adjoint()).real());
  };

  Mat6 v = solve(d);
  const Mat6 r = d + m * v + v * m.transpose();
  v += solve(r);
  return v;
}

double max_abs(const CMat6& m, int r, int c) {
  return std::max(m.block<2, 2>(r, c).cwiseAbs().maxCoeff(), m.block<2, 2>(c, r).cwiseAbs().maxCoeff());
}

}  // namespace

std::string_view to_string(ModePair pair) {
  switch (pair) {
    case ModePair::cav_m1: return "cav-m1";
    case ModePair::cav_m2: return "cav-m2";
    case ModePair::m1_m2: return "m1-m2";
  }
  return "?";
}

ModePair mode_pair_from_string(std::string_view text) {
  for (ModePair p : all_mode_pairs()) {
    if (to_string(p) == text) return p;
  }
  throw DomainError(fmt::format("unknown mode pair '{}' (expected cav-m1|cav-m2|m1-m2)", text));
}

const std::vector<ModePair>& all_mode_pairs() {
  static const std::vector<ModePair> pairs = {ModePair::cav_m1, ModePair::cav_m2, ModePair::m1_m2};
  return pairs;
}

Mat4 BipartiteBlock::assembled() const {
  Mat4 v;
  v.topLeftCorner<2, 2>() = a;
  v.topRightCorner<2, 2>() = c;
  v.bottomLeftCorner<2, 2>() = c.transpose();
  v.bottomRightCorner<2, 2>() = b;
  return v;
}

double BipartiteBlock::sigma_pt() const {
  return a.determinant() + b.determinant() - 2.0 * c.determinant();
}

double lyapunov_residual(const Mat6& m, const Mat6& d, const Mat6& v) {
  return (m * v + v * m.transpose() + d).cwiseAbs().maxCoeff();
}

CovarianceMatrix solve_lyapunov(const Mat6& m, const Mat6& d, const LyapunovOptions& options) {
  if (!m.allFinite() || !d.allFinite()) {
    throw NumericalError("Lyapunov input has non-finite entries");
  }
  const StabilityReport stability = assess_stability(m, 0.0);
  if (!stability.stable) {
    throw PreconditionError(fmt::format(
        "drift matrix is not strictly stable (max Re lambda = {:.6e})", stability.max_real_part));
  }
  Mat6 v = options.method == LyapunovMethod::direct ? solve_direct(m, d, options)
                                                    : solve_schur(m, d, options);
  v = 0.5 * (v + v.transpose()).eval();
  const double scale = d.cwiseAbs().maxCoeff();
  const double res = lyapunov_residual(m, d, v);
  if (!(res <= options.residual_tolerance * scale)) {
    throw NumericalError(
        fmt::format("Lyapunov residual {:.3e} exceeds {:.1e} * |D|", res, options.residual_tolerance));
  }
  return CovarianceMatrix{v};
}

BipartiteBlock reduce_bipartite(const CovarianceMatrix& cov, ModePair pair) {
  int first = 0;
  int second = 0;
  switch (pair) {
    case ModePair::cav_m1: first = 0; second = 1; break;
    case ModePair::cav_m2: first = 0; second = 2; break;
    case ModePair::m1_m2: first = 1; second = 2; break;
    default: throw DomainError("invalid mode pair selector");
  }
  BipartiteBlock block;
  block.pair = pair;
  block.a = cov.v.block<2, 2>(2 * first, 2 * first);
  block.b = cov.v.block<2, 2>(2 * second, 2 * second);
  block.c = cov.v.block<2, 2>(2 * first, 2 * second);
  return block;
}

double pt_nu_minus(const BipartiteBlock& block) {
  const double det_v = block.assembled().determinant();

  // Physicality of the untransposed state: its smallest symplectic
  // eigenvalue must not fall below 1/2. The spectral route keeps full
  // precision for pure states, where the closed form loses half the digits.
  const auto nus = symplectic_eigenvalues(block.assembled());
  if (nus.front() < 0.5 - 1e-9 * std::max(1.0, nus.back())) {
    throw PreconditionError(
        fmt::format("covariance block violates the uncertainty relation (nu = {:.12g})", nus.front()));
  }

  const double st = block.sigma_pt();
  double disc = st * st - 4.0 * det_v;
  if (disc < 0.0) {
    if (disc < -1e-12 * std::max(1.0, st * st)) {
      throw NumericalError(fmt::format("negative discriminant {:.3e} in nu- evaluation", disc));
    }
    disc = 0.0;
  }
  const double nu_sq = 0.5 * (st - std::sqrt(disc));
  if (!(nu_sq > 0.0)) {
    throw NumericalError(fmt::format("non-positive nu-^2 = {:.3e}", nu_sq));
  }
  return std::sqrt(nu_sq);
}

double log_negativity(const BipartiteBlock& block) {
  return std::max(0.0, -std::log(2.0 * pt_nu_minus(block)));
}

double log_negativity_spectral(const BipartiteBlock& block) {
  Mat4 flip = Mat4::Identity();
  flip(3, 3) = -1.0;
  const auto nus = symplectic_eigenvalues(flip * block.assembled() * flip);
  return std::max(0.0, -std::log(2.0 * nus.front()));
}

std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& v) {
  if (v.rows() != v.cols() || v.rows() % 2 != 0 || v.rows() == 0) {
    throw DomainError("covariance must be a non-empty 2n x 2n matrix");
  }
  const double norm = std::max(1.0, v.cwiseAbs().maxCoeff());
  if ((v - v.transpose()).cwiseAbs().maxCoeff() > 1e-10 * norm) {
    throw DomainError("covariance must be symmetric");
  }
  const Eigen::Index n = v.rows() / 2;
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(v.rows(), v.cols());
  for (Eigen::Index k = 0; k < n; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(omega * v, false);
  if (solver.info() != Eigen::Success) throw NumericalError("symplectic eigenvalue solve failed");
  std::vector<double> moduli;
  for (Eigen::Index k = 0; k < v.rows(); ++k) moduli.push_back(std::abs(solver.eigenvalues()[k]));
  std::sort(moduli.begin(), moduli.end());
  std::vector<double> out;
  for (Eigen::Index k = 0; k < n; ++k) out.push_back(0.5 * (moduli[2 * k] + moduli[2 * k + 1]));
  return out;
}

DarkModeDiagnostic dark_mode_coupling(const SystemParams& params, const MeanFields& means) {
  const CMat6 a = complex_matrix(params, means);
  const double s = 1.0 / std::sqrt(2.0);
  CMat6 u = CMat6::Zero();
  u(0, 0) = 1.0;
  u(1, 1) = 1.0;
  u(2, 2) = s; u(2, 4) = s;    // B
  u(3, 3) = s; u(3, 5) = s;    // B+
  u(4, 2) = s; u(4, 4) = -s;   // D
  u(5, 3) = s; u(5, 5) = -s;   // D+
  DarkModeDiagnostic out;
  out.transformed = u * a * u.transpose();  // u is real orthogonal and symmetric
  out.cavity_bright = max_abs(out.transformed, 0, 2);
  out.cavity_dark = max_abs(out.transformed, 0, 4);
  out.bright_dark = max_abs(out.transformed, 2, 4);
  return out;
}

}  // namespace optomech
