#pragma once

#include <string_view>
#include <vector>

#include "optomech/dynamics.hpp"

namespace optomech {

/// Symmetrized quadrature covariance V_ij = <u_i u_j + u_j u_i>/2 over
/// (x, y, q1, p1, q2, p2). Vacuum is I/2.
struct CovarianceMatrix {
  Mat6 v = Mat6::Zero();
};

enum class ModePair { cav_m1, cav_m2, m1_m2 };

std::string_view to_string(ModePair pair);
ModePair mode_pair_from_string(std::string_view text);
const std::vector<ModePair>& all_mode_pairs();

/// Two-mode reduction V = [[A, C], [C^T, B]].
struct BipartiteBlock {
  ModePair pair = ModePair::cav_m1;
  Mat2 a = Mat2::Zero();
  Mat2 b = Mat2::Zero();
  Mat2 c = Mat2::Zero();

  Mat4 assembled() const;
  /// det A + det B - 2 det C.
  double sigma_pt() const;
};

enum class LyapunovMethod { direct, schur };

struct LyapunovOptions {
  LyapunovMethod method = LyapunovMethod::direct;
  /// Accepted residual max|MV + VM^T + D| relative to max|D|.
  double residual_tolerance = 1e-10;
  /// Reciprocal condition number below which the solve is rejected.
  double min_rcond = 1e-14;
};

/// Steady-state covariance from M V + V M^T = -D. M must be strictly
/// stable (PreconditionError otherwise).
CovarianceMatrix solve_lyapunov(const Mat6& m_drift, const Mat6& d_noise,
                                const LyapunovOptions& options = {});

/// max|M V + V M^T + D|.
double lyapunov_residual(const Mat6& m_drift, const Mat6& d_noise, const Mat6& v);

BipartiteBlock reduce_bipartite(const CovarianceMatrix& cov, ModePair pair);

/// Smallest symplectic eigenvalue of the partially transposed two-mode state.
double pt_nu_minus(const BipartiteBlock& block);

/// max(0, -ln(2 nu-)). Throws PreconditionError for unphysical blocks and
/// NumericalError for a negative discriminant beyond round-off.
double log_negativity(const BipartiteBlock& block);

/// Same quantity from the spectrum of i*Omega*V~ with V~ the partially
/// transposed block (p of the second mode flipped).
double log_negativity_spectral(const BipartiteBlock& block);

/// Symplectic eigenvalues (ascending, one per mode) of a 2n x 2n symmetric
/// covariance in (x1, p1, x2, p2, ...) ordering.
std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& v);

/// Mechanical sector rotated to bright/dark modes B = (b1+b2)/sqrt2,
/// D = (b1-b2)/sqrt2. Couplings are max-abs entries of the off-diagonal
/// 2x2 blocks of the transformed complex matrix, in both directions.
struct DarkModeDiagnostic {
  double cavity_bright = 0.0;
  double cavity_dark = 0.0;
  double bright_dark = 0.0;
  CMat6 transformed = CMat6::Zero();
};

DarkModeDiagnostic dark_mode_coupling(const SystemParams& params, const MeanFields& means);

}  // namespace optomech
