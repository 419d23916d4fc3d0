#pragma once

#include <array>

#include "optomech/model.hpp"

namespace optomech {

/// Linearized fluctuation dynamics.
///
/// `a_complex` acts on (da, da+, db1, db1+, db2, db2+); `m_drift` acts on the
/// quadratures (x, y, q1, p1, q2, p2) with x = (a + a+)/sqrt2 and
/// y = i(a+ - a)/sqrt2. The two are similar matrices.
struct LinearModel {
  CMat6 a_complex;
  Mat6 m_drift;
  Mat6 d_noise;
};

struct StabilityReport {
  bool stable = false;
  double max_real_part = 0.0;
  std::array<cplx, 6> eigenvalues{};
};

/// Complex-basis matrix of the fluctuation equations. Accepts a complex G.
CMat6 complex_matrix(const SystemParams& params, const MeanFields& means);

/// Real quadrature drift matrix. The lower cavity-mechanics blocks carry 2G
/// in the (p_j, x) entry and the mech2->mech1 block is the negative
/// transpose of the mech1->mech2 block. Requires a gauge-fixed (real) G.
Mat6 drift_matrix(const SystemParams& params, const MeanFields& means);

/// Diag[k/2, k/2, g1(2n1+1)/2, g1(2n1+1)/2, g2(2n2+1)/2, g2(2n2+1)/2].
Mat6 noise_matrix(const SystemParams& params);

LinearModel linear_model(const SystemParams& params, const MeanFields& means);

/// Quadrature transform T with u = T x for x in the complex basis;
/// drift = T * A * T^-1.
CMat6 quadrature_transform();

/// Stable iff every eigenvalue has real part < -margin.
StabilityReport assess_stability(const Mat6& m_drift, double margin = 0.0);

/// Routh-Hurwitz verdict from the characteristic polynomial, evaluated in
/// extended precision. Used as an independent check of assess_stability.
bool hurwitz_stable(const Mat6& m_drift);

/// Monic characteristic polynomial coefficients c[0..6] of det(sI - M),
/// highest power first (c[0] = 1).
std::array<long double, 7> characteristic_polynomial(const Mat6& m_drift);

}  // namespace optomech
