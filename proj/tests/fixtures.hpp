#pragma once

#include <array>
#include <complex>
#include <numbers>

#include "optomech/model.hpp"

namespace fixtures {

using optomech::cplx;

inline optomech::SystemParams fig3(double eta, optomech::DetuningMode mode = optomech::DetuningMode::effective) {
  optomech::SystemParams p;
  p.omega1 = p.omega2 = 1.0;
  p.gamma1 = p.gamma2 = 1e-5;
  p.delta = -1.0;
  p.g = 5e-4;
  p.kappa = 0.2;
  p.jm = 0.2;
  p.theta = std::numbers::pi / 2.0;
  p.eta = eta;
  p.alpha_in = 1000.0;
  p.nth1 = p.nth2 = 100.0;
  p.detuning_mode = mode;
  return p;
}

/// Right-hand sides of the complex mean-field equations, written directly
/// in terms of alpha, beta1, beta2 and a complex input amplitude.
inline std::array<cplx, 3> mean_field_rhs(const optomech::SystemParams& p, cplx alpha_in, cplx alpha,
                                         cplx beta1, cplx beta2) {
  const cplx i(0.0, 1.0);
  const double dt = p.detuning_mode == optomech::DetuningMode::effective
                        ? p.delta
                        : p.delta + 2.0 * p.g * (beta1.real() + beta2.real());
  const double n = std::norm(alpha);
  const double x1 = beta1.real();
  return {
      (i * dt - p.kappa / 2.0) * alpha + std::sqrt(p.kappa) * alpha_in,
      -(p.gamma1 / 2.0 + i * p.omega1) * beta1 + i * p.g * n - 16.0 * i * p.eta * x1 * x1 * x1 -
          i * p.jm * std::exp(i * p.theta) * beta2,
      -(p.gamma2 / 2.0 + i * p.omega2) * beta2 + i * p.g * n - i * p.jm * std::exp(-i * p.theta) * beta1,
  };
}

inline double max_abs(const std::array<cplx, 3>& f) {
  return std::max({std::abs(f[0].real()), std::abs(f[0].imag()), std::abs(f[1].real()),
                   std::abs(f[1].imag()), std::abs(f[2].real()), std::abs(f[2].imag())});
}

}  // namespace fixtures
