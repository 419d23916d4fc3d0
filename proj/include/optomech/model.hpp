#pragma once

#include <string_view>

#include "optomech/types.hpp"

namespace optomech {

/// How the configured `delta` enters the mean-field equations.
///
/// `bare`: delta is the pump-cavity detuning; the effective detuning
/// delta_eff = delta + 2 g (Re beta1 + Re beta2) is solved self-consistently.
///
/// `effective`: delta is taken as the effective detuning already including
/// the radiation-pressure shift; the implied bare detuning is reported in
/// MeanFields::delta_bare. This is the reading used by the figure presets.
enum class DetuningMode { bare, effective };

std::string_view to_string(DetuningMode mode);
DetuningMode detuning_mode_from_string(std::string_view text);

/// Physical constants of the three-mode system, all in units of the
/// mechanical reference frequency (omega_m = 1).
struct SystemParams {
  double omega1 = 1.0;
  double omega2 = 1.0;
  double gamma1 = 1e-5;
  double gamma2 = 1e-5;
  double kappa = 0.2;
  double delta = -1.0;
  double g = 5e-4;
  double jm = 0.2;
  double theta = 1.5707963267948966;
  double eta = 0.0;
  double alpha_in = 1000.0;
  double nth1 = 100.0;
  double nth2 = 100.0;
  DetuningMode detuning_mode = DetuningMode::bare;

  bool operator==(const SystemParams&) const = default;
};

/// Throws DomainError naming the first offending field.
void validate(const SystemParams& params);

/// Steady-state mean amplitudes and the quantities derived from them.
struct MeanFields {
  cplx alpha{};      ///< cavity amplitude, real and >= 0 after gauge fixing
  cplx beta1{};
  cplx beta2{};
  double delta_eff = 0.0;   ///< effective detuning entering the fluctuations
  double delta_bare = 0.0;  ///< bare detuning consistent with delta_eff
  cplx g_eff{};             ///< G = g * alpha
  double lambda_nl = 0.0;   ///< 24 eta (Re beta1)^2
  double residual = 0.0;    ///< max-norm of the mean-field residual
  double input_phase = 0.0; ///< phase applied to alpha_in by the gauge rotation
  int continuation_steps = 0;
  int newton_iterations = 0;
  bool converged = false;
};

struct SolverOptions {
  /// Convergence when max|F| <= tolerance * max(1, |alpha|).
  double tolerance = 1e-10;
  int max_newton_iterations = 100;
  int max_continuation_steps = 32;
};

/// Bose-Einstein occupancy for an angular frequency in rad/s and a
/// temperature in kelvin. Zero at T = 0.
double thermal_occupancy(double omega, double temperature);

/// Same, from the dimensionless ratio hbar*omega / (k_B T).
double thermal_occupancy_from_ratio(double ratio);

/// Solves the mean-field fixed point by damped Newton with continuation
/// from the linear, g-decoupled solution. Throws SolverFailure when a
/// continuation step cannot be converged and DivergenceError on NaN/overflow.
MeanFields steady_state(const SystemParams& params, const SolverOptions& options = {});

}  // namespace optomech
