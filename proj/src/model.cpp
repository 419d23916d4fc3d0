#include "optomech/model.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <fmt/format.h>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

constexpr double kHbar = 1.054571817e-34;     // J s
constexpr double kBoltzmann = 1.380649e-23;   // J / K

using Vec6 = Eigen::Matrix<double, 6, 1>;

// Real form of the mean-field equations. Unknowns are
// (Re a, Im a, Re b1, Im b1, Re b2, Im b2).
struct MeanFieldSystem {
  SystemParams p;
  double eta = 0.0;
  double alpha_in = 0.0;

  double effective_detuning(const Vec6& z) const {
    if (p.detuning_mode == DetuningMode::effective) return p.delta;
    return p.delta + 2.0 * p.g * (z[2] + z[4]);
  }

  Vec6 residual(const Vec6& z) const {
    const double dt = effective_detuning(z);
    const double n = z[0] * z[0] + z[1] * z[1];
    const double js = p.jm * std::sin(p.theta);
    const double jc = p.jm * std::cos(p.theta);
    const double x1 = z[2];
    Vec6 f;
    f[0] = -dt * z[1] - 0.5 * p.kappa * z[0] + std::sqrt(p.kappa) * alpha_in;
    f[1] = dt * z[0] - 0.5 * p.kappa * z[1];
    f[2] = -0.5 * p.gamma1 * z[2] + p.omega1 * z[3] + js * z[4] + jc * z[5];
    f[3] = -p.omega1 * z[2] - 0.5 * p.gamma1 * z[3] - jc * z[4] + js * z[5] + p.g * n -
           16.0 * eta * x1 * x1 * x1;
    f[4] = -0.5 * p.gamma2 * z[4] + p.omega2 * z[5] - js * z[2] + jc * z[3];
    f[5] = -p.omega2 * z[4] - 0.5 * p.gamma2 * z[5] - jc * z[2] - js * z[3] + p.g * n;
    return f;
  }

  Mat6 jacobian(const Vec6& z) const {
    const double dt = effective_detuning(z);
    const double ddt = p.detuning_mode == DetuningMode::effective ? 0.0 : 2.0 * p.g;
    const double js = p.jm * std::sin(p.theta);
    const double jc = p.jm * std::cos(p.theta);
    const double k2 = 0.5 * p.kappa;
    Mat6 j = Mat6::Zero();
    j.row(0) << -k2, -dt, -z[1] * ddt, 0.0, -z[1] * ddt, 0.0;
    j.row(1) << dt, -k2, z[0] * ddt, 0.0, z[0] * ddt, 0.0;
    j.row(2) << 0.0, 0.0, -0.5 * p.gamma1, p.omega1, js, jc;
    j.row(3) << 2.0 * p.g * z[0], 2.0 * p.g * z[1], -p.omega1 - 48.0 * eta * z[2] * z[2],
        -0.5 * p.gamma1, -jc, js;
    j.row(4) << 0.0, 0.0, -js, jc, -0.5 * p.gamma2, p.omega2;
    j.row(5) << 2.0 * p.g * z[0], 2.0 * p.g * z[1], -jc, -js, -p.omega2, -0.5 * p.gamma2;
    return j;
  }
};

// Closed-form fixed point at eta = 0. The mechanical amplitudes are linear
// in n = |alpha|^2, beta = n w, so the radiation-pressure shift of the
// detuning is k n and n solves the cubic
//   k^2 n^3 + 2 delta k n^2 + (kappa^2/4 + delta^2) n - kappa alpha_in^2 = 0.
// The smallest positive root is the branch reached by raising the drive
// from zero. In effective mode k = 0 and the root is unique.
Vec6 linear_fixed_point(const SystemParams& p, double alpha_in) {
  const cplx i(0.0, 1.0);
  Eigen::Matrix2cd m;
  m << 0.5 * p.gamma1 + i * p.omega1, i * p.jm * std::exp(i * p.theta),
      i * p.jm * std::exp(-i * p.theta), 0.5 * p.gamma2 + i * p.omega2;
  const Eigen::Vector2cd w = m.partialPivLu().solve(Eigen::Vector2cd(i * p.g, i * p.g));
  const double k =
      p.detuning_mode == DetuningMode::bare ? 2.0 * p.g * (w[0].real() + w[1].real()) : 0.0;

  const double c1 = 0.25 * p.kappa * p.kappa + p.delta * p.delta;
  const double c0 = -p.kappa * alpha_in * alpha_in;
  const auto cubic = [&](double n) { return ((k * k * n + 2.0 * p.delta * k) * n + c1) * n + c0; };
  const auto slope = [&](double n) { return (3.0 * k * k * n + 4.0 * p.delta * k) * n + c1; };

  double n = -c0 / c1;
  if (k != 0.0) {
    Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
    companion(0, 0) = -2.0 * p.delta / k;
    companion(0, 1) = -c1 / (k * k);
    companion(0, 2) = -c0 / (k * k);
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    const Eigen::Vector3cd roots = companion.eigenvalues();
    n = std::numeric_limits<double>::infinity();
    for (int r = 0; r < 3; ++r) {
      double x = roots[r].real();
      if (std::abs(roots[r].imag()) > 1e-6 * std::max(1.0, std::abs(x))) continue;
      for (int it = 0; it < 8; ++it) {
        const double d = slope(x);
        if (d == 0.0) break;
        x -= cubic(x) / d;
      }
      if (x > 0.0 && x < n) n = x;
    }
    if (!std::isfinite(n)) n = -c0 / c1;
  }

  const double dt = p.delta + k * n;
  const cplx alpha = std::sqrt(p.kappa) * alpha_in / (0.5 * p.kappa - i * dt);
  const Eigen::Vector2cd beta = n * w;
  Vec6 z;
  z << alpha.real(), alpha.imag(), beta[0].real(), beta[0].imag(), beta[1].real(), beta[1].imag();
  return z;
}

struct NewtonResult {
  Vec6 z;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

double scaled_tolerance(const SolverOptions& options, const Vec6& z) {
  return options.tolerance * std::max(1.0, std::hypot(z[0], z[1]));
}

void check_finite(const Vec6& v, const char* where) {
  if (!v.allFinite()) {
    throw DivergenceError(fmt::format("non-finite value during {}", where));
  }
}

NewtonResult damped_newton(const MeanFieldSystem& sys, Vec6 z, const SolverOptions& options) {
  NewtonResult out;
  Vec6 f = sys.residual(z);
  check_finite(f, "residual evaluation");
  double norm = f.lpNorm<Eigen::Infinity>();
  for (int it = 0; it < options.max_newton_iterations; ++it) {
    if (norm <= scaled_tolerance(options, z)) {
      out.converged = true;
      break;
    }
    ++out.iterations;
    const Eigen::FullPivLU<Mat6> lu(sys.jacobian(z));
    if (!lu.isInvertible()) break;
    const Vec6 step = lu.solve(-f);
    check_finite(step, "Newton step");

    // Backtracking on the max-norm; accept the smallest step anyway so the
    // iteration can leave a shallow region instead of stalling.
    double t = 1.0;
    Vec6 trial = z + step;
    Vec6 ftrial = sys.residual(trial);
    while (t > 1.0 / 1024.0 &&
           !(ftrial.allFinite() && ftrial.lpNorm<Eigen::Infinity>() < (1.0 - 1e-4 * t) * norm)) {
      t *= 0.5;
      trial = z + t * step;
      ftrial = sys.residual(trial);
    }
    check_finite(trial, "Newton update");
    check_finite(ftrial, "residual evaluation");
    z = trial;
    f = ftrial;
    norm = f.lpNorm<Eigen::Infinity>();
  }
  if (!out.converged && norm <= scaled_tolerance(options, z)) out.converged = true;
  out.z = z;
  out.residual = norm;
  return out;
}

class Continuation {
 public:
  Continuation(const SystemParams& p, const SolverOptions& options) : p_(p), options_(options) {}

  // Solves at (eta, alpha_in) from `start`; counts one continuation step.
  NewtonResult step(double eta, double alpha_in, const Vec6& start) {
    if (steps_ >= options_.max_continuation_steps) {
      throw SolverFailure(
          fmt::format("continuation exceeded {} steps (last residual {:.3e})",
                      options_.max_continuation_steps, last_residual_),
          last_residual_);
    }
    ++steps_;
    MeanFieldSystem sys{p_, eta, alpha_in};
    NewtonResult r = damped_newton(sys, start, options_);
    iterations_ += r.iterations;
    last_residual_ = r.residual;
    return r;
  }

  int steps() const { return steps_; }
  int iterations() const { return iterations_; }
  double last_residual() const { return last_residual_; }

 private:
  SystemParams p_;
  SolverOptions options_;
  int steps_ = 0;
  int iterations_ = 0;
  double last_residual_ = std::numeric_limits<double>::quiet_NaN();
};

// Geometric ramp of `target` * s from s = s0 to s = 1, halving the
// logarithmic step on failure. `solve(s, start)` runs one Newton solve.
template <typename Solve>
NewtonResult geometric_ramp(double s0, Vec6 z, Solve&& solve) {
  double log_s = std::log(s0);
  double log_step = -log_s / 8.0;
  NewtonResult last{z, 0.0, 0, true};
  bool first = true;
  while (first || log_s < 0.0) {
    const double trial_log = first ? log_s : std::min(0.0, log_s + log_step);
    NewtonResult r = solve(std::exp(trial_log), z);
    if (r.converged) {
      z = r.z;
      last = r;
      log_s = trial_log;
      first = false;
      log_step *= 1.5;
    } else {
      if (first) return r;
      log_step *= 0.5;
      if (log_step < 1e-6) return r;
    }
  }
  return last;
}

}  // namespace

std::string_view to_string(DetuningMode mode) {
  return mode == DetuningMode::bare ? "bare" : "effective";
}

DetuningMode detuning_mode_from_string(std::string_view text) {
  if (text == "bare") return DetuningMode::bare;
  if (text == "effective") return DetuningMode::effective;
  throw DomainError(fmt::format("unknown detuning_mode '{}' (expected bare|effective)", text));
}

void validate(const SystemParams& p) {
  const auto positive = [](const char* name, double v) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw DomainError(fmt::format("{} must be finite and > 0 (got {})", name, v));
    }
  };
  const auto nonnegative = [](const char* name, double v) {
    if (!std::isfinite(v) || v < 0.0) {
      throw DomainError(fmt::format("{} must be finite and >= 0 (got {})", name, v));
    }
  };
  const auto finite = [](const char* name, double v) {
    if (!std::isfinite(v)) throw DomainError(fmt::format("{} must be finite (got {})", name, v));
  };
  positive("omega1", p.omega1);
  positive("omega2", p.omega2);
  positive("gamma1", p.gamma1);
  positive("gamma2", p.gamma2);
  positive("kappa", p.kappa);
  finite("delta", p.delta);
  nonnegative("g", p.g);
  nonnegative("jm", p.jm);
  finite("theta", p.theta);
  finite("eta", p.eta);
  nonnegative("alpha_in", p.alpha_in);
  nonnegative("nth1", p.nth1);
  nonnegative("nth2", p.nth2);
}

double thermal_occupancy_from_ratio(double ratio) {
  if (std::isnan(ratio) || ratio <= 0.0) {
    throw DomainError(fmt::format("occupancy ratio hbar*omega/(k_B T) must be > 0 (got {})", ratio));
  }
  if (std::isinf(ratio)) return 0.0;
  return 1.0 / std::expm1(ratio);
}

double thermal_occupancy(double omega, double temperature) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw DomainError(fmt::format("omega must be finite and > 0 (got {})", omega));
  }
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw DomainError(fmt::format("temperature must be finite and >= 0 (got {})", temperature));
  }
  if (temperature == 0.0) return 0.0;
  return thermal_occupancy_from_ratio(kHbar * omega / (kBoltzmann * temperature));
}

MeanFields steady_state(const SystemParams& params, const SolverOptions& options) {
  validate(params);
  MeanFields out;
  if (params.alpha_in == 0.0) {
    out.delta_eff = params.delta;
    out.delta_bare = params.delta;
    out.converged = true;
    return out;
  }

  Continuation cont(params, options);

  // Linear problem (eta = 0) at full drive, ramping the drive only if the
  // direct solve from the closed form fails.
  NewtonResult lin = cont.step(0.0, params.alpha_in, linear_fixed_point(params, params.alpha_in));
  if (!lin.converged) {
    const double s0 = 1.0 / 64.0;
    lin = geometric_ramp(s0, linear_fixed_point(params, params.alpha_in * s0),
                         [&](double s, const Vec6& z) {
                           return cont.step(0.0, params.alpha_in * s, z);
                         });
  }
  if (!lin.converged) {
    throw SolverFailure(
        fmt::format("linear mean-field solve did not converge (residual {:.3e})", lin.residual),
        lin.residual);
  }

  NewtonResult sol = lin;
  if (params.eta != 0.0) {
    sol = geometric_ramp(1e-4, lin.z, [&](double s, const Vec6& z) {
      return cont.step(params.eta * s, params.alpha_in, z);
    });
    if (!sol.converged) {
      throw SolverFailure(
          fmt::format("Duffing continuation did not converge (residual {:.3e})", sol.residual),
          sol.residual);
    }
  }

  const Vec6& z = sol.z;
  const cplx alpha(z[0], z[1]);
  const double phase = std::arg(alpha);
  out.alpha = cplx(std::abs(alpha), 0.0);
  out.input_phase = -phase;
  out.beta1 = cplx(z[2], z[3]);
  out.beta2 = cplx(z[4], z[5]);
  const double shift = 2.0 * params.g * (z[2] + z[4]);
  if (params.detuning_mode == DetuningMode::bare) {
    out.delta_bare = params.delta;
    out.delta_eff = params.delta + shift;
  } else {
    out.delta_eff = params.delta;
    out.delta_bare = params.delta - shift;
  }
  out.g_eff = params.g * out.alpha;
  out.lambda_nl = 24.0 * params.eta * z[2] * z[2];
  out.residual = sol.residual;
  out.continuation_steps = cont.steps();
  out.newton_iterations = cont.iterations();
  out.converged = true;
  return out;
}

}  // namespace optomech
