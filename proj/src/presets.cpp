#include <numbers>

#include <fmt/format.h>

#include "optomech/errors.hpp"
#include "optomech/sweep.hpp"

namespace optomech {

namespace {

constexpr std::size_t kLineCount = 201;
constexpr std::size_t kMapCount = 101;

SystemParams figure_base() {
  SystemParams p;
  p.omega1 = 1.0;
  p.omega2 = 1.0;
  p.gamma1 = 1e-5;
  p.gamma2 = 1e-5;
  p.delta = -1.0;
  p.g = 5e-4;
  p.theta = std::numbers::pi / 2.0;
  p.kappa = 0.2;
  p.jm = 0.2;
  p.eta = 0.0;
  p.alpha_in = 1000.0;
  p.nth1 = 100.0;
  p.nth2 = 100.0;
  p.detuning_mode = DetuningMode::effective;
  return p;
}

Axis linear_axis(std::string name, double min, double max, std::size_t count) {
  return Axis{std::move(name), min, max, count, AxisScale::linear, {}};
}

Axis log_axis(std::string name, double min, double max, std::size_t count) {
  return Axis{std::move(name), min, max, count, AxisScale::log, {}};
}

Axis list_axis(std::string name, std::vector<double> values) {
  return Axis{std::move(name), 0.0, 0.0, 0, AxisScale::list, std::move(values)};
}

const std::vector<double> kEtaLevels = {0.0, 5e-6, 5e-5};

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig2a", "fig2b", "fig3",   "fig4ab",
                                                 "fig4cd", "fig5ab", "fig5cd", "fig6"};
  return names;
}

std::vector<std::string> expand_preset(std::string_view name) {
  if (name == "fig2") return {"fig2a", "fig2b"};
  if (name == "fig4") return {"fig4ab", "fig4cd"};
  if (name == "fig5") return {"fig5ab", "fig5cd"};
  for (const auto& known : preset_names()) {
    if (known == name) return {known};
  }
  throw ConfigError(fmt::format("unknown preset '{}'", name));
}

SweepSpec figure_preset(std::string_view name) {
  SweepSpec spec;
  spec.name = std::string(name);
  spec.base = figure_base();

  if (name == "fig2a") {
    // stability map over the nonlinearity and the drive
    spec.base.jm = 0.01;
    spec.base.nth1 = spec.base.nth2 = 0.0;
    spec.axes = {log_axis("eta", 1e-6, 1e-4, kMapCount),
                 linear_axis("alpha_in", 10.0, 2500.0, kMapCount)};
    spec.bipartitions.clear();
  } else if (name == "fig2b") {
    spec.base.jm = 0.01;
    spec.base.eta = 1e-5;
    spec.base.nth1 = spec.base.nth2 = 0.0;
    spec.axes = {linear_axis("kappa", 0.02, 1.0, kMapCount),
                 linear_axis("alpha_in", 10.0, 2500.0, kMapCount)};
    spec.bipartitions.clear();
  } else if (name == "fig3") {
    spec.axes = {list_axis("eta", kEtaLevels),
                 linear_axis("theta", 0.0, 2.0 * std::numbers::pi, kLineCount)};
  } else if (name == "fig4ab") {
    spec.axes = {list_axis("eta", kEtaLevels), linear_axis("alpha_in", 10.0, 2000.0, kLineCount)};
  } else if (name == "fig4cd") {
    spec.axes = {list_axis("eta", kEtaLevels), linear_axis("kappa", 0.02, 1.0, kLineCount)};
  } else if (name == "fig5ab") {
    spec.base.alpha_in = 1500.0;
    spec.axes = {list_axis("nth", {0.0, 100.0}), linear_axis("eta", 0.0, 1e-4, kLineCount)};
  } else if (name == "fig5cd") {
    spec.axes = {list_axis("eta", kEtaLevels), linear_axis("nth", 0.0, 2000.0, kLineCount)};
  } else if (name == "fig6") {
    spec.base.omega2 = 4.0 / 3.0;
    spec.base.gamma2 = 4e-5 / 3.0;
    spec.axes = {list_axis("eta", {0.0, 5e-6, 5e-4}),
                 linear_axis("theta", 0.0, 2.0 * std::numbers::pi, kLineCount)};
  } else {
    throw ConfigError(fmt::format("unknown preset '{}'", name));
  }
  validate(spec);
  return spec;
}

}  // namespace optomech
