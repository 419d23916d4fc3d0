#include "optomech/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first != std::string_view::npos) out.emplace_back(item.substr(first, last - first + 1));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::size_t parse_count(const ConfigEntry& e) {
  const double v = parse_double(e.value);
  if (v < 0 || v != std::floor(v) || v > 1e9) {
    throw ConfigError(fmt::format("line {}: count must be a non-negative integer", e.line));
  }
  return static_cast<std::size_t>(v);
}

Axis axis_from_section(const ConfigSection& section) {
  Axis axis;
  bool has_values = false;
  bool has_scale = false;
  for (const auto& e : section.entries) {
    if (e.key == "name") {
      axis.name = e.value;
    } else if (e.key == "min") {
      axis.min = parse_double(e.value);
    } else if (e.key == "max") {
      axis.max = parse_double(e.value);
    } else if (e.key == "count") {
      axis.count = parse_count(e);
    } else if (e.key == "scale") {
      axis.scale = axis_scale_from_string(e.value);
      has_scale = true;
    } else if (e.key == "values") {
      for (const auto& item : split_list(e.value)) axis.values.push_back(parse_double(item));
      has_values = true;
    } else {
      throw ConfigError(fmt::format("line {}: unknown axis key '{}'", e.line, e.key));
    }
  }
  if (has_values && !has_scale) axis.scale = AxisScale::list;
  return axis;
}

}  // namespace

std::string_view to_string(AxisScale scale) {
  switch (scale) {
    case AxisScale::linear: return "linear";
    case AxisScale::log: return "log";
    case AxisScale::list: return "list";
  }
  return "?";
}

AxisScale axis_scale_from_string(std::string_view text) {
  if (text == "linear") return AxisScale::linear;
  if (text == "log") return AxisScale::log;
  if (text == "list") return AxisScale::list;
  throw ConfigError(fmt::format("unknown axis scale '{}' (expected linear|log|list)", text));
}

std::size_t Axis::size() const { return scale == AxisScale::list ? values.size() : count; }

std::vector<double> Axis::points() const {
  if (scale == AxisScale::list) return values;
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
    if (scale == AxisScale::linear) {
      out[k] = min + t * (max - min);
    } else {
      out[k] = std::exp(std::log(min) + t * (std::log(max) - std::log(min)));
    }
  }
  // Endpoints exactly as configured.
  if (count >= 1) out.front() = min;
  if (count >= 2) out.back() = max;
  return out;
}

void validate(const SweepSpec& spec) {
  if (spec.axes.empty() || spec.axes.size() > 2) {
    throw ConfigError(fmt::format("a sweep needs 1 or 2 axes (got {})", spec.axes.size()));
  }
  std::set<std::string> names;
  for (const auto& axis : spec.axes) {
    if (!is_param_field(axis.name)) {
      throw ConfigError(fmt::format("axis '{}' is not a parameter field", axis.name));
    }
    if (!names.insert(axis.name).second) {
      throw ConfigError(fmt::format("axis '{}' appears twice", axis.name));
    }
    if (axis.scale == AxisScale::list) {
      if (axis.values.empty()) throw ConfigError(fmt::format("axis '{}' has no values", axis.name));
      for (double v : axis.values) {
        if (!std::isfinite(v)) throw ConfigError(fmt::format("axis '{}' has a non-finite value", axis.name));
      }
    } else {
      if (axis.count < 2) {
        throw ConfigError(fmt::format("axis '{}' needs count >= 2 (got {})", axis.name, axis.count));
      }
      if (!std::isfinite(axis.min) || !std::isfinite(axis.max)) {
        throw ConfigError(fmt::format("axis '{}' has non-finite bounds", axis.name));
      }
      if (axis.scale == AxisScale::log && !(axis.min > 0.0 && axis.max > 0.0)) {
        throw ConfigError(fmt::format("log axis '{}' needs positive bounds", axis.name));
      }
    }
  }
  if (!std::isfinite(spec.stability_margin) || spec.stability_margin < 0.0) {
    throw ConfigError("stability margin must be finite and >= 0");
  }
  try {
    validate(spec.base);
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("base parameters: {}", e.what()));
  }
}

SweepRecord evaluate_point(const SystemParams& params, const std::vector<ModePair>& pairs,
                           double stability_margin, const SolverOptions& solver) {
  SweepRecord rec;
  rec.max_real_part = kNaN;
  rec.residual = kNaN;
  rec.lyapunov_residual = kNaN;
  rec.min_symplectic = kNaN;
  MeanFields means;
  try {
    means = steady_state(params, solver);
  } catch (const SolverFailure& e) {
    rec.residual = e.residual();
    rec.error = fmt::format("{}: {}", e.kind(), e.what());
    return rec;
  } catch (const Error& e) {
    rec.error = fmt::format("{}: {}", e.kind(), e.what());
    return rec;
  }
  rec.converged = true;
  rec.residual = means.residual;
  try {
    const Mat6 m = drift_matrix(params, means);
    const StabilityReport report = assess_stability(m, stability_margin);
    rec.stable = report.stable;
    rec.max_real_part = report.max_real_part;
    if (!rec.stable || pairs.empty()) return rec;
    const Mat6 d = noise_matrix(params);
    const CovarianceMatrix cov = solve_lyapunov(m, d);
    rec.lyapunov_residual = lyapunov_residual(m, d, cov.v);
    rec.min_symplectic = symplectic_eigenvalues(cov.v).front();
    for (ModePair pair : pairs) {
      rec.entanglement[static_cast<std::size_t>(pair)] = log_negativity(reduce_bipartite(cov, pair));
    }
  } catch (const Error& e) {
    rec.entanglement = {};
    rec.error = fmt::format("{}: {}", e.kind(), e.what());
  }
  return rec;
}

SystemParams grid_params(const SweepSpec& spec, std::size_t grid_i, std::size_t grid_j) {
  SystemParams p = spec.base;
  set_param(p, spec.axes.at(0).name, spec.axes[0].points().at(grid_i));
  if (spec.axes.size() > 1) set_param(p, spec.axes[1].name, spec.axes[1].points().at(grid_j));
  return p;
}

std::vector<SweepRecord> run_sweep(const SweepSpec& spec, unsigned workers) {
  validate(spec);
  const std::vector<double> outer = spec.axes[0].points();
  const std::vector<double> inner =
      spec.axes.size() > 1 ? spec.axes[1].points() : std::vector<double>{};
  const std::size_t n_inner = spec.axes.size() > 1 ? inner.size() : 1;
  const std::size_t total = outer.size() * n_inner;

  std::vector<SweepRecord> records(total);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t k = next.fetch_add(1); k < total; k = next.fetch_add(1)) {
      const std::size_t i = k / n_inner;
      const std::size_t j = k % n_inner;
      SystemParams p = spec.base;
      set_param(p, spec.axes[0].name, outer[i]);
      std::vector<double> swept{outer[i]};
      if (spec.axes.size() > 1) {
        set_param(p, spec.axes[1].name, inner[j]);
        swept.push_back(inner[j]);
      }
      SweepRecord rec;
      try {
        rec = evaluate_point(p, spec.bipartitions, spec.stability_margin, spec.solver);
      } catch (const std::exception& e) {
        rec = SweepRecord{};
        rec.max_real_part = rec.residual = rec.lyapunov_residual = rec.min_symplectic = kNaN;
        rec.error = fmt::format("internal: {}", e.what());
      }
      rec.grid_i = i;
      rec.grid_j = j;
      rec.swept = std::move(swept);
      records[k] = std::move(rec);
    }
  };

  const unsigned pool = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(total)));
  if (pool == 1) {
    work();
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(pool);
    for (unsigned t = 0; t < pool; ++t) threads.emplace_back(work);
  }
  return records;
}

SweepSpec sweep_spec_from_config(const ConfigDocument& doc) {
  SweepSpec spec;
  spec.name = "custom";
  spec.base = params_from_entries(doc.top);
  for (const auto& section : doc.sections) {
    if (section.name == "axis") {
      spec.axes.push_back(axis_from_section(section));
    } else if (section.name == "sweep") {
      for (const auto& e : section.entries) {
        if (e.key == "name") {
          spec.name = e.value;
        } else if (e.key == "pairs") {
          spec.bipartitions.clear();
          for (const auto& item : split_list(e.value)) {
            if (item == "none") continue;
            try {
              spec.bipartitions.push_back(mode_pair_from_string(item));
            } catch (const DomainError& err) {
              throw ConfigError(fmt::format("line {}: {}", e.line, err.what()));
            }
          }
        } else if (e.key == "margin") {
          spec.stability_margin = parse_double(e.value);
        } else {
          throw ConfigError(fmt::format("line {}: unknown sweep key '{}'", e.line, e.key));
        }
      }
    } else {
      throw ConfigError(fmt::format("line {}: unknown section '[{}]'", section.line, section.name));
    }
  }
  validate(spec);
  return spec;
}

OutputFormat output_format_from_string(std::string_view text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw ConfigError(fmt::format("unknown output format '{}' (expected csv|json)", text));
}

}  // namespace optomech
