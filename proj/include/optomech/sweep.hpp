#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "optomech/gaussian.hpp"
#include "optomech/params_io.hpp"

namespace optomech {

enum class AxisScale { linear, log, list };

std::string_view to_string(AxisScale scale);
AxisScale axis_scale_from_string(std::string_view text);

/// One swept parameter. `list` axes take their points from `values`;
/// the others span [min, max] with `count` points, endpoints included.
struct Axis {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
  AxisScale scale = AxisScale::linear;
  std::vector<double> values;

  std::vector<double> points() const;
  std::size_t size() const;
};

struct SweepSpec {
  std::string name;
  SystemParams base;
  std::vector<Axis> axes;
  std::vector<ModePair> bipartitions = all_mode_pairs();
  double stability_margin = 1e-8;
  SolverOptions solver;
};

/// Throws ConfigError when the spec breaks an invariant.
void validate(const SweepSpec& spec);

/// One evaluated grid point. `entanglement` is indexed like all_mode_pairs()
/// and holds values only for requested pairs at converged, stable points.
struct SweepRecord {
  std::size_t grid_i = 0;
  std::size_t grid_j = 0;
  std::vector<double> swept;
  bool converged = false;
  bool stable = false;
  double max_real_part = 0.0;
  std::array<std::optional<double>, 3> entanglement{};
  double residual = 0.0;            ///< steady-state residual
  double lyapunov_residual = 0.0;   ///< NaN when not evaluated
  double min_symplectic = 0.0;      ///< NaN when not evaluated
  std::string error;                ///< empty on success

  std::optional<double> en(ModePair pair) const {
    return entanglement[static_cast<std::size_t>(pair)];
  }
};

/// Full pipeline at one parameter point. Failures are captured in the
/// record, never thrown.
SweepRecord evaluate_point(const SystemParams& params, const std::vector<ModePair>& pairs,
                           double stability_margin, const SolverOptions& solver = {});

/// Grid evaluation over a bounded worker pool. Records come back in grid
/// order (axis 0 outermost) independent of the worker count.
std::vector<SweepRecord> run_sweep(const SweepSpec& spec, unsigned workers = 1);

/// Parameter set at a grid index.
SystemParams grid_params(const SweepSpec& spec, std::size_t grid_i, std::size_t grid_j);

/// Panel names accepted by figure_preset.
const std::vector<std::string>& preset_names();

/// Panels making up a figure: "fig4" -> {"fig4ab", "fig4cd"}; a panel name
/// maps to itself. Throws ConfigError for unknown names.
std::vector<std::string> expand_preset(std::string_view name);

/// Caption parameters and axes of a figure panel.
SweepSpec figure_preset(std::string_view name);

/// Sweep spec from a config document: top-level parameters, an optional
/// [sweep] section (name, pairs, margin) and one or two [axis] sections.
SweepSpec sweep_spec_from_config(const ConfigDocument& doc);

enum class OutputFormat { csv, json };
OutputFormat output_format_from_string(std::string_view text);

/// CSV columns: grid_i, grid_j, <axis names>, converged, stable,
/// max_real_part, E_N_cav_m1, E_N_cav_m2, E_N_m1_m2, residual.
std::string results_csv(const SweepSpec& spec, const std::vector<SweepRecord>& records);
std::string results_json(const SweepSpec& spec, const std::vector<SweepRecord>& records);

/// Writes records to `path`; throws DomainError on an empty record list
/// and IoError (with the path) on write failures.
void emit_results(const SweepSpec& spec, const std::vector<SweepRecord>& records,
                  OutputFormat format, const std::filesystem::path& path);

/// Parses the CSV produced by results_csv. Only CSV columns are restored.
std::vector<SweepRecord> parse_results_csv(std::string_view text, std::size_t axis_count);

}  // namespace optomech
