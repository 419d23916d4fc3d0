#include "optomech/export.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

using nlohmann::json;

constexpr std::string_view kPairColumns[] = {"E_N_cav_m1", "E_N_cav_m2", "E_N_m1_m2"};

std::string number(double v) { return fmt::format("{:.17e}", v); }

json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

std::size_t parse_index(std::string_view field) {
  const double v = parse_double(field);
  if (v < 0 || v != std::floor(v)) throw ConfigError(fmt::format("bad grid index '{}'", field));
  return static_cast<std::size_t>(v);
}

bool parse_flag(std::string_view field) {
  if (field == "1") return true;
  if (field == "0") return false;
  throw ConfigError(fmt::format("bad boolean field '{}'", field));
}

}  // namespace

json to_json(const SystemParams& params) {
  json out = json::object();
  for (const auto& name : param_field_names()) out[name] = get_param(params, name);
  out["detuning_mode"] = std::string(to_string(params.detuning_mode));
  return out;
}

json to_json(const MeanFields& m) {
  const auto c = [](cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; };
  return json{{"alpha", c(m.alpha)},
              {"beta1", c(m.beta1)},
              {"beta2", c(m.beta2)},
              {"delta_eff", m.delta_eff},
              {"delta_bare", m.delta_bare},
              {"g_eff", c(m.g_eff)},
              {"lambda_nl", m.lambda_nl},
              {"residual", m.residual},
              {"input_phase", m.input_phase},
              {"continuation_steps", m.continuation_steps},
              {"newton_iterations", m.newton_iterations},
              {"converged", m.converged}};
}

json to_json(const StabilityReport& report) {
  json eig = json::array();
  for (const auto& ev : report.eigenvalues) eig.push_back({{"re", ev.real()}, {"im", ev.imag()}});
  return json{{"stable", report.stable}, {"max_real_part", report.max_real_part}, {"eigenvalues", eig}};
}

json to_json(const SweepSpec& spec) {
  json axes = json::array();
  for (const auto& a : spec.axes) {
    json axis{{"name", a.name}, {"scale", std::string(to_string(a.scale))}};
    if (a.scale == AxisScale::list) {
      axis["values"] = a.values;
    } else {
      axis["min"] = a.min;
      axis["max"] = a.max;
      axis["count"] = a.count;
    }
    axes.push_back(axis);
  }
  json pairs = json::array();
  for (ModePair p : spec.bipartitions) pairs.push_back(std::string(to_string(p)));
  return json{{"name", spec.name},
              {"base", to_json(spec.base)},
              {"axes", axes},
              {"pairs", pairs},
              {"stability_margin", spec.stability_margin},
              {"solver",
               {{"tolerance", spec.solver.tolerance},
                {"max_newton_iterations", spec.solver.max_newton_iterations},
                {"max_continuation_steps", spec.solver.max_continuation_steps}}}};
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json matrix_json(const Eigen::MatrixXcd& m) {
  return json{{"re", matrix_json(Eigen::MatrixXd(m.real()))},
              {"im", matrix_json(Eigen::MatrixXd(m.imag()))}};
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out += fmt::format("{}{:.17g}", c == 0 ? "" : ",", m(r, c));
    }
    out += '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  file << text;
  file.flush();
  if (!file) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

std::string results_csv(const SweepSpec& spec, const std::vector<SweepRecord>& records) {
  std::string out = "grid_i,grid_j";
  for (const auto& axis : spec.axes) out += "," + axis.name;
  out += ",converged,stable,max_real_part";
  for (auto col : kPairColumns) out += fmt::format(",{}", col);
  out += ",residual\n";
  for (const auto& rec : records) {
    out += fmt::format("{},{}", rec.grid_i, rec.grid_j);
    for (double v : rec.swept) out += "," + number(v);
    out += fmt::format(",{},{},{}", rec.converged ? 1 : 0, rec.stable ? 1 : 0, number(rec.max_real_part));
    for (const auto& en : rec.entanglement) out += en ? "," + number(*en) : std::string(",");
    out += "," + number(rec.residual) + "\n";
  }
  return out;
}

std::string results_json(const SweepSpec& spec, const std::vector<SweepRecord>& records) {
  json rows = json::array();
  for (const auto& rec : records) {
    json row{{"grid_i", rec.grid_i},
             {"grid_j", rec.grid_j},
             {"converged", rec.converged},
             {"stable", rec.stable},
             {"max_real_part", number_json(rec.max_real_part)},
             {"residual", number_json(rec.residual)},
             {"lyapunov_residual", number_json(rec.lyapunov_residual)},
             {"min_symplectic", number_json(rec.min_symplectic)}};
    for (std::size_t a = 0; a < spec.axes.size() && a < rec.swept.size(); ++a) {
      row[spec.axes[a].name] = rec.swept[a];
    }
    for (std::size_t k = 0; k < rec.entanglement.size(); ++k) {
      row[std::string(kPairColumns[k])] =
          rec.entanglement[k] ? json(*rec.entanglement[k]) : json(nullptr);
    }
    if (!rec.error.empty()) row["error"] = rec.error;
    rows.push_back(std::move(row));
  }
  return json{{"spec", to_json(spec)}, {"records", rows}}.dump(1) + "\n";
}

void emit_results(const SweepSpec& spec, const std::vector<SweepRecord>& records, OutputFormat format,
                  const std::filesystem::path& path) {
  if (records.empty()) throw DomainError("no records to write");
  write_text_file(path, format == OutputFormat::csv ? results_csv(spec, records)
                                                    : results_json(spec, records));
}

std::vector<SweepRecord> parse_results_csv(std::string_view text, std::size_t axis_count) {
  const std::size_t columns = 2 + axis_count + 3 + 3 + 1;
  std::vector<SweepRecord> out;
  std::size_t pos = 0;
  bool header = true;
  int line_no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != columns) {
      throw ConfigError(fmt::format("line {}: expected {} fields, found {}", line_no, columns, f.size()));
    }
    if (header) {
      header = false;
      continue;
    }
    SweepRecord rec;
    std::size_t k = 0;
    rec.grid_i = parse_index(f[k++]);
    rec.grid_j = parse_index(f[k++]);
    for (std::size_t a = 0; a < axis_count; ++a) rec.swept.push_back(parse_double(f[k++]));
    rec.converged = parse_flag(f[k++]);
    rec.stable = parse_flag(f[k++]);
    rec.max_real_part = parse_double(f[k++]);
    for (auto& en : rec.entanglement) {
      const auto field = f[k++];
      if (!field.empty()) en = parse_double(field);
    }
    rec.residual = parse_double(f[k++]);
    rec.lyapunov_residual = std::numeric_limits<double>::quiet_NaN();
    rec.min_symplectic = std::numeric_limits<double>::quiet_NaN();
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace optomech
