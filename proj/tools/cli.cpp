#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "optomech/errors.hpp"
#include "optomech/export.hpp"

namespace optomech::cli {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "1.0.0";

struct Options {
  std::string config;
  std::vector<std::string> settings;
  std::string out;
  std::string format = "json";
  std::vector<std::string> pairs;
  double margin = 1e-8;
  unsigned workers = 0;
  std::string preset;
};

class UsageError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

void apply_settings(SystemParams& params, const std::vector<std::string>& settings) {
  for (const auto& s : settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError(fmt::format("--set expects key=value, got '{}'", s));
    apply_setting(params, s.substr(0, eq), s.substr(eq + 1));
  }
  try {
    validate(params);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

SystemParams point_params(const Options& opt) {
  SystemParams params;
  if (!opt.config.empty()) params = params_from_config(read_text_file(opt.config));
  apply_settings(params, opt.settings);
  return params;
}

std::vector<ModePair> selected_pairs(const Options& opt) {
  if (opt.pairs.empty()) return all_mode_pairs();
  std::vector<ModePair> out;
  for (const auto& p : opt.pairs) {
    try {
      out.push_back(mode_pair_from_string(p));
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

unsigned worker_count(const Options& opt) {
  if (opt.workers > 0) return opt.workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

void write_meta(const std::filesystem::path& path, json meta) {
  meta["version"] = kVersion;
  std::filesystem::path side = path;
  side += ".meta.json";
  write_text_file(side, meta.dump(2) + "\n");
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

/// Prints to stdout, or writes the file plus its metadata sidecar.
void deliver(const Options& opt, std::ostream& out, const std::string& text, json meta) {
  if (opt.out.empty()) {
    out << text;
    return;
  }
  write_text_file(opt.out, text);
  write_meta(opt.out, std::move(meta));
}

json point_meta(const SystemParams& params, const char* command, double elapsed) {
  return json{{"command", command}, {"params", to_json(params)}, {"elapsed_seconds", elapsed}};
}

void cmd_steady(const Options& opt, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const SystemParams params = point_params(opt);
  const MeanFields means = steady_state(params);
  const json doc{{"params", to_json(params)}, {"steady_state", to_json(means)}};
  deliver(opt, out, doc.dump(2) + "\n", point_meta(params, "steady", seconds_since(start)));
}

void cmd_stability(const Options& opt, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const SystemParams params = point_params(opt);
  const MeanFields means = steady_state(params);
  const Mat6 m = drift_matrix(params, means);
  const StabilityReport report = assess_stability(m, opt.margin);
  json doc{{"params", to_json(params)},
           {"steady_state", to_json(means)},
           {"stability", to_json(report)},
           {"margin", opt.margin},
           {"routh_hurwitz_stable", hurwitz_stable(m)}};
  deliver(opt, out, doc.dump(2) + "\n", point_meta(params, "stability", seconds_since(start)));
}

void cmd_entangle(const Options& opt, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const SystemParams params = point_params(opt);
  const std::vector<ModePair> pairs = selected_pairs(opt);
  const MeanFields means = steady_state(params);
  const Mat6 m = drift_matrix(params, means);
  const StabilityReport report = assess_stability(m, opt.margin);
  if (!report.stable) {
    throw PreconditionError(fmt::format(
        "steady state is unstable (max Re lambda = {:.6e}); entanglement is undefined",
        report.max_real_part));
  }
  const CovarianceMatrix cov = solve_lyapunov(m, noise_matrix(params));
  json en = json::object();
  for (ModePair p : pairs) en[std::string(to_string(p))] = log_negativity(reduce_bipartite(cov, p));
  json doc{{"params", to_json(params)},
           {"max_real_part", report.max_real_part},
           {"log_negativity", en},
           {"min_symplectic", symplectic_eigenvalues(cov.v).front()},
           {"lyapunov_residual", lyapunov_residual(m, noise_matrix(params), cov.v)}};
  deliver(opt, out, doc.dump(2) + "\n", point_meta(params, "entangle", seconds_since(start)));
}

void cmd_dump(const Options& opt, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const SystemParams params = point_params(opt);
  const MeanFields means = steady_state(params);
  const LinearModel lin = linear_model(params, means);
  const StabilityReport report = assess_stability(lin.m_drift, opt.margin);
  json doc{{"params", to_json(params)},
           {"steady_state", to_json(means)},
           {"complex_matrix", matrix_json(Eigen::MatrixXcd(lin.a_complex))},
           {"drift_matrix", matrix_json(Eigen::MatrixXd(lin.m_drift))},
           {"noise_matrix", matrix_json(Eigen::MatrixXd(lin.d_noise))},
           {"stability", to_json(report)}};
  if (report.stable) {
    const CovarianceMatrix cov = solve_lyapunov(lin.m_drift, lin.d_noise);
    doc["covariance"] = matrix_json(Eigen::MatrixXd(cov.v));
  } else {
    doc["covariance"] = nullptr;
  }
  doc["dark_mode"] = [&] {
    const DarkModeDiagnostic dm = dark_mode_coupling(params, means);
    return json{{"cavity_bright", dm.cavity_bright},
                {"cavity_dark", dm.cavity_dark},
                {"bright_dark", dm.bright_dark}};
  }();
  deliver(opt, out, doc.dump(2) + "\n", point_meta(params, "dump-matrices", seconds_since(start)));
}

json sweep_meta(const SweepSpec& spec, const std::vector<SweepRecord>& records, unsigned workers,
                double elapsed) {
  std::size_t converged = 0, stable = 0, failed = 0;
  for (const auto& r : records) {
    converged += r.converged ? 1 : 0;
    stable += r.stable ? 1 : 0;
    failed += r.error.empty() ? 0 : 1;
  }
  return json{{"command", "sweep"},
              {"spec", to_json(spec)},
              {"workers", workers},
              {"elapsed_seconds", elapsed},
              {"points", records.size()},
              {"converged", converged},
              {"stable", stable},
              {"with_errors", failed}};
}

void run_and_emit(const SweepSpec& spec, const Options& opt, const std::string& path, std::ostream& out) {
  const OutputFormat format = output_format_from_string(opt.format);
  const unsigned workers = worker_count(opt);
  const auto start = std::chrono::steady_clock::now();
  const auto records = run_sweep(spec, workers);
  const double elapsed = seconds_since(start);
  if (path.empty()) {
    out << (format == OutputFormat::csv ? results_csv(spec, records) : results_json(spec, records));
    return;
  }
  emit_results(spec, records, format, path);
  write_meta(path, sweep_meta(spec, records, workers, elapsed));
}

void apply_sweep_overrides(SweepSpec& spec, const Options& opt, bool margin_given, bool pairs_given) {
  SystemParams base = spec.base;
  apply_settings(base, opt.settings);
  spec.base = base;
  if (margin_given) spec.stability_margin = opt.margin;
  if (pairs_given) spec.bipartitions = selected_pairs(opt);
  validate(spec);
}

void cmd_sweep(const Options& opt, bool margin_given, bool pairs_given, std::ostream& out) {
  SweepSpec spec = sweep_spec_from_config(load_config(opt.config));
  apply_sweep_overrides(spec, opt, margin_given, pairs_given);
  run_and_emit(spec, opt, opt.out, out);
}

void cmd_preset(const Options& opt, bool margin_given, bool pairs_given, std::ostream& out) {
  const auto panels = expand_preset(opt.preset);
  for (const auto& panel : panels) {
    SweepSpec spec = figure_preset(panel);
    apply_sweep_overrides(spec, opt, margin_given, pairs_given);
    std::string path = opt.out;
    if (path.empty()) {
      path = fmt::format("{}.{}", panel, opt.format);
    } else if (panels.size() > 1) {
      const std::filesystem::path p(opt.out);
      path = (p.parent_path() / fmt::format("{}_{}{}", p.stem().string(), panel, p.extension().string()))
                 .string();
    }
    run_and_emit(spec, opt, path, out);
    out << fmt::format("wrote {}\n", path);
  }
}

int report(std::ostream& err, std::string_view kind, std::string_view message, int code) {
  err << fmt::format("error kind={} {}\n", kind, message);
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Steady-state stability and Gaussian entanglement of a two-resonator optomechanical system"};
  app.name("optomech");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Options opt;
  const auto add_params = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "parameter file (key = value lines)");
    sub->add_option("--set", opt.settings, "override a parameter, key=value (repeatable)");
    sub->add_option("--out", opt.out, "output file (stdout when omitted)");
  };
  const auto add_margin = [&](CLI::App* sub) {
    return sub->add_option("--margin", opt.margin, "stability margin: stable iff max Re lambda < -margin")
        ->check(CLI::NonNegativeNumber);
  };
  const auto add_pairs = [&](CLI::App* sub) {
    return sub->add_option("--pair", opt.pairs, "mode pair cav-m1|cav-m2|m1-m2 (repeatable)");
  };
  const auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--workers", opt.workers, "worker threads (default: hardware concurrency)")
        ->check(CLI::PositiveNumber);
  };

  auto* steady = app.add_subcommand("steady", "solve the mean-field steady state");
  add_params(steady);
  auto* stability = app.add_subcommand("stability", "drift-matrix eigenvalues and stability");
  add_params(stability);
  add_margin(stability);
  auto* entangle = app.add_subcommand("entangle", "logarithmic negativity at one parameter point");
  add_params(entangle);
  add_margin(entangle);
  add_pairs(entangle);
  auto* dump = app.add_subcommand("dump-matrices", "complex, drift, noise and covariance matrices");
  add_params(dump);
  add_margin(dump);
  auto* sweep = app.add_subcommand("sweep", "grid sweep described by a config file");
  add_params(sweep);
  sweep->get_option("--config")->required();
  auto* sweep_margin = add_margin(sweep);
  auto* sweep_pairs = add_pairs(sweep);
  add_grid(sweep);
  auto* preset = app.add_subcommand("preset", "regenerate the data of a figure");
  preset->add_option("name", opt.preset, "fig2, fig2a, fig2b, fig3, fig4, fig4ab, fig4cd, fig5, "
                                         "fig5ab, fig5cd or fig6")
      ->required();
  preset->add_option("--set", opt.settings, "override a base parameter, key=value (repeatable)");
  preset->add_option("--out", opt.out, "output file; figure groups get one file per panel");
  auto* preset_margin = add_margin(preset);
  auto* preset_pairs = add_pairs(preset);
  add_grid(preset);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    return report(err, "usage", e.what(), 2);
  }

  try {
    if (steady->parsed()) {
      cmd_steady(opt, out);
    } else if (stability->parsed()) {
      cmd_stability(opt, out);
    } else if (entangle->parsed()) {
      cmd_entangle(opt, out);
    } else if (dump->parsed()) {
      cmd_dump(opt, out);
    } else if (sweep->parsed()) {
      cmd_sweep(opt, sweep_margin->count() > 0, sweep_pairs->count() > 0, out);
    } else if (preset->parsed()) {
      cmd_preset(opt, preset_margin->count() > 0, preset_pairs->count() > 0, out);
    }
  } catch (const UsageError& e) {
    return report(err, "usage", e.what(), 2);
  } catch (const ConfigError& e) {
    return report(err, e.kind(), e.what(), 2);
  } catch (const Error& e) {
    return report(err, e.kind(), e.what(), 1);
  } catch (const std::exception& e) {
    return report(err, "internal", e.what(), 1);
  }
  return 0;
}

}  // namespace optomech::cli
