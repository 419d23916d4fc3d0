#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "optomech/model.hpp"

namespace optomech {

/// Names of the numeric SystemParams fields, in declaration order.
const std::vector<std::string>& param_field_names();

bool is_param_field(std::string_view name);

/// Numeric field access by name. `nth` is accepted as a pseudo-field that
/// addresses nth1 and nth2 together (reads return nth1).
double get_param(const SystemParams& params, std::string_view name);
void set_param(SystemParams& params, std::string_view name, double value);

/// Applies `key = value` text to a parameter set; `detuning_mode` takes
/// bare|effective, every other key must be a numeric field.
void apply_setting(SystemParams& params, std::string_view key, std::string_view value);

/// Strict double parse: the whole token must be consumed.
double parse_double(std::string_view text);

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct ConfigSection {
  std::string name;
  std::vector<ConfigEntry> entries;
  int line = 0;
};

/// Plain-text configuration: `key = value` lines, `#` comments, and optional
/// `[section]` headers. Entries before the first header are the top level.
struct ConfigDocument {
  std::vector<ConfigEntry> top;
  std::vector<ConfigSection> sections;
};

ConfigDocument parse_config(std::string_view text);
ConfigDocument load_config(const std::filesystem::path& path);

/// Builds parameters from top-level entries over `defaults`. Unknown keys
/// and duplicate keys are ConfigErrors.
SystemParams params_from_entries(const std::vector<ConfigEntry>& entries,
                                 const SystemParams& defaults = {});

/// Accepts only a params-only document (no sections).
SystemParams params_from_config(std::string_view text, const SystemParams& defaults = {});

/// `key = value` lines for every field, with shortest round-trip numbers.
std::string to_config_string(const SystemParams& params);

/// Shortest representation that parses back to the same double.
std::string format_roundtrip(double value);

}  // namespace optomech
