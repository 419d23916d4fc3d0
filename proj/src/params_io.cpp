#include "optomech/params_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <fmt/format.h>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

using Member = double SystemParams::*;

const std::vector<std::pair<std::string, Member>>& field_table() {
  static const std::vector<std::pair<std::string, Member>> table = {
      {"omega1", &SystemParams::omega1}, {"omega2", &SystemParams::omega2},
      {"gamma1", &SystemParams::gamma1}, {"gamma2", &SystemParams::gamma2},
      {"kappa", &SystemParams::kappa},   {"delta", &SystemParams::delta},
      {"g", &SystemParams::g},           {"jm", &SystemParams::jm},
      {"theta", &SystemParams::theta},   {"eta", &SystemParams::eta},
      {"alpha_in", &SystemParams::alpha_in}, {"nth1", &SystemParams::nth1},
      {"nth2", &SystemParams::nth2},
  };
  return table;
}

Member find_member(std::string_view name) {
  for (const auto& [key, member] : field_table()) {
    if (key == name) return member;
  }
  return nullptr;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

const std::vector<std::string>& param_field_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& entry : field_table()) out.push_back(entry.first);
    return out;
  }();
  return names;
}

bool is_param_field(std::string_view name) {
  return name == "nth" || find_member(name) != nullptr;
}

double get_param(const SystemParams& params, std::string_view name) {
  if (name == "nth") return params.nth1;
  if (const Member m = find_member(name)) return params.*m;
  throw ConfigError(fmt::format("unknown parameter '{}'", name));
}

void set_param(SystemParams& params, std::string_view name, double value) {
  if (name == "nth") {
    params.nth1 = value;
    params.nth2 = value;
    return;
  }
  if (const Member m = find_member(name)) {
    params.*m = value;
    return;
  }
  throw ConfigError(fmt::format("unknown parameter '{}'", name));
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError(fmt::format("cannot parse '{}' as a number", text));
  }
  return value;
}

void apply_setting(SystemParams& params, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "detuning_mode") {
    try {
      params.detuning_mode = detuning_mode_from_string(value);
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    return;
  }
  if (!is_param_field(key)) throw ConfigError(fmt::format("unknown parameter '{}'", key));
  set_param(params, key, parse_double(value));
}

ConfigDocument parse_config(std::string_view text) {
  ConfigDocument doc;
  std::vector<ConfigEntry>* target = &doc.top;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError(fmt::format("line {}: malformed section header '{}'", line_no, line));
      }
      doc.sections.push_back({std::string(trim(line.substr(1, line.size() - 2))), {}, line_no});
      target = &doc.sections.back().entries;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("line {}: expected 'key = value', got '{}'", line_no, line));
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(fmt::format("line {}: empty key or value", line_no));
    }
    target->push_back({std::string(key), std::string(value), line_no});
  }
  return doc;
}

ConfigDocument load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

SystemParams params_from_entries(const std::vector<ConfigEntry>& entries,
                                 const SystemParams& defaults) {
  SystemParams params = defaults;
  std::set<std::string> seen;
  for (const auto& e : entries) {
    if (!seen.insert(e.key).second) {
      throw ConfigError(fmt::format("line {}: duplicate key '{}'", e.line, e.key));
    }
    try {
      apply_setting(params, e.key, e.value);
    } catch (const ConfigError& err) {
      throw ConfigError(fmt::format("line {}: {}", e.line, err.what()));
    }
  }
  return params;
}

SystemParams params_from_config(std::string_view text, const SystemParams& defaults) {
  const ConfigDocument doc = parse_config(text);
  if (!doc.sections.empty()) {
    throw ConfigError(fmt::format("line {}: unexpected section '[{}]' in a parameter file",
                                  doc.sections.front().line, doc.sections.front().name));
  }
  return params_from_entries(doc.top, defaults);
}

std::string format_roundtrip(double value) { return fmt::format("{}", value); }

std::string to_config_string(const SystemParams& params) {
  std::string out;
  for (const auto& [key, member] : field_table()) {
    out += fmt::format("{} = {}\n", key, format_roundtrip(params.*member));
  }
  out += fmt::format("detuning_mode = {}\n", to_string(params.detuning_mode));
  return out;
}

}  // namespace optomech
