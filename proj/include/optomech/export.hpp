#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "optomech/gaussian.hpp"
#include "optomech/sweep.hpp"

namespace optomech {

nlohmann::json to_json(const SystemParams& params);
nlohmann::json to_json(const MeanFields& means);
nlohmann::json to_json(const StabilityReport& report);
nlohmann::json to_json(const SweepSpec& spec);

/// Row-major nested arrays. Complex matrices become {"re": [...], "im": [...]}.
nlohmann::json matrix_json(const Eigen::MatrixXd& m);
nlohmann::json matrix_json(const Eigen::MatrixXcd& m);

/// Plain CSV of a real matrix, 17 significant digits.
std::string matrix_csv(const Eigen::MatrixXd& m);

/// Writes the whole text or throws IoError naming the path.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace optomech
