#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace optomech::cli {

/// Runs the command-line tool on `args` (without the program name).
/// Returns 0 on success, 1 on physics or I/O failures, 2 on usage or
/// configuration errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace optomech::cli
