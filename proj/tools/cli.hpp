#pragma once

#include <string>
#include <vector>

namespace mkv::cli {

enum ExitCode : int { ok = 0, config_error = 2, numerical_error = 3 };

/// Parses `args` (without the program name) and runs the selected command.
/// Diagnostics go to stderr; never throws.
int run(const std::vector<std::string>& args);

}  // namespace mkv::cli
