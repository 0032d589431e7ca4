#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ehrelay::cli {

enum ExitCode : int { kOk = 0, kInvalidConfig = 2, kNoConvergence = 3, kValidationFailed = 4 };

/// Runs one CLI invocation. Artifacts go to --out when given, otherwise to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ehrelay::cli
