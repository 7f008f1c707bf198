#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gradcp::cli {

/// Exit status: 0 success, 1 usage or configuration error, 2 data error.
enum ExitCode : int { Success = 0, UsageError = 1, DataFailure = 2 };

/// Runs `gradcp <command> [flags]`. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

} // namespace gradcp::cli
