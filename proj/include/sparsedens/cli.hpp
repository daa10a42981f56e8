#pragma once

#include <ostream>

namespace sparsedens {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitSolver = 3, kExitBudget = 4 };

/// Entry point of the `sparsedens` tool: subcommands estimate, calibrate,
/// benchmark, analyze and gram.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sparsedens
