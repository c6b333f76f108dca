#pragma once

#include <iosfwd>

namespace fedcontract::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kValidation = 2,
  kInfeasible = 3,
  kRuntime = 4,
};

/// Entry point for the `fedcontract` tool: subcommands solve, audit,
/// simulate, compare. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fedcontract::cli
