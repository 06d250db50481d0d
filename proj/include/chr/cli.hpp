#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chr {

/// Exit codes of `chr run`.
enum RunExit : int {
  kExitNormalForm = 0,
  kExitFailed = 1,
  kExitStepLimit = 2,
  kExitRuntimeError = 3,
  kExitInputError = 4,
};

/// Exit codes of `chr analyze`.
enum AnalyzeExit : int {
  kExitPositive = 0,
  kExitNegative = 1,
  kExitUnknown = 2,
};

/// Runs the command line `args` (without the program name), writing the
/// report to `out` and diagnostics to `err`. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chr
