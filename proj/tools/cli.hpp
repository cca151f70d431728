#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bcpace::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInputError = 1,
  kConditionFailure = 2,
  kInsufficientData = 3,
};

/// Runs the command line `args` (program name excluded) and returns the
/// process exit code. All output goes to the given streams.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bcpace::cli
