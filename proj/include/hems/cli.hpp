#pragma once

#include <ostream>

namespace hems::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,      // oracle mismatch or a run that could not be solved
  kConfigError = 2,  // bad flags, configuration or input files
};

/// Entry point of the `hems` tool; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hems::cli
