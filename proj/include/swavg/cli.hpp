#pragma once

#include <iosfwd>

namespace swavg::cli {

enum ExitCode : int {
  kSuccess = 0,
  kNegative = 1,  // certificate invalid, violations found, blow-up, no escape
  kUsage = 2,
  kNumerical = 3,
};

/// Entry point of the `swavg` tool. Results go to `out` (or the --output
/// file), diagnostics to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace swavg::cli
