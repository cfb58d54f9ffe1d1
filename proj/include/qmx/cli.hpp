#pragma once

#include <iosfwd>
#include <string>

namespace qmx::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kUsage = 2,
  kNumeric = 3,
};

/// Entry point behind the `qmx` binary. Subcommands: tabulate, xi, verify, limit.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

}  // namespace qmx::cli
