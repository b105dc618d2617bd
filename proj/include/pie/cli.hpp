#pragma once

#include <iosfwd>

namespace pie {

/// Version string echoed in every OutputRecord's meta block.
inline constexpr const char* kToolName = "pieprox";
inline constexpr const char* kToolVersion = "1.0.0";

/// Full CLI entry point: parses argv, runs the subcommand, writes data to
/// `out` and diagnostics to `err`. Returns the process exit code:
/// 0 success, 2 usage/precondition error, 3 oracle cross-check failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pie
