#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ppbary {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitUnsupported = 3;

/// Runs the command line `args` (without the program name). Returns the
/// process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ppbary
