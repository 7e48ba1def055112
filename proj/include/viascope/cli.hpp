#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace viascope {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNumericalError = 2;

/// Runs one CLI invocation. `args` excludes the program name. Every output
/// file is written only after all computation for the subcommand succeeded.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace viascope
