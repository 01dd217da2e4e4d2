#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace carbonsched::cli {

// Stable exit-code contract for scripting.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitConfigError = 2;

/// Runs `carbonsched <subcommand> ...`. `args[0]` is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace carbonsched::cli
