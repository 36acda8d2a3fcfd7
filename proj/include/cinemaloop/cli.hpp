#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cinemaloop {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one `cinemaloop` subcommand. `args` excludes the program name.
/// Returns 0 on success, 1 on I/O or validation failure, 2 on usage errors;
/// diagnostics go to `err` as a single line.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace cinemaloop
