#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rankstat::cli {

/// Exit statuses of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

/// Parses the arguments (without the program name), dispatches the
/// subcommand and writes its primary output to `out`. Diagnostics and the
/// machine-readable error object go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rankstat::cli
