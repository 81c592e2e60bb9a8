#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace idemlab::cli {

// Stable exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 2;
inline constexpr int kRejected = 3;
inline constexpr int kVerifyFailed = 4;

/// Runs the command line (without the program name) and returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace idemlab::cli
