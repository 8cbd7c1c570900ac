#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dlorenz::cli {

// Exit-code contract shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitEscape = 2;
inline constexpr int kExitVerification = 3;

/// Runs the command line `args` (without the program name). Human-readable
/// summaries go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

/// Thread count used when --threads is absent: DLORENZ_THREADS if set and
/// positive, else 0 (OpenMP default).
int default_threads();

}  // namespace dlorenz::cli
