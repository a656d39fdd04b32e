#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace proxiclass::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

// Runs one command line (args[0] is the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Asks a running `serve` to shut down cleanly.
void request_shutdown();

}  // namespace proxiclass::cli
