#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "kronspec/harness.hpp"

namespace kronspec {

enum ExitCode : int {
  kExitPass = 0,
  kExitToleranceFail = 1,
  kExitUsage = 2,  // bad flags, bad config, I/O failure
  kExitNumerical = 3,
};

/// "start:stop:step": start + i*step for every i with the point at most
/// stop + step/2. Throws std::invalid_argument on malformed input.
std::vector<double> parse_grid(std::string_view spec);

/// Source names as on the command line: an ensemble name, "zero", "identity",
/// "complete-graph", "wishart:RATIO", or "diagonal:v1,v2,...".
MatrixSource parse_cli_source(std::string_view text);

/// Runs one subcommand (sample | predict | compare | moments | support).
/// args excludes the program name. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace kronspec
