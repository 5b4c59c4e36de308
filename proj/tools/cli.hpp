#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lgeo::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitNumerical = 3,
  kExitInvariant = 4,
};

/// Runs one command line (without the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lgeo::cli
