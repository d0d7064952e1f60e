#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gazelearn::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitContract = 3,
  kExitUsage = 64,
};

/// Runs one command line. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gazelearn::cli
