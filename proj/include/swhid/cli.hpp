#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace swhid::cli {

enum ExitStatus : int {
  kSuccess = 0,
  kMismatch = 1,
  kUsage = 2,
  kIoFailure = 3,
};

// Runs the command line `args` (args[0] is the program name). Data goes to
// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace swhid::cli
