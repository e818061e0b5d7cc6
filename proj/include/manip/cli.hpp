#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace manip {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 1,
  kExitConfig = 2,
  kExitEngine = 3,
};

/// Runs manipctl with `args` (excluding the program name). Never throws.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace manip
