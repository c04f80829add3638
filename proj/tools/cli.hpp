#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace depagg::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,     // bad flags or flag combinations
  kInput = 2,     // unreadable or malformed inputs, failed runs
  kRejected = 3,  // treebank rejected by the preprocessing thresholds
};

/// Runs one subcommand. args excludes the program name. Failures print a
/// single "depagg: ..." line to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace depagg::cli
