#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mdk::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kVerdictFail = 1, kInputError = 2, kUnreliable = 3 };

/// Runs the `mdk` command line. args[0] is the program name. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mdk::cli
