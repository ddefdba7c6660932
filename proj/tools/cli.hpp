#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace carbonledger::cli {

/// Exit codes: 0 success, 1 runtime or data error, 2 usage error.
enum ExitCode : int { kOk = 0, kRuntimeError = 1, kUsageError = 2 };

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace carbonledger::cli
