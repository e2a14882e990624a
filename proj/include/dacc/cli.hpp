#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace dacc {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitConfig = 2, kExitComputation = 3 };

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace dacc
