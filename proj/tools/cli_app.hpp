#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace peakpause::cli {

enum ExitCode : int { kOk = 0, kValidationError = 1, kRuntimeError = 2 };

/// Runs the `peakpause` command line; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace peakpause::cli
