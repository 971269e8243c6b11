#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "vischase/error.hpp"

namespace vischase::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kInfeasible = 3, kIo = 4 };

/// Exit status for a library error: I/O -> 4, malformed input -> 2,
/// anything raised by a planning stage -> 3.
int exit_code_for(const Error& e);

/// Runs one command. `args` excludes the program name. Human-readable
/// progress goes to `out`, a JSON error object to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vischase::cli
