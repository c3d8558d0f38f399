#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace distmon::cli {

enum ExitStatus : int {
    kSuccess = 0,
    kRuntimeError = 1,
    kUsageError = 2,
};

/// Runs one subcommand. `args` excludes the program name. Data goes to
/// `out`, diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace distmon::cli
