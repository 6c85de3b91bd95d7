#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cgw {

/// Runs the command line `args` (without the program name). Returns the
/// process exit code: 0 success, 1 internal error, 2 invalid input or a
/// violated model assumption.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cgw
