#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sawbound::cli {

// Runs the command line (without the program name) against the given
// streams. Returns the process exit code: 0 success, 1 domain errors,
// 2 usage errors.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace sawbound::cli
