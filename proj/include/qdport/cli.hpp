#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qdport {

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitData = 3, kExitNumerical = 4 };

/// Runs one CLI invocation; argv[0] is the program name.
int cli_dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace qdport
