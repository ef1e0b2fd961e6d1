#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace expertgame::cli {

/// Exit codes of the command-line front end.
enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2 };

/// Runs the `expertgame` command line. argv[0] is the program name.
int run(const std::vector<std::string>& argv, std::ostream& out,
        std::ostream& err);

}  // namespace expertgame::cli
