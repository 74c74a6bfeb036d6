#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tpfr {

enum ExitCode : int { kExitPass = 0, kExitViolation = 1, kExitUsage = 2, kExitCap = 3 };

/// Runs one command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace tpfr
