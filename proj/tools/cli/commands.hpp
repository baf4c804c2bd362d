#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace fput2d::cli {

enum ExitCode : int { kOk = 0, kConfig = 1, kCarrier = 2, kSolver = 3, kAcceptance = 4 };

int exit_code_for(ErrorKind kind);

/// Entry point shared by main() and the tests. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fput2d::cli
