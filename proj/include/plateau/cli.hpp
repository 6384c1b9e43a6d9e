#pragma once

#include <string>
#include <vector>

namespace plateau {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitGate = 2, kExitVerify = 3 };

// plateau solve|verify|compete|probe|export --config FILE [--grid N] [--out DIR]
//         [--seed S] [--fault K=V] [--workers W]
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args[0] is the program name

}  // namespace plateau
