#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace symdyn {

enum ExitCode : int { kExitOk = 0, kExitCertificate = 1, kExitUsage = 2, kExitBudget = 3 };

// Entry point of the command-line tool. Every run writes run_record.json
// into the output directory, along with the command's artifacts.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace symdyn
