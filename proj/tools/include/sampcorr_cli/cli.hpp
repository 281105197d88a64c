#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sampcorr::cli {

enum ExitCode : int { kOk = 0, kContractFailure = 1, kUsage = 2 };

// Runs one command line (args excludes the program name). Primary output goes to out
// unless --out is given; diagnostics go to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace sampcorr::cli
