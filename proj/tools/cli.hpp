#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rlcu::cli {

enum ExitCode { ok = 0, failure = 1, parse_error = 2, infeasible = 3, unstable = 4 };

// Runs one command line; report text goes to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rlcu::cli
