#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace biss::cli {

/// Runs the command line `args` (without the program name). Exit codes:
/// 0 success, 1 input error or failed verification, 2 when a minimize seed
/// timed out without finding any reduction.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace biss::cli
