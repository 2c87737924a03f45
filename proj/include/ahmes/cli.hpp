#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ahmes {

// Parses and runs one command line (program name excluded). Writes the
// result document to `out`, diagnostics to `err`, and returns the process
// exit code:
//   0  success / certificate valid
//   1  definite failure (violated hypothesis, invalid certificate,
//      unreachable target, isolation failure)
//   2  undecided within the precision or iteration budget
//   3  usage or input error
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace ahmes
