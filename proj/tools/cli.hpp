#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace maskmetrics::cli {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInvalidInput = 2,  // parse or validation failure
  kIoFailure = 3,
};

// Runs the command line `args` (args[0] is the program name). The summary
// line and other results go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

// Worker cap from MASKMETRICS_THREADS; 0 (no cap) when unset or invalid.
unsigned threads_from_env();

}  // namespace maskmetrics::cli
