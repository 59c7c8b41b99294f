#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace biorth::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kComputationError = 1,
  kUsageError = 2,
  kPropertyViolation = 3,
};

/// Runs one command line (args excludes the program name).  Reports go to
/// --out (written atomically) or to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv);

}  // namespace biorth::cli
