#pragma once

#include <iosfwd>

namespace qbattery {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitEnvironment = 2,
  kExitPartialSweep = 3,
  kExitReproMismatch = 4,
};

/// Entry point of the qb tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qbattery
