#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pairsim::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 1,
  kNumericalError = 2,
};

/// Entry point shared by the `pairsim` binary and the tests. `args[0]` is the
/// program name. Without --out, CSV goes to `out` and the report to `err`;
/// with --out, files are written there and the report goes to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pairsim::cli
