#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "deltawell/bound_states.hpp"

namespace deltawell::cli {

enum ExitCode : int {
  kOk = 0,
  kDomainError = 2,
  kConsistencyFailure = 3,
  kNumericalAbort = 4,
};

/// One of the eight reference states: two defect strengths, four panels
/// each.  `unstable` is the expected verdict.
struct ReferenceCase {
  std::string label;
  double omega = 0.0;
  double L = 1.0;
  double epsilon = 1.0;
  BranchChoice branch;
  bool unstable = false;
};

const std::vector<ReferenceCase>& reference_cases();

/// Entry point of the `deltawell` tool.  Data files go to --out, the JSON
/// summary to `out`, diagnostics to `err`.  Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace deltawell::cli
