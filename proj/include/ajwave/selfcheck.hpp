#pragma once

#include <string>
#include <vector>

// Runtime verification suite: every module invariant executed against live
// code with measured residuals. Deterministic; drives the `verify` command.

namespace ajwave {

struct CheckResult {
  std::string name;
  double residual = 0.0;   // measured value
  double tolerance = 0.0;  // limit after scaling
  bool pass = false;
};

// Runs all checks; tolerances are multiplied by tol_scale (< 1 tightens the
// suite, showing how much margin each residual has).
std::vector<CheckResult> run_self_checks(double tol_scale = 1.0);

}  // namespace ajwave
