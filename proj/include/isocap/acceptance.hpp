#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace isocap {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs the full verification suite (closed forms, inequality sweeps, gradient
// checks, solver regimes, scan identities, gluing concavity, nonexistence
// probe, wall-clock budget) and prints one pass/fail line per criterion.
std::vector<CriterionResult> run_acceptance(std::ostream& log);

bool all_pass(const std::vector<CriterionResult>& results);

}  // namespace isocap
