#pragma once

#include <functional>
#include <string>
#include <vector>

namespace degenid::app {

struct CriterionResult {
  int id;
  std::string label;
  bool pass;
  std::string detail;
  double seconds;
};

// Runs the full acceptance battery (sixteen criteria, fixed tolerances).
// on_result fires after each criterion so long runs can stream progress.
std::vector<CriterionResult> run_acceptance(
    const std::function<void(const CriterionResult&)>& on_result = {});

// The two wave-transform criteria on their own, for the reznitskaya-check
// subcommand (same tolerances as the battery).
CriterionResult transform_equivalence_criterion();
CriterionResult transform_identity_criterion();

}  // namespace degenid::app
