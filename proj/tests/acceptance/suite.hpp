#pragma once

#include <functional>
#include <string>
#include <vector>

namespace krf::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  // Returns whether the criterion holds and writes its measured values into detail.
  std::function<bool(std::string& detail)> run;
};

std::vector<Criterion> criteria();

/// Runs the selected criteria (all when empty) in order. A criterion also
/// fails when it exceeds its runtime budget or throws.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& which = {});

std::string format_line(const CriterionResult& result);

}  // namespace krf::acceptance
