#pragma once

#include <string>
#include <vector>

namespace bhs {

// Acceptance suite settings. `fast` shrinks meshes and covering levels for a
// quick smoke run (CLI `verify-all --fast`); resolution-bound tolerances are
// relaxed by tolerance_scale there, exact invariants are not.
struct VerifySettings {
  bool fast = false;
  double tolerance_scale() const { return fast ? 4.0 : 1.0; }
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

int criterion_count();
CriterionResult run_criterion(int id, const VerifySettings& settings);
std::vector<CriterionResult> run_all_criteria(const VerifySettings& settings);

}  // namespace bhs
