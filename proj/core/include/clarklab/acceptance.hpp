#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace clarklab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;  // 0 when the criterion has none
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240607;
  // Criteria to run; empty means all.
  std::vector<int> only;
  // Scale applied to every pinned tolerance (--strict passes 0.5).
  double tolerance_scale = 1.0;
};

// Runs the acceptance criteria; `report` is called after each one.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {},
                                            const std::function<void(const CriterionResult&)>& report = {});

std::string format(const CriterionResult& r);

}  // namespace clarklab
