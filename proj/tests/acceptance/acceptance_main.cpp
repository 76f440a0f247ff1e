// Acceptance suite: one pass/fail line per primary criterion.
// Usage: loopsoup_acceptance [quick|full] [criterion ids...]
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "loopsoup/validation.hpp"

int main(int argc, char** argv) {
  using namespace loopsoup;
  ValidationOptions options;
  options.level = ValidationLevel::Full;
  if (const char* env = std::getenv("LOOPSOUP_WORKERS")) options.workers = std::max(1, std::atoi(env));
  if (const char* env = std::getenv("LOOPSOUP_SEED")) options.seed = std::strtoull(env, nullptr, 10);
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "quick") {
      options.level = ValidationLevel::Quick;
    } else if (a == "full") {
      options.level = ValidationLevel::Full;
    } else {
      ids.push_back(std::atoi(a.c_str()));
    }
  }
  if (ids.empty()) {
    for (const auto& c : acceptance_criteria()) ids.push_back(c.id);
  }
  std::vector<CriterionResult> results;
  for (int id : ids) {
    results.push_back(run_criterion(id, options));
    std::printf("%s\n", format_result_line(results.back()).c_str());
    std::fflush(stdout);
  }
  const bool ok = validation_passed(results);
  const auto known = std::count_if(results.begin(), results.end(),
                                   [](const CriterionResult& r) { return r.status == CriterionStatus::KnownFailure; });
  if (!ok) {
    std::printf("acceptance: FAILED\n");
  } else if (known > 0) {
    std::printf("acceptance: passed with %ld documented known failure(s)\n", static_cast<long>(known));
  } else {
    std::printf("acceptance: all criteria pass\n");
  }
  return ok ? 0 : 1;
}
