#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "loopsoup/sampler.hpp"

namespace loopsoup {

enum class ValidationLevel { Quick, Full };

struct ValidationOptions {
  ValidationLevel level = ValidationLevel::Quick;
  int workers = 1;
  std::uint64_t seed = 20240601;
  /// Soup sampler under test; replaceable so tests can inject a faulty one.
  std::function<SoupSample(const SoupParams&)> sampler = sample_soup;
};

enum class CriterionStatus { Pass, Fail, KnownFailure, Skipped };

struct CriterionResult {
  int id = 0;
  std::string title;
  CriterionStatus status = CriterionStatus::Skipped;
  std::string detail;  // measured values against their tolerances
  double seconds = 0.0;
};

struct CriterionInfo {
  int id;
  std::string title;
  bool quick;  // part of the quick subset
};

const std::vector<CriterionInfo>& acceptance_criteria();

/// Runs one criterion. Criteria outside the quick subset are Skipped at Quick.
CriterionResult run_criterion(int id, const ValidationOptions& options);

std::vector<CriterionResult> run_validation(const ValidationOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// True when nothing failed except documented known failures.
bool validation_passed(const std::vector<CriterionResult>& results);

std::string status_name(CriterionStatus status);
std::string validation_json(const std::vector<CriterionResult>& results, ValidationLevel level);
/// One line: "[PASS] 3 enumerator equivalence: ...".
std::string format_result_line(const CriterionResult& result);

}  // namespace loopsoup
