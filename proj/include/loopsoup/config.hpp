#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "loopsoup/estimators.hpp"
#include "loopsoup/sampler.hpp"

namespace loopsoup {

struct SoupConfig {
  int dimension = 3;
  int box_radius = 4;
  double kappa = 0.0;
  double alpha = 1.0;
  std::string order = "lexicographic";  // or "reverse"
  int jmax = 0;
  std::uint64_t stream = 0;
  std::uint64_t length_budget = 200'000'000;
};

/// Inputs of the exact, green and analyze commands.
struct QueryConfig {
  std::vector<Site> points{{0, 0, 0}};
  std::string soup_file;  // analyze: soup text file (empty samples a fresh soup)
  int radius = 1;         // analyze: one-arm radius
};

struct RunConfig {
  std::uint64_t seed = 1;
  int workers = 1;
  std::string output_dir = "loopsoup-out";
  std::uint64_t memory_budget_mb = 4096;
  std::string level = "quick";
  SoupConfig soup;
  ExperimentSpec experiment = default_spec(ExperimentKind::OneArm);
  QueryConfig query;

  void validate() const;
};

/// JSON text of a configuration (every key, so it doubles as the defaults listing).
std::string config_to_json(const RunConfig& config);
/// Parses JSON text; missing keys keep their defaults, unknown keys are rejected.
/// An "experiment" section starts from the defaults of its "kind".
RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::string& path);

SoupParams soup_params(const RunConfig& config);

/// Rough peak memory of sampling the configured soup, in MiB.
double soup_memory_estimate_mb(const SoupConfig& soup);

}  // namespace loopsoup
