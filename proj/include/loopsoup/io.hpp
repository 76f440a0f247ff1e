#pragma once

#include <string>
#include <vector>

#include "loopsoup/estimators.hpp"
#include "loopsoup/sampler.hpp"

namespace loopsoup {

inline constexpr const char* kCsvHeader = "kind,d,alpha,kappa,n,value,stderr,replicas,walltime_s";
inline constexpr const char* kToolVersion = "0.1.0";

/// Writes `content` to a temporary file beside `path` and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

std::string rows_to_csv(const std::vector<EstimateRow>& rows);
std::vector<EstimateRow> rows_from_csv(const std::string& text);

/// JSON sidecar with the slope fit, metadata and notes of an experiment.
std::string result_sidecar_json(const ExperimentSpec& spec, const ExperimentResult& result);

/// Line-delimited soup: one loop per line, its length followed by its site indices.
std::string soup_to_text(const LoopList& loops);
LoopList soup_from_text(const std::string& text);

std::string soup_manifest_json(const SoupSample& soup, const std::string& config_json);

/// Run manifest: tool version, config echo, seed, stream ids, timestamps and host.
struct Manifest {
  std::string config_json;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::uint64_t>> streams;
  std::string started;
  std::string finished;
};
std::string manifest_json(const Manifest& manifest);
std::string utc_timestamp();

}  // namespace loopsoup
