#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "loopsoup/capacity.hpp"
#include "loopsoup/runner.hpp"
#include "loopsoup/stats.hpp"

namespace loopsoup {

enum class ExperimentKind {
  OneArm,
  TwoPoint,
  ClusterTail,
  ExcursionTail,
  CrossingScan,
  FirstShell,
  CapacityGrowth,
  GwProgeny,
};

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::OneArm;
  int dimension = 5;
  double alpha = 1.0;
  double kappa = 0.0;
  std::vector<int> sizes{2, 3, 4, 6};  // n, offsets |x|_inf, k, or tail thresholds, per kind
  double box_factor = 2.0;             // lambda
  std::uint64_t replicas = 10000;
  std::uint64_t seed = 1;

  int box_radius = 0;                     // cluster-tail / first-shell box (0: 16)
  bool full_cluster = true;               // cluster-tail: also the tail of #C(0)
  std::vector<double> alphas{0.05, 0.1, 0.2, 0.4};  // crossing-scan grid
  double beta = 2.0;                      // crossing-scan annulus ratio
  double level = 0.5;                     // crossing-scan reporting level
  int horizon = 0;                        // excursion-tail walk horizon (0: automatic)
  std::vector<int> dimensions{6, 8, 10};  // first-shell threshold proxies
  int truncation_radius = 8;              // first-shell lattice sum radius
  double tail_exponent = 1.5;             // gw-progeny offspring tail a
  double mean = 0.5;                      // gw-progeny offspring mean
  int generations = 12;                   // gw-progeny generations tracked
  std::uint64_t capacity_walks = 400;     // capacity-growth walks per cluster

  void validate() const;
};

struct ExperimentResult {
  std::vector<EstimateRow> rows;
  std::optional<SlopeFit> fit;
  std::map<std::string, double> metadata;  // prefactors, references, fit policy notes
  std::vector<std::string> notes;
  /// Task key -> base stream id; replica r draws from derive_stream(id, r).
  std::vector<std::pair<std::string, std::uint64_t>> streams;
};

struct RunControl {
  int workers = 1;
  std::string checkpoint_path;
};

/// Defaults for one experiment kind (sizes, box and replica counts).
ExperimentSpec default_spec(ExperimentKind kind);

/// Stream id of replica r of a sub-task such as "one-arm/n=4".
std::uint64_t replica_stream(const std::string& task, std::uint64_t r);
/// Base stream ids of every task a runner has run.
std::vector<std::pair<std::string, std::uint64_t>> task_streams(const ReplicaRunner& runner);

ExperimentResult run_experiment(const ExperimentSpec& spec, const RunControl& control = {});

ExperimentResult run_one_arm(const ExperimentSpec& spec, const RunControl& control = {});
ExperimentResult run_two_point(const ExperimentSpec& spec, const RunControl& control = {});
ExperimentResult run_cluster_tail(const ExperimentSpec& spec, const RunControl& control = {});
ExperimentResult run_excursion_tail(const ExperimentSpec& spec, const RunControl& control = {});
ExperimentResult run_crossing_scan(const ExperimentSpec& spec, const RunControl& control = {});
ExperimentResult run_first_shell(const ExperimentSpec& spec, const RunControl& control = {});
ExperimentResult run_capacity_growth(const ExperimentSpec& spec, const RunControl& control = {});
ExperimentResult run_gw_progeny(const ExperimentSpec& spec, const RunControl& control = {});

/// Mass of loops of the box B(0, outer) through 0 that reach the boundary of
/// B(0, n): log G_{B(0,outer)}(0,0) - log G_{B(0,n-1)}(0,0).
double one_loop_arm_mass(int dimension, int n, int outer, double kappa);

/// Tail probabilities P[X > x] at each threshold from replica values.
std::vector<EstimateRow> tail_rows(const std::string& kind, const ExperimentSpec& spec,
                                   const std::vector<double>& values, const std::vector<double>& thresholds,
                                   double wall_time);

/// Offspring law of the GW experiments: 0 with probability 1 - q, otherwise
/// Y with P[Y >= k] = k^{-a}; q = mean / zeta(a).
struct GwOffspring {
  double tail_exponent;
  double q;
  GwOffspring(double a, double mean);
  std::uint64_t sample(RngStream& rng) const;
};

struct GwRun {
  std::uint64_t total_progeny = 0;
  std::vector<std::uint64_t> generation_sizes;  // Z_0 = 1, Z_1, ...
};
/// One tree; progeny above `cap` is reported as cap + 1.
GwRun simulate_gw(const GwOffspring& law, int generations, std::uint64_t cap, RngStream& rng);

}  // namespace loopsoup
