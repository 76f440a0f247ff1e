#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace loopsoup {

/// Per-thread replica function: fills `out` (one value per channel) for a replica index.
using ReplicaFn = std::function<void(std::uint64_t replica, std::span<double> out)>;

struct ReplicaTask {
  std::string key;  // unique within a run; names the checkpoint records
  std::uint64_t replicas = 0;
  int channels = 1;
  /// Called once per worker thread; the returned closure may hold per-thread state.
  std::function<ReplicaFn()> make_worker;
};

/// Replica values in replica order (replicas x channels, row-major), so any
/// reduction over them is independent of scheduling.
struct ReplicaValues {
  std::uint64_t replicas = 0;
  int channels = 1;
  std::vector<double> values;
  double wall_time = 0.0;

  double at(std::uint64_t r, int c) const { return values[r * channels + c]; }
};

/// Runs replica tasks in chunks of 1000 replicas on `workers` threads. With a
/// checkpoint path, every finished chunk is appended to the file (values in
/// hexadecimal floating point, so a resumed run is bit-identical) and chunks
/// already present are loaded instead of recomputed.
class ReplicaRunner {
 public:
  static constexpr std::uint64_t kChunk = 1000;

  explicit ReplicaRunner(int workers = 1, std::string checkpoint_path = {});

  ReplicaValues run(const ReplicaTask& task);
  std::uint64_t resumed_replicas() const { return resumed_; }
  /// Keys of the tasks run so far, in order.
  const std::vector<std::string>& task_keys() const { return keys_; }

 private:
  void load_checkpoint();

  int workers_;
  std::string checkpoint_;
  std::map<std::string, std::map<std::uint64_t, std::vector<double>>> saved_;  // key -> chunk -> values
  std::uint64_t resumed_ = 0;
  std::vector<std::string> keys_;
};

}  // namespace loopsoup
