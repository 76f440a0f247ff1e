#include "loopsoup/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "loopsoup/error.hpp"

namespace loopsoup {

ReplicaRunner::ReplicaRunner(int workers, std::string checkpoint_path)
    : workers_(workers), checkpoint_(std::move(checkpoint_path)) {
  if (workers_ < 1) throw ConfigError("workers must be >= 1");
  if (!checkpoint_.empty()) load_checkpoint();
}

// Line format: key chunk count v1 v2 ... end
void ReplicaRunner::load_checkpoint() {
  std::ifstream in(checkpoint_);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string key, token;
    std::uint64_t chunk = 0, count = 0;
    if (!(ss >> key >> chunk >> count)) continue;
    std::vector<double> values;
    values.reserve(count);
    bool ok = true;
    for (std::uint64_t i = 0; i < count && ok; ++i) {
      if (!(ss >> token)) {
        ok = false;
        break;
      }
      values.push_back(std::strtod(token.c_str(), nullptr));
    }
    if (ok && (ss >> token) && token == "end") saved_[key][chunk] = std::move(values);
  }
}

ReplicaValues ReplicaRunner::run(const ReplicaTask& task) {
  if (task.channels < 1) throw ConfigError("replica task needs at least one channel");
  const auto t0 = std::chrono::steady_clock::now();
  ReplicaValues out;
  out.replicas = task.replicas;
  out.channels = task.channels;
  out.values.assign(task.replicas * task.channels, 0.0);
  const std::uint64_t chunks = (task.replicas + kChunk - 1) / kChunk;
  auto& saved = saved_[task.key];
  if (std::find(keys_.begin(), keys_.end(), task.key) == keys_.end()) keys_.push_back(task.key);

  const int workers = std::max(1, std::min<int>(workers_, static_cast<int>(std::min<std::uint64_t>(chunks * kChunk, 1 << 20))));
  std::vector<ReplicaFn> fns;
  for (int w = 0; w < workers; ++w) fns.push_back(task.make_worker());

  std::FILE* cp = checkpoint_.empty() ? nullptr : std::fopen(checkpoint_.c_str(), "a");
  if (!checkpoint_.empty() && !cp) throw RuntimeError("cannot open checkpoint file " + checkpoint_);
  for (std::uint64_t c = 0; c < chunks; ++c) {
    const std::uint64_t begin = c * kChunk, end = std::min(task.replicas, begin + kChunk);
    const std::size_t n = (end - begin) * task.channels;
    auto it = saved.find(c);
    if (it != saved.end() && it->second.size() == n) {
      std::copy(it->second.begin(), it->second.end(), out.values.begin() + begin * task.channels);
      resumed_ += end - begin;
      continue;
    }
    std::vector<std::exception_ptr> errors(workers);
    auto body = [&](int w) {
      try {
        for (std::uint64_t r = begin + w; r < end; r += workers) {
          fns[w](r, std::span<double>(out.values.data() + r * task.channels, task.channels));
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    };
    if (workers == 1) {
      body(0);
    } else {
      std::vector<std::thread> threads;
      for (int w = 0; w < workers; ++w) threads.emplace_back(body, w);
      for (auto& t : threads) t.join();
    }
    for (auto& e : errors) {
      if (e) {
        if (cp) std::fclose(cp);
        std::rethrow_exception(e);
      }
    }
    if (cp) {
      std::fprintf(cp, "%s %llu %zu", task.key.c_str(), static_cast<unsigned long long>(c), n);
      for (std::size_t i = 0; i < n; ++i) std::fprintf(cp, " %a", out.values[begin * task.channels + i]);
      std::fprintf(cp, " end\n");
      std::fflush(cp);
    }
  }
  if (cp) std::fclose(cp);
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace loopsoup
