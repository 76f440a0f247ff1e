#include "loopsoup/explorer.hpp"

#include <algorithm>

namespace loopsoup {

ClusterExplorer::ClusterExplorer(const LatticeSpec& spec, double alpha, int jmax, double green_bound)
    : box_(spec),
      cap_(choose_multiplicity_cap(spec, alpha, jmax, green_bound)),
      sampler_(box_, alpha, cap_.jmax),
      state_(box_.size(), 0) {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
}

ExploreResult ClusterExplorer::explore_set(std::span<const SiteIndex> roots, RngStream& rng, int stop_radius) {
  ExploreResult result;
  for (SiteIndex v : touched_) state_[v] = 0;
  touched_.clear();
  for (SiteIndex root : roots) {
    if (root >= box_.size()) throw ConfigError("root outside the box");
    if (state_[root] == 0) {
      state_[root] = 1;
      touched_.push_back(root);
    }
  }
  const auto processed = [this](SiteIndex x) { return state_[x] == 2; };
  for (std::size_t head = 0; head < touched_.size(); ++head) {
    const SiteIndex v = touched_[head];
    const std::size_t first = result.loops.total_length();
    RngStream vrng = rng.child(v);
    sampler_.sample(v, vrng, processed, result.loops);
    state_[v] = 2;
    ++result.explored;
    for (std::size_t k = first; k < result.loops.total_length(); ++k) {
      const SiteIndex s = result.loops.sites[k];
      if (state_[s] == 0) {
        state_[s] = 1;
        touched_.push_back(s);
        result.reached_radius = std::max(result.reached_radius, box_.sup_norm(s));
      }
    }
    if (stop_radius > 0 && result.reached_radius >= stop_radius) {
      result.stopped = true;
      break;
    }
  }
  return result;
}

LoopList ClusterExplorer::root_loops(SiteIndex root, RngStream& rng) {
  if (root >= box_.size()) throw ConfigError("root outside the box");
  LoopList out;
  RngStream vrng = rng.child(root);
  sampler_.sample(root, vrng, [](SiteIndex) { return false; }, out);
  return out;
}

}  // namespace loopsoup
