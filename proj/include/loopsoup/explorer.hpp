#pragma once

#include <cstdint>
#include <vector>

#include "loopsoup/sampler.hpp"

namespace loopsoup {

struct ExploreResult {
  LoopList loops;      // every soup loop that meets the explored cluster
  bool stopped = false;  // the stop radius was reached before the cluster was exhausted
  int reached_radius = 0;  // largest sup norm among revealed sites
  std::size_t explored = 0;  // vertices processed
};

/// Reveals the loops of a box soup that meet the cluster of one vertex.
/// Vertices are processed in discovery order starting from the root; each
/// vertex draws the loops through it that avoid the vertices processed before
/// it (the sampler's minimal-vertex step with an adaptive order). Loops that
/// avoid every processed vertex are independent of what has been revealed, so
/// when no unprocessed vertex lies on a revealed loop, every loop meeting the
/// root's cluster has been drawn, with the law of the full-box soup.
class ClusterExplorer {
 public:
  ClusterExplorer(const LatticeSpec& spec, double alpha, int jmax = 0, double green_bound = 0.0);

  const Box& box() const { return box_; }
  const MultiplicityCap& cap() const { return cap_; }

  /// stop_radius > 0 stops as soon as a revealed site has sup norm >= stop_radius.
  ExploreResult explore(RngStream& rng, int stop_radius = 0) { return explore_from(box_.origin(), rng, stop_radius); }
  ExploreResult explore_from(SiteIndex root, RngStream& rng, int stop_radius = 0) {
    const SiteIndex roots[1] = {root};
    return explore_set(roots, rng, stop_radius);
  }
  /// Reveals every loop meeting a cluster that meets `roots`.
  ExploreResult explore_set(std::span<const SiteIndex> roots, RngStream& rng, int stop_radius = 0);

  /// Only the loops through `root`: the first step of the exploration.
  LoopList root_loops(SiteIndex root, RngStream& rng);

 private:
  Box box_;
  MultiplicityCap cap_;
  VertexSampler sampler_;
  std::vector<std::uint8_t> state_;  // 0 unseen, 1 queued, 2 processed
  std::vector<SiteIndex> touched_;
};

}  // namespace loopsoup
