#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "loopsoup/capacity.hpp"
#include "loopsoup/sampler.hpp"

namespace loopsoup {

/// Undirected lattice edge with a < b.
struct Edge {
  SiteIndex a = 0;
  SiteIndex b = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Edges traversed by at least one loop (closing pair included), sorted.
std::vector<Edge> open_edges(const LoopList& loops);

struct ClusterReport {
  std::vector<SiteIndex> sites;  // sorted; empty when x lies on no loop
  std::size_t size = 0;
  int reached_radius = 0;  // max sup norm over the cluster (0 when empty)
  /// shells[i] = #{z : loop distance from x to z is i}; shells[0] = 1 for a nonempty cluster.
  std::vector<std::size_t> shells;
  std::optional<CapacityEstimate> capacity;
};

/// Cluster of x by union-find over the open edges, with loop-distance shells
/// from a breadth-first search on the loop-intersection graph.
ClusterReport cluster_of(const LoopList& loops, const Box& box, SiteIndex x);

/// Cluster by breadth-first search over open edges (independent oracle).
std::vector<SiteIndex> cluster_bfs(const LoopList& loops, SiteIndex x);

/// Loop distance from x to every site on a loop, by brute-force shortest paths
/// over loop chains (oracle for the shells). Sites not connected map to -1.
std::vector<std::pair<SiteIndex, int>> loop_distances_bruteforce(const LoopList& loops, SiteIndex x);

/// Adjacency of the loop-intersection graph (loops sharing a site), sorted lists.
std::vector<std::vector<std::uint32_t>> loop_graph(const LoopList& loops);

/// Cluster of the origin meets the boundary of B(0, n). Guard: n <= M / lambda.
bool one_arm(const LoopList& loops, const Box& box, int n, double lambda = 2.0);

/// Some open cluster joins B(0, n) to the boundary of B(0, m). Guard: n < m <= M / lambda.
bool crossing(const LoopList& loops, const Box& box, int n, int m, double lambda = 2.0);

/// |U(0, K)|: sites (other than the origin) on the last loop of a chain
/// l_1, ..., l_K of distinct loops with 0 in l_1 and l_i meeting l_j iff |i-j| <= 1. K <= 4.
std::size_t u_set_count(const LoopList& loops, const Box& box, int k);

/// Escape-MC capacity of the origin cluster (empty cluster -> 0).
CapacityEstimate cluster_capacity(const LoopList& loops, const Box& box, const CapacityOptions& options,
                                  RngStream& rng);

}  // namespace loopsoup
