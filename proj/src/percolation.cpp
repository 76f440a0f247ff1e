#include "loopsoup/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace loopsoup {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

// Sorted distinct sites of all loops, and the compressed id of each entry.
struct Compressed {
  std::vector<SiteIndex> sites;
  std::vector<std::uint32_t> id;  // parallel to loops.sites

  explicit Compressed(const LoopList& loops) : sites(loops.sites) {
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    id.reserve(loops.sites.size());
    for (SiteIndex s : loops.sites) id.push_back(lookup(s));
  }
  std::uint32_t lookup(SiteIndex s) const {
    return static_cast<std::uint32_t>(std::lower_bound(sites.begin(), sites.end(), s) - sites.begin());
  }
  bool contains(SiteIndex s) const { return std::binary_search(sites.begin(), sites.end(), s); }
};

DisjointSets union_loops(const LoopList& loops, const Compressed& c) {
  DisjointSets ds(c.sites.size());
  for (std::size_t i = 0; i < loops.size(); ++i) {
    const std::size_t begin = loops.offsets[i], end = loops.offsets[i + 1];
    for (std::size_t k = begin + 1; k < end; ++k) ds.unite(c.id[begin], c.id[k]);
  }
  return ds;
}

// Loops through each compressed site (CSR).
struct Incidence {
  std::vector<std::size_t> start;
  std::vector<std::uint32_t> loops;

  Incidence(const LoopList& ll, const Compressed& c) : start(c.sites.size() + 1, 0) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::size_t i = 0; i < ll.size(); ++i) {
      for (std::size_t k = ll.offsets[i]; k < ll.offsets[i + 1]; ++k) {
        pairs.emplace_back(c.id[k], static_cast<std::uint32_t>(i));
      }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    for (const auto& p : pairs) ++start[p.first + 1];
    std::partial_sum(start.begin(), start.end(), start.begin());
    for (const auto& p : pairs) loops.push_back(p.second);
  }
  std::span<const std::uint32_t> of(std::uint32_t site) const {
    return {loops.data() + start[site], start[site + 1] - start[site]};
  }
};

void check_radius_guard(const Box& box, int m, double lambda) {
  if (!(lambda >= 1.0)) throw ConfigError("box factor lambda must be >= 1");
  if (m < 1 || static_cast<double>(m) > box.radius() / lambda + 1e-12) {
    throw GuardError("radius " + std::to_string(m) + " exceeds box radius / lambda = " +
                     std::to_string(box.radius() / lambda));
  }
}

}  // namespace

std::vector<Edge> open_edges(const LoopList& loops) {
  std::vector<Edge> edges;
  edges.reserve(loops.total_length());
  for (std::size_t i = 0; i < loops.size(); ++i) {
    const auto l = loops.loop(i);
    for (std::size_t k = 0; k < l.size(); ++k) {
      const SiteIndex a = l[k], b = l[(k + 1) % l.size()];
      edges.push_back({std::min(a, b), std::max(a, b)});
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::vector<std::vector<std::uint32_t>> loop_graph(const LoopList& loops) {
  const Compressed c(loops);
  const Incidence inc(loops, c);
  std::vector<std::vector<std::uint32_t>> adj(loops.size());
  for (std::uint32_t s = 0; s < c.sites.size(); ++s) {
    const auto ls = inc.of(s);
    for (std::uint32_t a : ls) {
      for (std::uint32_t b : ls) {
        if (a != b) adj[a].push_back(b);
      }
    }
  }
  for (auto& v : adj) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return adj;
}

ClusterReport cluster_of(const LoopList& loops, const Box& box, SiteIndex x) {
  ClusterReport r;
  const Compressed c(loops);
  if (!c.contains(x)) return r;
  DisjointSets ds = union_loops(loops, c);
  const std::size_t root = ds.find(c.lookup(x));
  for (std::uint32_t s = 0; s < c.sites.size(); ++s) {
    if (ds.find(s) == root) {
      r.sites.push_back(c.sites[s]);
      r.reached_radius = std::max(r.reached_radius, box.sup_norm(c.sites[s]));
    }
  }
  r.size = r.sites.size();

  // Shells: BFS over loops; a site's distance is the smallest BFS level of a loop through it.
  const Incidence inc(loops, c);
  std::vector<int> loop_level(loops.size(), -1);
  std::vector<int> site_level(c.sites.size(), -1);
  const std::uint32_t xs = c.lookup(x);
  site_level[xs] = 0;
  std::deque<std::uint32_t> queue;
  for (std::uint32_t l : inc.of(xs)) {
    loop_level[l] = 1;
    queue.push_back(l);
  }
  while (!queue.empty()) {
    const std::uint32_t l = queue.front();
    queue.pop_front();
    for (std::size_t k = loops.offsets[l]; k < loops.offsets[l + 1]; ++k) {
      const std::uint32_t s = c.id[k];
      if (site_level[s] >= 0) continue;
      site_level[s] = loop_level[l];
      for (std::uint32_t l2 : inc.of(s)) {
        if (loop_level[l2] < 0) {
          loop_level[l2] = loop_level[l] + 1;
          queue.push_back(l2);
        }
      }
    }
  }
  for (int lv : site_level) {
    if (lv < 0) continue;
    if (static_cast<std::size_t>(lv) >= r.shells.size()) r.shells.resize(lv + 1, 0);
    ++r.shells[lv];
  }
  return r;
}

std::vector<SiteIndex> cluster_bfs(const LoopList& loops, SiteIndex x) {
  const auto edges = open_edges(loops);
  std::vector<SiteIndex> out;
  bool on_edge = false;
  for (const auto& e : edges) on_edge = on_edge || e.a == x || e.b == x;
  if (!on_edge) return out;
  std::vector<SiteIndex> frontier{x};
  std::vector<SiteIndex> seen{x};
  while (!frontier.empty()) {
    const SiteIndex v = frontier.back();
    frontier.pop_back();
    for (const auto& e : edges) {
      SiteIndex w;
      if (e.a == v) {
        w = e.b;
      } else if (e.b == v) {
        w = e.a;
      } else {
        continue;
      }
      if (std::find(seen.begin(), seen.end(), w) == seen.end()) {
        seen.push_back(w);
        frontier.push_back(w);
      }
    }
  }
  std::sort(seen.begin(), seen.end());
  return seen;
}

std::vector<std::pair<SiteIndex, int>> loop_distances_bruteforce(const LoopList& loops, SiteIndex x) {
  // Relaxation to a fixed point: d(loop) = 1 if it contains x, else 1 + min over intersecting loops.
  const std::size_t n = loops.size();
  auto has = [&](std::size_t i, SiteIndex s) {
    const auto l = loops.loop(i);
    return std::find(l.begin(), l.end(), s) != l.end();
  };
  auto meet = [&](std::size_t i, std::size_t j) {
    for (SiteIndex s : loops.loop(i)) {
      if (has(j, s)) return true;
    }
    return false;
  };
  const int inf = 1 << 29;
  std::vector<int> dl(n, inf);
  for (std::size_t i = 0; i < n; ++i) {
    if (has(i, x)) dl[i] = 1;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (dl[j] + 1 < dl[i] && meet(i, j)) {
          dl[i] = dl[j] + 1;
          changed = true;
        }
      }
    }
  }
  std::vector<SiteIndex> sites = loops.sites;
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  std::vector<std::pair<SiteIndex, int>> out;
  for (SiteIndex s : sites) {
    int best = inf;
    for (std::size_t i = 0; i < n; ++i) {
      if (has(i, s)) best = std::min(best, dl[i]);
    }
    if (s == x) best = 0;
    out.emplace_back(s, best >= inf ? -1 : best);
  }
  return out;
}

bool one_arm(const LoopList& loops, const Box& box, int n, double lambda) {
  check_radius_guard(box, n, lambda);
  return cluster_of(loops, box, box.origin()).reached_radius >= n;
}

bool crossing(const LoopList& loops, const Box& box, int n, int m, double lambda) {
  check_radius_guard(box, m, lambda);
  if (n < 0 || n >= m) throw ConfigError("crossing needs 0 <= n < m");
  const Compressed c(loops);
  DisjointSets ds = union_loops(loops, c);
  std::vector<std::uint8_t> inner(c.sites.size(), 0), outer(c.sites.size(), 0);
  for (std::uint32_t s = 0; s < c.sites.size(); ++s) {
    const int r = box.sup_norm(c.sites[s]);
    const std::size_t root = ds.find(s);
    if (r <= n) inner[root] = 1;
    if (r >= m) outer[root] = 1;
  }
  for (std::size_t s = 0; s < c.sites.size(); ++s) {
    if (inner[s] && outer[s]) return true;
  }
  return false;
}

std::size_t u_set_count(const LoopList& loops, const Box& box, int k) {
  if (k < 1 || k > 4) throw GuardError("U(0,K) is limited to 1 <= K <= 4");
  const SiteIndex origin = box.origin();
  const auto adj = loop_graph(loops);
  auto adjacent = [&](std::uint32_t a, std::uint32_t b) { return std::binary_search(adj[a].begin(), adj[a].end(), b); };
  std::vector<std::uint8_t> reached_loop(loops.size(), 0);
  std::vector<std::uint32_t> chain;
  auto dfs = [&](auto&& self) -> void {
    const std::uint32_t last = chain.back();
    if (static_cast<int>(chain.size()) == k) {
      reached_loop[last] = 1;
      return;
    }
    for (std::uint32_t next : adj[last]) {
      bool ok = true;
      for (std::size_t i = 0; i + 1 < chain.size() && ok; ++i) {
        if (chain[i] == next || adjacent(chain[i], next)) ok = false;
      }
      if (!ok) continue;
      chain.push_back(next);
      self(self);
      chain.pop_back();
    }
  };
  for (std::uint32_t l = 0; l < loops.size(); ++l) {
    const auto ll = loops.loop(l);
    if (std::find(ll.begin(), ll.end(), origin) == ll.end()) continue;
    chain.assign(1, l);
    dfs(dfs);
  }
  std::vector<SiteIndex> sites;
  for (std::uint32_t l = 0; l < loops.size(); ++l) {
    if (!reached_loop[l]) continue;
    for (SiteIndex s : loops.loop(l)) {
      if (s != origin) sites.push_back(s);
    }
  }
  std::sort(sites.begin(), sites.end());
  return static_cast<std::size_t>(std::unique(sites.begin(), sites.end()) - sites.begin());
}

CapacityEstimate cluster_capacity(const LoopList& loops, const Box& box, const CapacityOptions& options,
                                  RngStream& rng) {
  const ClusterReport r = cluster_of(loops, box, box.origin());
  std::vector<Site> set;
  set.reserve(r.sites.size());
  for (SiteIndex s : r.sites) set.push_back(box.site(s));
  if (set.empty()) {
    CapacityEstimate e;
    return e;
  }
  return capacity_mc(set, box.dimension(), options, rng);
}

}  // namespace loopsoup
