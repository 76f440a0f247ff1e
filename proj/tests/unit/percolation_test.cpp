#include <map>

#include "doctest.h"
#include "loopsoup/percolation.hpp"

using namespace loopsoup;

TEST_CASE("union-find cluster and shells agree with the brute-force oracles") {
  const LatticeSpec spec{2, 4, 0.0};
  const Box box(spec);
  for (std::uint64_t stream = 0; stream < 40; ++stream) {
    SoupParams p;
    p.alpha = 0.6;
    p.spec = spec;
    p.seed = 3;
    p.stream = stream;
    const SoupSample s = sample_soup(p);
    const ClusterReport c = cluster_of(s.loops, box, box.origin());
    CHECK(c.sites == cluster_bfs(s.loops, box.origin()));
    CHECK(c.size == c.sites.size());
    std::map<int, std::size_t> shells;
    for (const auto& [site, dist] : loop_distances_bruteforce(s.loops, box.origin())) {
      if (dist >= 0) ++shells[dist];
    }
    std::vector<std::size_t> expect;
    for (const auto& [dist, count] : shells) {
      if (expect.size() <= static_cast<std::size_t>(dist)) expect.resize(dist + 1, 0);
      expect[dist] = count;
    }
    CHECK(c.shells == expect);
  }
}

TEST_CASE("open edges of a square loop") {
  const Box box(LatticeSpec{2, 1, 0.0});
  LoopList l;
  const std::vector<SiteIndex> sq{box.index(std::vector<int>{0, 0}), box.index(std::vector<int>{1, 0}),
                                  box.index(std::vector<int>{1, 1}), box.index(std::vector<int>{0, 1})};
  l.add(sq);
  CHECK(open_edges(l).size() == 4);
  const ClusterReport c = cluster_of(l, box, box.origin());
  CHECK(c.size == 4);
  CHECK(c.reached_radius == 1);
  CHECK(one_arm(l, box, 1, 1.0));
  CHECK(cluster_of(l, box, box.index(std::vector<int>{-1, -1})).size == 0);
}
