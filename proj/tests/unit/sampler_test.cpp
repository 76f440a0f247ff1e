#include <cmath>

#include "doctest.h"
#include "loopsoup/error.hpp"
#include "loopsoup/explorer.hpp"
#include "loopsoup/percolation.hpp"
#include "loopsoup/sampler.hpp"
#include "loopsoup/stats.hpp"

using namespace loopsoup;

namespace {

SoupParams small(double alpha, std::uint64_t stream) {
  SoupParams p;
  p.alpha = alpha;
  p.spec = {3, 2, 0.0};
  p.seed = 17;
  p.stream = stream;
  return p;
}

}  // namespace

TEST_CASE("soup is a function of seed and stream") {
  const SoupSample a = sample_soup(small(1.0, 4));
  const SoupSample b = sample_soup(small(1.0, 4));
  CHECK(a.loops.sites == b.loops.sites);
  CHECK(a.loops.offsets == b.loops.offsets);
  SoupParams two = small(1.0, 4);
  two.workers = 2;
  const SoupSample c = sample_soup(two);
  CHECK(a.loops.sites == c.loops.sites);
  CHECK(sample_soup(small(1.0, 5)).loops.sites != a.loops.sites);
}

TEST_CASE("loops are closed nearest-neighbor paths in least rotation") {
  const SoupSample s = sample_soup(small(2.0, 1));
  const Box box(s.params.spec);
  REQUIRE(!s.loops.empty());
  for (std::size_t i = 0; i < s.loops.size(); ++i) {
    const auto l = s.loops.loop(i);
    REQUIRE(l.size() >= 2);
    for (std::size_t k = 0; k < l.size(); ++k) {
      const Site u = box.site(l[k]), v = box.site(l[(k + 1) % l.size()]);
      int dist = 0;
      for (std::size_t c = 0; c < u.size(); ++c) dist += std::abs(u[c] - v[c]);
      REQUIRE(dist == 1);
    }
    CHECK(least_rotation(l) == 0);
  }
}

TEST_CASE("mean occupation is alpha (G(x, x) - 1)") {
  const int n = 3000;
  MeanAccumulator acc;
  for (int r = 0; r < n; ++r) acc.add(static_cast<double>(occupation(sample_soup(small(1.0, 100 + r)), {0, 0, 0})));
  const GreenTable g(LatticeSpec{3, 2, 0.0});
  const double expect = g(Site{0, 0, 0}, Site{0, 0, 0}) - 1.0;
  CHECK(std::abs(acc.mean() - expect) < 4.0 * acc.standard_error());
}

TEST_CASE("vertex order does not change the law") {
  const int n = 3000;
  std::vector<double> lex(30), rev(30);
  for (int r = 0; r < n; ++r) {
    SoupParams p = small(1.0, 7000 + r);
    lex[std::min<std::uint64_t>(29, sample_soup(p).loops.size())] += 1;
    p.order = VertexOrder::Reverse;
    rev[std::min<std::uint64_t>(29, sample_soup(p).loops.size())] += 1;
  }
  CHECK(chi_square_homogeneity_p_value(lex, rev) > 1e-3);
}

TEST_CASE("explorer cluster law matches the full soup") {
  const LatticeSpec spec{3, 2, 0.0};
  const Box box(spec);
  ClusterExplorer ex(spec, 1.0);
  const int n = 3000;
  std::vector<double> full(10), explored(10);
  for (int r = 0; r < n; ++r) {
    SoupParams p = small(1.0, 20000 + r);
    const ClusterReport c = cluster_of(sample_soup(p).loops, box, box.origin());
    full[std::min<std::size_t>(9, c.size / 4)] += 1;
    RngStream rng(17, 90000 + r);
    const ExploreResult e = ex.explore(rng);
    const ClusterReport c2 = cluster_of(e.loops, box, box.origin());
    explored[std::min<std::size_t>(9, c2.size / 4)] += 1;
  }
  CHECK(chi_square_homogeneity_p_value(full, explored) > 1e-3);
}

TEST_CASE("thinning is nested and checks its preconditions") {
  const SoupSample s = sample_soup(small(2.0, 3));
  const SoupSample t1 = thin_soup(s, 1.0, 0.0, 5);
  const SoupSample t2 = thin_soup(s, 0.5, 0.0, 5);
  CHECK(t2.loops.size() <= t1.loops.size());
  CHECK(t1.loops.size() <= s.loops.size());
  CHECK_THROWS_AS(thin_soup(s, 3.0, 0.0, 5), ConfigError);
  CHECK_THROWS_AS(thin_soup(s, 1.0, -0.5, 5), ConfigError);
  CHECK_THROWS_AS(thin_soup(s, 0.0, 0.0, 5), ConfigError);
}

TEST_CASE("multiplicity cap meets the residual bound") {
  const auto cap = choose_multiplicity_cap(LatticeSpec{3, 4, 0.0}, 1.0);
  CHECK(cap.residual < kResidualIntensity);
  CHECK(multiplicity_residual(729, 1.0, cap.green_bound, cap.jmax - 1) >= kResidualIntensity);
  CHECK_THROWS_AS(LatticeSpec({3, 2, -0.5}).validate(), ConfigError);
}
