#include <cmath>

#include "doctest.h"
#include "loopsoup/error.hpp"
#include "loopsoup/loopmeasure.hpp"

using namespace loopsoup;

TEST_CASE("canonical rotation and multiplicity") {
  const BasedLoop a{{{1, 0}, {0, 0}, {1, 0}, {0, 0}}};
  const Loop la = canonicalize(a);
  CHECK(la.multiplicity == 2);
  CHECK(la.sites.front() == Site{0, 0});
  const BasedLoop b{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  const BasedLoop b2{{{1, 1}, {0, 1}, {0, 0}, {1, 0}}};
  CHECK(canonicalize(b) == canonicalize(b2));
  CHECK(canonicalize(b).multiplicity == 1);
  CHECK_THROWS_AS(validate_based_loop(BasedLoop{{{0, 0}, {2, 0}}}), ConfigError);
  CHECK_THROWS_AS(validate_based_loop(BasedLoop{{{0, 0}}}), ConfigError);
}

TEST_CASE("loop mass") {
  CHECK(loop_mass(2, 1, 3, 0.0) == doctest::Approx(1.0 / 36.0));
  CHECK(loop_mass(4, 2, 2, 0.0) == doctest::Approx(0.5 / 256.0));
  CHECK(loop_mass(2, 1, 1, 1.0) == doctest::Approx(1.0 / 16.0));
  CHECK_THROWS_AS(loop_mass(3, 2, 3, 0.0), ConfigError);
}

TEST_CASE("mass of loops through one point is log G(x, x)") {
  const GreenTable g(LatticeSpec{3, 3, 0.0});
  const Site o{0, 0, 0};
  CHECK(mu_hit_mass({o}, g) == doctest::Approx(std::log(g(o, o))));
  CHECK(prob_avoid({o}, 0.5, g) == doctest::Approx(std::pow(g(o, o), -0.5)));
}

TEST_CASE("avoidance probability decreases as the set grows") {
  const GreenTable g(LatticeSpec{3, 3, 0.2});
  std::vector<Site> f{{0, 0, 0}};
  double prev = 1.0;
  for (const Site& s : {Site{1, 0, 0}, Site{0, 2, 0}, Site{-1, -1, 1}, Site{2, 2, 2}}) {
    const double p = prob_avoid(f, 1.3, g);
    CHECK(p < prev);
    prev = p;
    f.push_back(s);
  }
}

TEST_CASE("two-point single-loop probability from visit-all mass") {
  const GreenTable g(LatticeSpec{3, 4, 0.0});
  const Site a{0, 0, 0}, b{2, 1, 0};
  const double alpha = 0.7;
  const double both = mu_visit_all({a, b}, g);
  CHECK(p_single_loop_two_point(a, b, alpha, g) == doctest::Approx(1.0 - std::exp(-alpha * both)).epsilon(1e-10));
  // Inclusion-exclusion for two points: log Gaa + log Gbb - log det.
  CHECK(both == doctest::Approx(mu_hit_mass({a}, g) + mu_hit_mass({b}, g) - mu_hit_mass({a, b}, g)).epsilon(1e-12));
}

TEST_CASE("occupancy covariance matches the avoidance probabilities") {
  const GreenTable g(LatticeSpec{3, 3, 0.0});
  const Site x{0, 0, 0}, y{1, 1, 0};
  const double a = 0.8;
  const double px = prob_avoid({x}, a, g), py = prob_avoid({y}, a, g), pxy = prob_avoid({x, y}, a, g);
  // Cov of the covered indicators equals Cov of the uncovered ones.
  CHECK(cov_occupancy(x, y, a, g) == doctest::Approx(pxy - px * py).epsilon(1e-12));
}

TEST_CASE("enumerated masses against the trace and the determinant") {
  const LatticeSpec spec{2, 1, 0.0};
  const Enumeration e = enumerate_loops(spec, {}, 12);
  CHECK(e.total_mass == doctest::Approx(e.trace_sum).epsilon(1e-12));
  CHECK(e.total_mass <= e.log_det);
  CHECK(e.log_det - e.total_mass <= e.tail_bound);
  for (std::size_t i = 1; i < e.loops.size(); ++i) CHECK(e.loops[i - 1].mass >= e.loops[i].mass);
  // Length-2 loops: one per lattice edge of the 3x3 box.
  std::size_t pairs = 0;
  for (const auto& l : e.loops) pairs += l.loop.length() == 2;
  CHECK(pairs == 12);
  CHECK_THROWS_AS(enumerate_loops(LatticeSpec{3, 2, 0.0}, {}, 6), GuardError);
}

TEST_CASE("first-shell sum is increasing in alpha and needs d >= 5") {
  const auto a = expected_first_shell(0.5, 5, 6);
  const auto b = expected_first_shell(1.0, 5, 6);
  CHECK(a.value < b.value);
  CHECK(a.tail_width > 0.0);
  CHECK_THROWS_AS(expected_first_shell(1.0, 4, 6), ConfigError);
}
