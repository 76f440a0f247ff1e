#include <cmath>

#include "doctest.h"
#include "loopsoup/green.hpp"

using namespace loopsoup;

TEST_CASE("free Green function at the origin in d = 3") {
  // Watson's integral: 1 / (1 - F) with F the return probability.
  CHECK(green_free_quadrature(3, {0, 0, 0}) == doctest::Approx(1.5163860591520).epsilon(1e-11));
  CHECK(free_green(3)->at(std::vector<int>{0, 0, 0}) == doctest::Approx(1.5163860591520).epsilon(1e-11));
}

TEST_CASE("free Green function is harmonic off the origin") {
  for (int d : {3, 4, 5}) {
    const auto g = free_green(d, 8);
    std::vector<int> x(d, 0);
    x[0] = 2;
    x[1] = 1;
    double avg = 0.0;
    for (int i = 0; i < d; ++i) {
      for (int s : {-1, 1}) {
        auto y = x;
        y[i] += s;
        avg += g->at(y);
      }
    }
    avg /= 2.0 * d;
    CHECK(avg == doctest::Approx(g->at(x)).epsilon(1e-10));
    std::vector<int> zero(d, 0);
    double around = 0.0;
    for (int i = 0; i < d; ++i) {
      auto y = zero;
      y[i] = 1;
      around += g->at(y);
    }
    CHECK(g->at(zero) == doctest::Approx(1.0 + around / d).epsilon(1e-10));
  }
}

TEST_CASE("quadrature agrees with the Fourier Monte Carlo in d = 5") {
  RngStream rng(3, 9);
  for (const Site& x : {Site{0, 0, 0, 0, 0}, Site{1, 1, 0, 0, 0}}) {
    const auto mc = green_free_mc(5, x, 400000, rng);
    CHECK(std::abs(mc.mean - green_free_quadrature(5, x)) < 5.0 * mc.standard_error);
  }
}

TEST_CASE("asymptotic form approaches the lattice value far away") {
  const Site x{12, 0, 0};
  CHECK(green_free_asymptotic(3, x) / green_free_quadrature(3, x) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("conjugate gradients match the dense inverse") {
  for (double kappa : {0.0, 0.3}) {
    const LatticeSpec spec{3, 3, kappa};
    const std::vector<Site> killed{{1, 0, 0}, {-2, 1, 1}};
    const GreenTable cg(spec, killed);
    const DenseGreen dense = dense_green(spec, killed);
    const Box& box = cg.box();
    for (std::size_t c = 0; c < dense.active.size(); c += 7) {
      const auto& col = cg.column(dense.active[c]);
      for (std::size_t r = 0; r < dense.active.size(); ++r) {
        REQUIRE(col[dense.active[r]] == doctest::Approx(dense.green(r, c)).epsilon(1e-9));
      }
    }
    CHECK(cg(Site{1, 0, 0}, Site{0, 0, 0}) == 0.0);
    CHECK(cg.stats(box.origin()).relative_residual < 1e-11);
  }
}

TEST_CASE("box Green function increases with the box to the free value") {
  double prev = 0.0;
  for (int m : {2, 4, 8}) {
    const GreenTable g(LatticeSpec{3, m, 0.0});
    const double v = g(Site{0, 0, 0}, Site{0, 0, 0});
    CHECK(v > prev);
    CHECK(v < 1.5163860591520);
    prev = v;
  }
}

TEST_CASE("killing reduces the Green function") {
  const GreenTable a(LatticeSpec{3, 3, 0.0});
  const GreenTable b(LatticeSpec{3, 3, 0.5});
  CHECK(b(Site{0, 0, 0}, Site{1, 0, 0}) < a(Site{0, 0, 0}, Site{1, 0, 0}));
}
