#include <cmath>

#include "doctest.h"
#include "loopsoup/error.hpp"
#include "loopsoup/rng.hpp"
#include "loopsoup/stats.hpp"

using namespace loopsoup;

TEST_CASE("log-log fit recovers an exact power law") {
  std::vector<FitPoint> pts;
  for (double x : {2.0, 4.0, 8.0, 16.0, 32.0}) pts.push_back({x, 3.0 * std::pow(x, -1.5), 0.01 * std::pow(x, -1.5)});
  const SlopeFit f = fit_log_log(pts);
  CHECK(f.slope == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(f.points_used == 5);
}

TEST_CASE("constant data has zero slope") {
  const SlopeFit f = fit_log_log({{1, 2, 0}, {2, 2, 0}, {3, 2, 0}});
  CHECK(f.slope == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("noisy power law within its error bar") {
  RngStream rng(4, 4);
  std::vector<FitPoint> pts;
  for (double x = 4; x <= 512; x *= 2) {
    const double y = std::pow(x, -1.5) * (1.0 + 0.05 * (2.0 * rng.uniform() - 1.0));
    pts.push_back({x, y, 0.03 * y});
  }
  const SlopeFit f = fit_log_log(pts);
  CHECK(std::abs(f.slope + 1.5) < 0.1);
}

TEST_CASE("fit preconditions") {
  CHECK_THROWS_AS(fit_log_log({{1, 1, 0}, {2, 1, 0}}), ConfigError);
  CHECK_THROWS_AS(fit_log_log({{1, 1, 0}, {2, 0, 0}, {3, 1, 0}}), ConfigError);
}

TEST_CASE("log-linear fit of a geometric sequence") {
  std::vector<FitPoint> pts;
  for (int k = 1; k <= 6; ++k) pts.push_back({double(k), std::pow(0.5, k), 0.0});
  CHECK(fit_log_linear(pts).slope == doctest::Approx(std::log(0.5)));
}

TEST_CASE("noisy smallest point is dropped") {
  std::vector<double> dropped;
  const auto kept = drop_noisy_smallest({{1, 1, 0.5}, {2, 1, 0.01}, {3, 1, 0.01}, {4, 1, 0.01}}, &dropped);
  CHECK(kept.size() == 3);
  REQUIRE(dropped.size() == 1);
  CHECK(dropped[0] == 1.0);
}

TEST_CASE("mean accumulator") {
  MeanAccumulator a, b;
  for (double v : {1.0, 2.0, 3.0}) a.add(v);
  b.add(4.0);
  a.merge(b);
  CHECK(a.mean() == doctest::Approx(2.5));
  CHECK(a.standard_error() == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}

TEST_CASE("chi-square p-values") {
  CHECK(chi_square_p_value({100, 100, 100, 100}, {0.25, 0.25, 0.25, 0.25}) == doctest::Approx(1.0));
  CHECK(chi_square_p_value({400, 0, 0, 0}, {0.25, 0.25, 0.25, 0.25}) < 1e-10);
}
