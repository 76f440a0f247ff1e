#include <cmath>

#include "doctest.h"
#include "loopsoup/capacity.hpp"
#include "loopsoup/error.hpp"
#include "loopsoup/estimators.hpp"

using namespace loopsoup;

namespace {

const EstimateRow* find_row(const ExperimentResult& r, const std::string& kind, double n) {
  for (const auto& row : r.rows) {
    if (row.kind == kind && row.n == n) return &row;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("first return at time 2 has probability 1/(2d)") {
  for (int d : {3, 5}) {
    ExperimentSpec s = default_spec(ExperimentKind::ExcursionTail);
    s.dimension = d;
    s.sizes = {1, 2};
    s.horizon = 64;
    s.replicas = 100000;
    s.seed = 8;
    const ExperimentResult r = run_excursion_tail(s, {});
    const EstimateRow* row = find_row(r, "excursion-return-time", 1);
    REQUIRE(row);
    CHECK(std::abs(row->value - 1.0 / (2.0 * d)) < 4.0 * row->standard_error);
  }
}

TEST_CASE("degenerate Galton-Watson trees") {
  RngStream rng(1, 1);
  const GwOffspring none(1.5, 0.0);
  for (int i = 0; i < 1000; ++i) REQUIRE(simulate_gw(none, 5, 1000, rng).total_progeny == 1);
  CHECK_THROWS_AS(GwOffspring(1.5, 1.2), ConfigError);
  CHECK_THROWS_AS(GwOffspring(1.0, 0.5), ConfigError);
}

TEST_CASE("Galton-Watson first moment") {
  const GwOffspring law(2.5, 0.4);
  RngStream rng(2, 2);
  double total = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) total += static_cast<double>(simulate_gw(law, 3, 1'000'000, rng).total_progeny);
  // E[S] = 1 / (1 - mean).
  CHECK(total / n == doctest::Approx(1.0 / 0.6).epsilon(0.02));
}

TEST_CASE("specs are validated") {
  ExperimentSpec s = default_spec(ExperimentKind::OneArm);
  s.kappa = -0.5;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  CHECK_THROWS_AS(parse_experiment_kind("no-such-kind"), ConfigError);
  for (auto k : {ExperimentKind::OneArm, ExperimentKind::TwoPoint, ExperimentKind::ClusterTail,
                 ExperimentKind::ExcursionTail, ExperimentKind::CrossingScan, ExperimentKind::FirstShell,
                 ExperimentKind::CapacityGrowth, ExperimentKind::GwProgeny}) {
    CHECK(parse_experiment_kind(to_string(k)) == k);
    CHECK_NOTHROW(default_spec(k).validate());
  }
}

TEST_CASE("replica streams are distinct per task and replica") {
  CHECK(replica_stream("a", 0) != replica_stream("a", 1));
  CHECK(replica_stream("a", 0) != replica_stream("b", 0));
  CHECK(replica_stream("a", 3) == replica_stream("a", 3));
}

TEST_CASE("small two-point run against its exact single-loop row") {
  ExperimentSpec s = default_spec(ExperimentKind::TwoPoint);
  s.dimension = 3;
  s.box_radius = 4;
  s.sizes = {1};
  s.replicas = 20000;
  s.seed = 4;
  const ExperimentResult r = run_two_point(s, {});
  const EstimateRow* mc = find_row(r, "two-point-single-loop", 1);
  const EstimateRow* exact = find_row(r, "two-point-single-loop-exact", 1);
  const EstimateRow* cluster = find_row(r, "two-point", 1);
  REQUIRE(mc);
  REQUIRE(exact);
  REQUIRE(cluster);
  CHECK(std::abs(mc->value - exact->value) < 4.0 * mc->standard_error);
  CHECK(cluster->value >= mc->value);
}

TEST_CASE("capacity of a point is 1 / G(0, 0)") {
  RngStream rng(6, 6);
  CapacityOptions o;
  o.walkers = 200000;
  o.escape_radius = 12;
  const auto c = capacity_mc({{0, 0, 0}}, 3, o, rng);
  CHECK(std::abs(c.value - 1.0 / 1.5163860591520) < 4.0 * c.standard_error + 0.005);
  const GreenTable big(LatticeSpec{3, 10, 0.0});
  const auto e = capacity_exact({{0, 0, 0}, {1, 0, 0}}, big);
  CHECK(e.value > 1.0 / big(Site{0, 0, 0}, Site{0, 0, 0}));
  CHECK_THROWS_AS(capacity_mc({{0, 0}}, 2, o, rng), ConfigError);
}

TEST_CASE("results record the base stream of every task") {
  ExperimentSpec s = default_spec(ExperimentKind::GwProgeny);
  s.replicas = 2000;
  const ExperimentResult r = run_gw_progeny(s, {});
  REQUIRE(r.streams.size() == 1);
  const auto& [key, id] = r.streams.front();
  CHECK(derive_stream(id, 17) == replica_stream(key, 17));
  CHECK(run_gw_progeny(s, {2, {}}).rows.front().value == r.rows.front().value);
}
