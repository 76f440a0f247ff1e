#include <unistd.h>

#include <filesystem>

#include "doctest.h"
#include "loopsoup/config.hpp"
#include "loopsoup/error.hpp"
#include "loopsoup/io.hpp"
#include "loopsoup/runner.hpp"

using namespace loopsoup;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("loopsoup-test-" + name)).string();
}

}  // namespace

TEST_CASE("config round-trips through JSON") {
  RunConfig c;
  c.seed = 99;
  c.soup.alpha = 0.75;
  c.soup.order = "reverse";
  c.experiment = default_spec(ExperimentKind::ClusterTail);
  c.experiment.seed = 99;
  const RunConfig d = config_from_json(config_to_json(c));
  CHECK(config_to_json(d) == config_to_json(c));
  CHECK(d.experiment.kind == ExperimentKind::ClusterTail);
}

TEST_CASE("config rejects unknown keys and bad values") {
  CHECK_THROWS_AS(config_from_json(R"({"sed": 1})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"soup": {"alpa": 1}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"experiment": {"kind": "one-arm", "replica": 5}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"seed": "x"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json("{"), ConfigError);
  RunConfig c = config_from_json(R"({"soup": {"kappa": -0.5}})");
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("CSV rows round-trip with the fixed header") {
  std::vector<EstimateRow> rows{{"one-arm", 5, 1.0, 0.0, 4, 0.0123456789012345678, 1e-5, 1000, 1.5},
                                {"two-point", 3, 0.5, 0.1, 2, 0.5, 0.0, 0, 0.0}};
  const std::string csv = rows_to_csv(rows);
  CHECK(csv.rfind("kind,d,alpha,kappa,n,value,stderr,replicas,walltime_s\n", 0) == 0);
  const auto back = rows_from_csv(csv);
  REQUIRE(back.size() == 2);
  CHECK(back[0].value == rows[0].value);
  CHECK(back[1].kappa == rows[1].kappa);
  CHECK_THROWS_AS(rows_from_csv("bad\n"), ConfigError);
}

TEST_CASE("atomic write replaces the file") {
  const std::string p = temp_path("atomic.txt");
  write_file_atomic(p, "first");
  write_file_atomic(p, "second");
  CHECK(read_file(p) == "second");
  CHECK_FALSE(std::filesystem::exists(p + ".tmp." + std::to_string(::getpid())));
  std::filesystem::remove(p);
}

TEST_CASE("soup text format round-trips") {
  LoopList l;
  l.add(std::vector<SiteIndex>{1, 2});
  l.add(std::vector<SiteIndex>{3, 4, 5, 6});
  const LoopList back = soup_from_text(soup_to_text(l));
  CHECK(back.sites == l.sites);
  CHECK(back.offsets == l.offsets);
  CHECK_THROWS_AS(soup_from_text("3 1 2\n"), ConfigError);
}

TEST_CASE("resumed replica run is bit-identical") {
  const std::string p = temp_path("checkpoint.txt");
  std::filesystem::remove(p);
  ReplicaTask task{"t", 2500, 2, [] {
                     return [](std::uint64_t r, std::span<double> out) {
                       RngStream rng(1, r);
                       out[0] = rng.uniform();
                       out[1] = static_cast<double>(r);
                     };
                   }};
  ReplicaRunner first(1, p);
  const ReplicaValues a = first.run(task);
  ReplicaRunner second(1, p);
  const ReplicaValues b = second.run(task);
  CHECK(second.resumed_replicas() == 2500);
  CHECK(a.values == b.values);
  ReplicaRunner plain(3);
  CHECK(plain.run(task).values == a.values);
  std::filesystem::remove(p);
}
