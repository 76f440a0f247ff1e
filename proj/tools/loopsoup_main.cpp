#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "loopsoup/config.hpp"
#include "loopsoup/error.hpp"
#include "loopsoup/estimators.hpp"
#include "loopsoup/green.hpp"
#include "loopsoup/io.hpp"
#include "loopsoup/loopmeasure.hpp"
#include "loopsoup/percolation.hpp"
#include "loopsoup/sampler.hpp"
#include "loopsoup/validation.hpp"

using namespace loopsoup;
using nlohmann::json;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out;
  std::string level;
  std::string kind;
};

RunConfig resolve(const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (f.seed) c.seed = *f.seed;
  if (f.workers) {
    c.workers = *f.workers;
  } else if (const char* env = std::getenv("LOOPSOUP_WORKERS")) {
    try {
      c.workers = std::stoi(env);
    } catch (const std::exception&) {
      throw ConfigError("LOOPSOUP_WORKERS must be an integer");
    }
  }
  if (!f.out.empty()) c.output_dir = f.out;
  if (!f.level.empty()) c.level = f.level;
  c.experiment.seed = c.seed;
  c.validate();
  return c;
}

std::string path_in(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.output_dir) / name).string();
}

SoupSample sample_checked(const RunConfig& c) {
  const double mb = soup_memory_estimate_mb(c.soup);
  if (mb > static_cast<double>(c.memory_budget_mb)) {
    throw GuardError("soup needs about " + std::to_string(static_cast<long long>(mb)) + " MiB, above memory_budget_mb");
  }
  return sample_soup(soup_params(c));
}

int cmd_sample(const RunConfig& c) {
  const SoupSample soup = sample_checked(c);
  write_file_atomic(path_in(c, "soup.txt"), soup_to_text(soup.loops));
  write_file_atomic(path_in(c, "soup.manifest.json"), soup_manifest_json(soup, config_to_json(c)));
  std::printf("%zu loops, total length %zu -> %s\n", soup.loops.size(), soup.loops.total_length(),
              path_in(c, "soup.txt").c_str());
  return 0;
}

int cmd_analyze(const RunConfig& c) {
  const LatticeSpec spec{c.soup.dimension, c.soup.box_radius, c.soup.kappa};
  const Box box(spec);
  LoopList loops = c.query.soup_file.empty() ? sample_checked(c).loops : soup_from_text(read_file(c.query.soup_file));
  for (SiteIndex s : loops.sites) {
    if (s >= box.size()) throw ConfigError("soup file has sites outside the configured box");
  }
  json j;
  j["loops"] = loops.size();
  j["total_length"] = loops.total_length();
  j["open_edges"] = open_edges(loops).size();
  json points = json::array();
  for (const Site& p : c.query.points) {
    const ClusterReport r = cluster_of(loops, box, box.index(p));
    points.push_back({{"site", p}, {"cluster_size", r.size}, {"reached_radius", r.reached_radius}, {"shells", r.shells}});
  }
  j["points"] = points;
  try {
    j["one_arm"] = one_arm(loops, box, c.query.radius);
  } catch (const GuardError& e) {
    j["one_arm"] = e.what();
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_exact(const RunConfig& c) {
  const LatticeSpec spec{c.soup.dimension, c.soup.box_radius, c.soup.kappa};
  const GreenTable green(spec);
  const auto& f = c.query.points;
  json j;
  j["set"] = f;
  j["mu_hit"] = mu_hit_mass(f, green);
  j["prob_avoid"] = prob_avoid(f, c.soup.alpha, green);
  if (f.size() <= 20) j["mu_visit_all"] = mu_visit_all(f, green);
  if (f.size() >= 2) {
    j["p_single_loop_two_point"] = p_single_loop_two_point(f[0], f[1], c.soup.alpha, green);
    j["cov_occupancy"] = cov_occupancy(f[0], f[1], c.soup.alpha, green);
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_green(const RunConfig& c) {
  const int d = c.soup.dimension;
  const LatticeSpec spec{d, c.soup.box_radius, c.soup.kappa};
  const GreenTable green(spec);
  const Site origin(d, 0);
  json rows = json::array();
  for (const Site& p : c.query.points) {
    json r = {{"site", p}, {"box", green(origin, p)}};
    if (d >= 3) {
      r["free"] = green_free_quadrature(d, p);
      r["free_asymptotic"] = green_free_asymptotic(d, p);
    }
    rows.push_back(r);
  }
  std::cout << rows.dump(2) << "\n";
  return 0;
}

int cmd_experiment(const RunConfig& c) {
  const std::string started = utc_timestamp();
  const ExperimentSpec& spec = c.experiment;
  const std::string name = to_string(spec.kind);
  std::filesystem::create_directories(c.output_dir);
  RunControl control{c.workers, path_in(c, name + ".checkpoint")};
  const ExperimentResult res = run_experiment(spec, control);
  write_file_atomic(path_in(c, name + ".csv"), rows_to_csv(res.rows));
  write_file_atomic(path_in(c, name + ".json"), result_sidecar_json(spec, res));
  Manifest m;
  m.config_json = config_to_json(c);
  m.seed = c.seed;
  m.streams = res.streams;
  m.started = started;
  m.finished = utc_timestamp();
  write_file_atomic(path_in(c, name + ".manifest.json"), manifest_json(m));
  std::printf("%zu rows -> %s\n", res.rows.size(), path_in(c, name + ".csv").c_str());
  if (res.fit) std::printf("slope %.6f +- %.6f (%d points)\n", res.fit->slope, res.fit->slope_se, res.fit->points_used);
  return 0;
}

int cmd_validate(const RunConfig& c) {
  ValidationOptions o;
  o.level = c.level == "full" ? ValidationLevel::Full : ValidationLevel::Quick;
  o.workers = c.workers;
  o.seed = c.seed;
  const auto results = run_validation(o, [](const CriterionResult& r) {
    std::printf("%s\n", format_result_line(r).c_str());
    std::fflush(stdout);
  });
  write_file_atomic(path_in(c, "validation.json"), validation_json(results, o.level));
  const bool ok = validation_passed(results);
  std::printf("%s\n", ok ? "validation passed" : "validation FAILED");
  return ok ? 0 : 3;
}

int cmd_defaults(const Flags& f) {
  RunConfig c;
  if (!f.kind.empty()) c.experiment = default_spec(parse_experiment_kind(f.kind));
  std::cout << config_to_json(c);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random walk loop soups on Z^d: sampling, exact identities and scaling experiments.\n"
               "Exit codes: 0 ok, 1 configuration error, 2 guard violation, 3 runtime failure."};
  app.require_subcommand(1);
  Flags f;
  auto common = [&f](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON config file (see `defaults`)");
    sub->add_option("--seed", f.seed, "master seed (overrides the config)");
    sub->add_option("--workers", f.workers, "worker threads (fallback: LOOPSOUP_WORKERS)");
    sub->add_option("--out", f.out, "output directory");
  };
  auto* sample = app.add_subcommand("sample", "sample a box soup to soup.txt plus a JSON manifest");
  auto* analyze = app.add_subcommand("analyze", "clusters, shells and one-arm of a soup file (or a fresh soup)");
  auto* exact = app.add_subcommand("exact", "determinant identities for the query points on the box");
  auto* green = app.add_subcommand("green", "box and free Green function at the query points");
  auto* experiment = app.add_subcommand("experiment", "run the configured experiment to CSV + JSON sidecar");
  auto* validate = app.add_subcommand("validate", "run the acceptance suite");
  auto* defaults = app.add_subcommand("defaults", "print the default configuration");
  for (auto* s : {sample, analyze, exact, green, experiment, validate}) common(s);
  validate->add_option("--level", f.level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  defaults->add_option("--kind", f.kind, "experiment kind whose defaults to print");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    if (*defaults) return cmd_defaults(f);
    const RunConfig c = resolve(f);
    if (*sample) return cmd_sample(c);
    if (*analyze) return cmd_analyze(c);
    if (*exact) return cmd_exact(c);
    if (*green) return cmd_green(c);
    if (*experiment) return cmd_experiment(c);
    if (*validate) return cmd_validate(c);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
