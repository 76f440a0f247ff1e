#include "loopsoup/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "loopsoup/error.hpp"

namespace loopsoup {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  const std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (!names.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

template <class T>
void take(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + where);
  }
}

json soup_json(const SoupConfig& s) {
  return {{"dimension", s.dimension}, {"box_radius", s.box_radius}, {"kappa", s.kappa},
          {"alpha", s.alpha},         {"order", s.order},           {"jmax", s.jmax},
          {"stream", s.stream},       {"length_budget", s.length_budget}};
}

SoupConfig soup_from(const json& j) {
  const std::string where = "soup";
  check_keys(j, {"dimension", "box_radius", "kappa", "alpha", "order", "jmax", "stream", "length_budget"}, where);
  SoupConfig s;
  take(j, "dimension", s.dimension, where);
  take(j, "box_radius", s.box_radius, where);
  take(j, "kappa", s.kappa, where);
  take(j, "alpha", s.alpha, where);
  take(j, "order", s.order, where);
  take(j, "jmax", s.jmax, where);
  take(j, "stream", s.stream, where);
  take(j, "length_budget", s.length_budget, where);
  return s;
}

json experiment_json(const ExperimentSpec& e) {
  return {{"kind", to_string(e.kind)},
          {"dimension", e.dimension},
          {"alpha", e.alpha},
          {"kappa", e.kappa},
          {"sizes", e.sizes},
          {"box_factor", e.box_factor},
          {"replicas", e.replicas},
          {"box_radius", e.box_radius},
          {"full_cluster", e.full_cluster},
          {"alphas", e.alphas},
          {"beta", e.beta},
          {"level", e.level},
          {"horizon", e.horizon},
          {"dimensions", e.dimensions},
          {"truncation_radius", e.truncation_radius},
          {"tail_exponent", e.tail_exponent},
          {"mean", e.mean},
          {"generations", e.generations},
          {"capacity_walks", e.capacity_walks}};
}

ExperimentSpec experiment_from(const json& j) {
  const std::string where = "experiment";
  check_keys(j,
             {"kind", "dimension", "alpha", "kappa", "sizes", "box_factor", "replicas", "box_radius", "full_cluster",
              "alphas", "beta", "level", "horizon", "dimensions", "truncation_radius", "tail_exponent", "mean",
              "generations", "capacity_walks"},
             where);
  std::string kind = "one-arm";
  take(j, "kind", kind, where);
  ExperimentSpec e = default_spec(parse_experiment_kind(kind));
  take(j, "dimension", e.dimension, where);
  take(j, "alpha", e.alpha, where);
  take(j, "kappa", e.kappa, where);
  take(j, "sizes", e.sizes, where);
  take(j, "box_factor", e.box_factor, where);
  take(j, "replicas", e.replicas, where);
  take(j, "box_radius", e.box_radius, where);
  take(j, "full_cluster", e.full_cluster, where);
  take(j, "alphas", e.alphas, where);
  take(j, "beta", e.beta, where);
  take(j, "level", e.level, where);
  take(j, "horizon", e.horizon, where);
  take(j, "dimensions", e.dimensions, where);
  take(j, "truncation_radius", e.truncation_radius, where);
  take(j, "tail_exponent", e.tail_exponent, where);
  take(j, "mean", e.mean, where);
  take(j, "generations", e.generations, where);
  take(j, "capacity_walks", e.capacity_walks, where);
  return e;
}

}  // namespace

void RunConfig::validate() const {
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (output_dir.empty()) throw ConfigError("output_dir must be nonempty");
  if (memory_budget_mb == 0) throw ConfigError("memory_budget_mb must be > 0");
  if (level != "quick" && level != "full") throw ConfigError("level must be quick or full");
  const LatticeSpec spec{soup.dimension, soup.box_radius, soup.kappa};
  spec.validate();
  if (!(soup.alpha > 0.0) || !std::isfinite(soup.alpha)) throw ConfigError("soup alpha must be finite and > 0");
  if (soup.order != "lexicographic" && soup.order != "reverse") {
    throw ConfigError("soup order must be lexicographic or reverse");
  }
  if (soup.jmax < 0) throw ConfigError("soup jmax must be >= 0");
  experiment.validate();
  for (const Site& p : query.points) {
    if (static_cast<int>(p.size()) != soup.dimension) throw ConfigError("query points must have the soup dimension");
  }
  if (query.radius < 1) throw ConfigError("query radius must be >= 1");
}

std::string config_to_json(const RunConfig& c) {
  json j = {{"seed", c.seed},
            {"workers", c.workers},
            {"output_dir", c.output_dir},
            {"memory_budget_mb", c.memory_budget_mb},
            {"level", c.level},
            {"soup", soup_json(c.soup)},
            {"experiment", experiment_json(c.experiment)},
            {"query", {{"points", c.query.points}, {"soup_file", c.query.soup_file}, {"radius", c.query.radius}}}};
  return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  const std::string where = "config";
  check_keys(j, {"seed", "workers", "output_dir", "memory_budget_mb", "level", "soup", "experiment", "query"}, where);
  RunConfig c;
  take(j, "seed", c.seed, where);
  take(j, "workers", c.workers, where);
  take(j, "output_dir", c.output_dir, where);
  take(j, "memory_budget_mb", c.memory_budget_mb, where);
  take(j, "level", c.level, where);
  if (j.contains("soup")) c.soup = soup_from(j.at("soup"));
  if (j.contains("experiment")) c.experiment = experiment_from(j.at("experiment"));
  if (j.contains("query")) {
    const json& q = j.at("query");
    check_keys(q, {"points", "soup_file", "radius"}, "query");
    take(q, "points", c.query.points, "query");
    take(q, "soup_file", c.query.soup_file, "query");
    take(q, "radius", c.query.radius, "query");
  } else {
    c.query.points = {Site(c.soup.dimension, 0)};
  }
  c.experiment.seed = c.seed;
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

SoupParams soup_params(const RunConfig& c) {
  SoupParams p;
  p.alpha = c.soup.alpha;
  p.spec = {c.soup.dimension, c.soup.box_radius, c.soup.kappa};
  p.order = c.soup.order == "reverse" ? VertexOrder::Reverse : VertexOrder::Lexicographic;
  p.jmax = c.soup.jmax;
  p.seed = c.seed;
  p.stream = c.soup.stream;
  p.length_budget = c.soup.length_budget;
  p.workers = c.workers;
  return p;
}

double soup_memory_estimate_mb(const SoupConfig& soup) {
  const LatticeSpec spec{soup.dimension, soup.box_radius, soup.kappa};
  const double sites = static_cast<double>(spec.site_count());
  const double padded = std::pow(spec.side() + 2.0, spec.dimension);
  // Vertex order and ranks, the cap's CG vectors, and the expected loop storage.
  const double cg = padded <= 4e6 ? 6.0 * 8.0 * padded : 0.0;
  return (8.0 * sites + cg + 4.0 * sites * soup.alpha) / (1024.0 * 1024.0);
}

}  // namespace loopsoup
