#include "loopsoup/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "loopsoup/error.hpp"
#include "loopsoup/explorer.hpp"
#include "loopsoup/green.hpp"
#include "loopsoup/loopmeasure.hpp"
#include "loopsoup/percolation.hpp"

namespace loopsoup {

namespace {

struct KindName {
  ExperimentKind kind;
  const char* name;
};
constexpr KindName kKindNames[] = {
    {ExperimentKind::OneArm, "one-arm"},
    {ExperimentKind::TwoPoint, "two-point"},
    {ExperimentKind::ClusterTail, "cluster-tail"},
    {ExperimentKind::ExcursionTail, "excursion-tail"},
    {ExperimentKind::CrossingScan, "crossing-scan"},
    {ExperimentKind::FirstShell, "first-shell"},
    {ExperimentKind::CapacityGrowth, "capacity-growth"},
    {ExperimentKind::GwProgeny, "gw-progeny"},
};

EstimateRow make_row(const std::string& kind, const ExperimentSpec& spec, double n, double value, double se,
                     std::uint64_t replicas, double wall) {
  return {kind, spec.dimension, spec.alpha, spec.kappa, n, value, se, replicas, wall};
}

MeanAccumulator channel_mean(const ReplicaValues& v, int c) {
  MeanAccumulator acc;
  for (std::uint64_t r = 0; r < v.replicas; ++r) acc.add(v.at(r, c));
  return acc;
}

std::size_t distinct_sites(const LoopList& loops) {
  std::vector<SiteIndex> s = loops.sites;
  std::sort(s.begin(), s.end());
  return static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin());
}

bool loops_contain(const LoopList& loops, SiteIndex x) {
  return std::find(loops.sites.begin(), loops.sites.end(), x) != loops.sites.end();
}

Site axis_site(int d, int k) {
  Site x(d, 0);
  x[0] = k;
  return x;
}

double log_center_green(int d, int radius, double kappa) {
  if (radius < 0) return 0.0;
  const LatticeSpec spec{d, radius, kappa};
  if (std::pow(spec.side() + 2.0, d) > 2e7) {
    throw GuardError("box too large for the exact center Green solve");
  }
  const GreenTable g(spec);
  const SiteIndex o = g.box().origin();
  return std::log(g.column(o)[o]);
}

// Dyadic thresholds 1, 2, 4, ... up to the largest observed value.
std::vector<double> dyadic_thresholds(const std::vector<double>& values) {
  double top = 0.0;
  for (double v : values) top = std::max(top, v);
  std::vector<double> out;
  for (double x = 1.0; x < top; x *= 2.0) out.push_back(x);
  return out;
}

std::vector<FitPoint> fit_points(const std::vector<EstimateRow>& rows, const std::string& kind, double shift = 0.0) {
  std::vector<FitPoint> pts;
  for (const auto& r : rows) {
    if (r.kind == kind) pts.push_back({r.n + shift, r.value, r.standard_error});
  }
  return pts;
}

void record_fit(ExperimentResult& out, std::vector<FitPoint> pts, double reference, bool drop_noisy) {
  std::vector<double> dropped;
  if (drop_noisy) pts = drop_noisy_smallest(std::move(pts), &dropped);
  std::erase_if(pts, [](const FitPoint& p) { return !(p.y > 0.0); });
  if (pts.size() < 3) {
    out.notes.push_back("slope fit skipped: fewer than 3 positive points");
    return;
  }
  SlopeFit fit = fit_log_log(pts);
  fit.excluded = dropped;
  out.fit = fit;
  out.metadata["reference_slope"] = reference;
  if (!dropped.empty()) {
    out.notes.push_back("smallest size dropped from the fit: relative standard error above 20%");
  }
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& k : kKindNames) {
    if (k.kind == kind) return k.name;
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (const auto& k : kKindNames) {
    if (name == k.name) return k.kind;
  }
  throw ConfigError("unknown experiment kind '" + name + "'");
}

void ExperimentSpec::validate() const {
  if (dimension < 1 || dimension > kMaxBoxDimension) throw ConfigError("dimension out of range");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be finite and >= 0");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw ConfigError("kappa must be finite and >= 0 (kappa < 0 is unsupported)");
  }
  if (replicas < 100) throw ConfigError("replicas must be >= 100");
  if (!(box_factor >= 1.0)) throw ConfigError("box factor must be >= 1");
  if (box_radius < 0) throw ConfigError("box radius must be >= 0");
  const bool uses_sizes = kind != ExperimentKind::FirstShell;
  if (uses_sizes) {
    if (sizes.empty()) throw ConfigError("sizes must be nonempty");
    for (std::size_t i = 1; i < sizes.size(); ++i) {
      if (sizes[i] <= sizes[i - 1]) throw ConfigError("sizes must be strictly increasing");
    }
    if (sizes.front() < (kind == ExperimentKind::TwoPoint ? 0 : 1)) throw ConfigError("sizes must be positive");
  }
  switch (kind) {
    case ExperimentKind::OneArm:
    case ExperimentKind::TwoPoint:
    case ExperimentKind::ClusterTail:
    case ExperimentKind::CapacityGrowth:
      if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
      break;
    case ExperimentKind::ExcursionTail:
      if (dimension < 3) throw ConfigError("excursion-tail needs d >= 3");
      break;
    case ExperimentKind::CrossingScan:
      if (alphas.empty()) throw ConfigError("crossing-scan needs an alpha grid");
      for (double a : alphas) {
        if (!(a >= 0.0)) throw ConfigError("crossing-scan alphas must be >= 0");
      }
      if (!(beta >= 2.0)) throw ConfigError("crossing-scan needs beta >= 2");
      if (!(level > 0.0 && level < 1.0)) throw ConfigError("crossing-scan level must be in (0, 1)");
      break;
    case ExperimentKind::FirstShell:
      if (dimension < 5) throw ConfigError("first-shell needs d >= 5");
      for (int d : dimensions) {
        if (d < 5) throw ConfigError("first-shell threshold dimensions must be >= 5");
      }
      if (truncation_radius < 1) throw ConfigError("truncation radius must be >= 1");
      break;
    case ExperimentKind::GwProgeny:
      if (!(tail_exponent > 1.0)) throw ConfigError("offspring tail exponent must be > 1");
      if (!(mean >= 0.0 && mean < 1.0)) throw ConfigError("offspring mean must be in [0, 1) (supercritical rejected)");
      if (generations < 1) throw ConfigError("generations must be >= 1");
      break;
  }
  if (kind == ExperimentKind::CapacityGrowth && dimension < 3) throw ConfigError("capacity-growth needs d >= 3");
}

ExperimentSpec default_spec(ExperimentKind kind) {
  ExperimentSpec s;
  s.kind = kind;
  switch (kind) {
    case ExperimentKind::OneArm:
      s.dimension = 5;
      s.sizes = {2, 3, 4, 6};
      s.replicas = 100000;
      break;
    case ExperimentKind::TwoPoint:
      s.dimension = 5;
      s.alpha = 0.5;
      s.sizes = {0, 1, 2, 3, 4};
      s.replicas = 100000;
      break;
    case ExperimentKind::ClusterTail:
      s.dimension = 5;
      s.sizes = {64, 128, 256, 512};
      s.box_radius = 24;
      s.replicas = 1000000;
      break;
    case ExperimentKind::ExcursionTail:
      s.dimension = 3;
      s.sizes = {1, 2, 4, 8, 16, 32};
      s.horizon = 600;
      s.replicas = 1000000;
      break;
    case ExperimentKind::CrossingScan:
      s.dimension = 3;
      s.sizes = {2, 4};
      s.replicas = 2000;
      break;
    case ExperimentKind::FirstShell:
      s.dimension = 5;
      s.box_radius = 16;
      s.replicas = 100000;
      break;
    case ExperimentKind::CapacityGrowth:
      s.dimension = 3;
      s.sizes = {4, 8, 16, 32};
      s.replicas = 1000;
      break;
    case ExperimentKind::GwProgeny:
      s.sizes = {256, 512, 1024, 2048, 4096};
      s.replicas = 20000000;
      break;
  }
  return s;
}

std::uint64_t replica_stream(const std::string& task, std::uint64_t r) {
  return derive_stream(tag_hash(task.c_str()), r);
}

std::vector<std::pair<std::string, std::uint64_t>> task_streams(const ReplicaRunner& runner) {
  std::vector<std::pair<std::string, std::uint64_t>> out;
  for (const auto& key : runner.task_keys()) out.emplace_back(key, tag_hash(key.c_str()));
  return out;
}

double one_loop_arm_mass(int dimension, int n, int outer, double kappa) {
  if (n < 1 || outer < n) throw ConfigError("one-loop arm mass needs 1 <= n <= outer");
  return log_center_green(dimension, outer, kappa) - log_center_green(dimension, n - 1, kappa);
}

std::vector<EstimateRow> tail_rows(const std::string& kind, const ExperimentSpec& spec,
                                   const std::vector<double>& values, const std::vector<double>& thresholds,
                                   double wall_time) {
  std::vector<EstimateRow> rows;
  const auto n = static_cast<std::uint64_t>(values.size());
  for (double x : thresholds) {
    const auto hits = std::count_if(values.begin(), values.end(), [x](double v) { return v > x; });
    const double p = n ? static_cast<double>(hits) / static_cast<double>(n) : 0.0;
    rows.push_back(make_row(kind, spec, x, p, binomial_se(p, n), n, wall_time));
  }
  return rows;
}

ExperimentResult run_one_arm(const ExperimentSpec& spec, const RunControl& control) {
  spec.validate();
  ExperimentResult out;
  ReplicaRunner runner(control.workers, control.checkpoint_path);
  for (int n : spec.sizes) {
    const int radius = spec.box_radius > 0 ? spec.box_radius : static_cast<int>(std::ceil(spec.box_factor * n));
    if (n * spec.box_factor > radius + 1e-9) throw GuardError("one-arm needs n <= M / lambda");
    const LatticeSpec lattice{spec.dimension, radius, spec.kappa};
    const MultiplicityCap cap = choose_multiplicity_cap(lattice, spec.alpha);
    const std::string key = "one-arm/d=" + std::to_string(spec.dimension) + "/n=" + std::to_string(n);
    ReplicaTask task{key, spec.replicas, 2, [&]() -> ReplicaFn {
                       auto ex = std::make_shared<ClusterExplorer>(lattice, spec.alpha, cap.jmax, cap.green_bound);
                       return [ex, &spec, key, n](std::uint64_t r, std::span<double> v) {
                         RngStream rng(spec.seed, replica_stream(key, r));
                         const ExploreResult res = ex->explore(rng, n);
                         // Loops through 0 are exactly the loops drawn at the root.
                         bool single = false;
                         const Box& box = ex->box();
                         for (std::size_t i = 0; i < res.loops.size() && !single; ++i) {
                           const auto loop = res.loops.loop(i);
                           if (std::find(loop.begin(), loop.end(), box.origin()) == loop.end()) continue;
                           for (SiteIndex s : loop) single = single || box.sup_norm(s) >= n;
                         }
                         if (single && !res.stopped) throw RuntimeError("one-loop arm without a cluster arm");
                         v[0] = res.stopped ? 1.0 : 0.0;
                         v[1] = single ? 1.0 : 0.0;
                       };
                     }};
    const ReplicaValues vals = runner.run(task);
    const double p = channel_mean(vals, 0).mean();
    const double q = channel_mean(vals, 1).mean();
    out.rows.push_back(make_row("one-arm", spec, n, p, binomial_se(p, vals.replicas), vals.replicas, vals.wall_time));
    out.rows.push_back(
        make_row("one-arm-single-loop", spec, n, q, binomial_se(q, vals.replicas), vals.replicas, vals.wall_time));
    try {
      const auto t0 = std::chrono::steady_clock::now();
      const double mass = one_loop_arm_mass(spec.dimension, n, radius, spec.kappa);
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      out.rows.push_back(make_row("one-arm-single-loop-exact", spec, n, 1.0 - std::exp(-spec.alpha * mass), 0.0, 0, wall));
    } catch (const GuardError&) {
      out.notes.push_back("exact single-loop arm skipped at n=" + std::to_string(n) + ": box too large");
    }
  }
  record_fit(out, fit_points(out.rows, "one-arm"), 2.0 - spec.dimension, true);
  out.metadata["box_factor"] = spec.box_factor;
  out.streams = task_streams(runner);
  return out;
}

ExperimentResult run_two_point(const ExperimentSpec& spec, const RunControl& control) {
  spec.validate();
  ExperimentResult out;
  const int far = spec.sizes.back();
  const int radius =
      spec.box_radius > 0 ? spec.box_radius : std::max(1, static_cast<int>(std::ceil(spec.box_factor * far)));
  if (far * spec.box_factor > radius + 1e-9) throw GuardError("two-point offsets must lie within M / lambda");
  const LatticeSpec lattice{spec.dimension, radius, spec.kappa};
  const MultiplicityCap cap = choose_multiplicity_cap(lattice, spec.alpha);
  const Box box(lattice);
  std::vector<SiteIndex> targets;
  for (int k : spec.sizes) targets.push_back(box.index(axis_site(spec.dimension, k)));
  const int channels = static_cast<int>(2 * targets.size());
  const std::string key = "two-point/d=" + std::to_string(spec.dimension) + "/M=" + std::to_string(radius);
  ReplicaRunner runner(control.workers, control.checkpoint_path);
  ReplicaTask task{key, spec.replicas, channels, [&]() -> ReplicaFn {
                     auto ex = std::make_shared<ClusterExplorer>(lattice, spec.alpha, cap.jmax, cap.green_bound);
                     return [ex, &spec, key, targets](std::uint64_t r, std::span<double> v) {
                       RngStream rng(spec.seed, replica_stream(key, r));
                       const ExploreResult res = ex->explore(rng, 0);
                       const SiteIndex o = ex->box().origin();
                       LoopList through;
                       for (std::size_t i = 0; i < res.loops.size(); ++i) {
                         const auto loop = res.loops.loop(i);
                         if (std::find(loop.begin(), loop.end(), o) != loop.end()) through.add(loop);
                       }
                       for (std::size_t t = 0; t < targets.size(); ++t) {
                         const bool in_cluster = loops_contain(res.loops, targets[t]);
                         const bool single = loops_contain(through, targets[t]);
                         if (single && !in_cluster) throw RuntimeError("single-loop connection outside the cluster");
                         v[2 * t] = in_cluster ? 1.0 : 0.0;
                         v[2 * t + 1] = single ? 1.0 : 0.0;
                       }
                     };
                   }};
  const ReplicaValues vals = runner.run(task);
  const GreenTable green(lattice);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const int k = spec.sizes[t];
    const double p = channel_mean(vals, static_cast<int>(2 * t)).mean();
    const double q = channel_mean(vals, static_cast<int>(2 * t + 1)).mean();
    const std::string kind = k == 0 ? "two-point-nonempty" : "two-point";
    out.rows.push_back(make_row(kind, spec, k, p, binomial_se(p, vals.replicas), vals.replicas, vals.wall_time));
    if (k == 0) continue;
    out.rows.push_back(
        make_row("two-point-single-loop", spec, k, q, binomial_se(q, vals.replicas), vals.replicas, vals.wall_time));
    const double exact = p_single_loop_two_point(axis_site(spec.dimension, k), spec.alpha, green);
    out.rows.push_back(make_row("two-point-single-loop-exact", spec, k, exact, 0.0, 0, 0.0));
  }
  // Fitted against log(|x|_inf + 1).
  record_fit(out, fit_points(out.rows, "two-point", 1.0), 2.0 * (2.0 - spec.dimension), false);
  out.metadata["box_radius"] = radius;
  out.notes.push_back("two-point slope is fitted against |x|_inf + 1");
  out.streams = task_streams(runner);
  return out;
}

ExperimentResult run_cluster_tail(const ExperimentSpec& spec, const RunControl& control) {
  spec.validate();
  ExperimentResult out;
  const int radius = spec.box_radius > 0 ? spec.box_radius : 16;
  const LatticeSpec lattice{spec.dimension, radius, spec.kappa};
  const MultiplicityCap cap = choose_multiplicity_cap(lattice, spec.alpha);
  const std::string key = "cluster-tail/d=" + std::to_string(spec.dimension) + "/M=" + std::to_string(radius);
  const bool full = spec.full_cluster;
  ReplicaRunner runner(control.workers, control.checkpoint_path);
  ReplicaTask task{key, spec.replicas, 2, [&]() -> ReplicaFn {
                     auto ex = std::make_shared<ClusterExplorer>(lattice, spec.alpha, cap.jmax, cap.green_bound);
                     return [ex, &spec, key, full](std::uint64_t r, std::span<double> v) {
                       RngStream rng(spec.seed, replica_stream(key, r));
                       const LoopList root = ex->root_loops(ex->box().origin(), rng);
                       v[0] = root.empty() ? 0.0 : static_cast<double>(distinct_sites(root) - 1);
                       v[1] = 0.0;
                       if (full) {
                         RngStream crng(spec.seed, replica_stream(key + "/cluster", r));
                         v[1] = static_cast<double>(distinct_sites(ex->explore(crng, 0).loops));
                       }
                     };
                   }};
  const ReplicaValues vals = runner.run(task);
  std::vector<double> shell(vals.replicas), size(vals.replicas);
  for (std::uint64_t r = 0; r < vals.replicas; ++r) {
    shell[r] = vals.at(r, 0);
    size[r] = vals.at(r, 1);
  }
  auto shell_rows = tail_rows("cluster-tail-first-shell", spec, shell, dyadic_thresholds(shell), vals.wall_time);
  out.rows.insert(out.rows.end(), shell_rows.begin(), shell_rows.end());
  if (full) {
    auto size_rows = tail_rows("cluster-tail-size", spec, size, dyadic_thresholds(size), vals.wall_time);
    out.rows.insert(out.rows.end(), size_rows.begin(), size_rows.end());
  }
  const auto mean_shell = channel_mean(vals, 0);
  out.rows.push_back(make_row("cluster-tail-first-shell-mean", spec, 0, mean_shell.mean(), mean_shell.standard_error(),
                              vals.replicas, vals.wall_time));

  // Fit over the configured thresholds only.
  std::vector<double> fit_x(spec.sizes.begin(), spec.sizes.end());
  const auto fit_rows = tail_rows("cluster-tail-first-shell", spec, shell, fit_x, vals.wall_time);
  std::vector<FitPoint> pts = fit_points(fit_rows, "cluster-tail-first-shell");
  const double exponent = 1.0 - spec.dimension / 2.0;
  record_fit(out, pts, exponent, false);

  // Prefactor at the largest dyadic threshold with at least 100 exceedances.
  const double n = static_cast<double>(vals.replicas);
  for (auto it = shell_rows.rbegin(); it != shell_rows.rend(); ++it) {
    if (it->value * n >= 100.0) {
      const double scale = std::pow(it->n, -exponent);
      out.metadata["prefactor"] = it->value * scale;
      out.metadata["prefactor_se"] = it->standard_error * scale;
      out.metadata["prefactor_threshold"] = it->n;
      break;
    }
  }
  if (spec.dimension >= 5) {
    const double g00 = free_green(spec.dimension, 0)->at(std::vector<int>(spec.dimension, 0));
    const double d = spec.dimension;
    out.metadata["prefactor_reference"] =
        spec.alpha * std::pow(d, d / 2.0) / ((d / 2.0 - 1.0) * std::pow(2.0 * std::numbers::pi * g00, d / 2.0));
    out.metadata["green_origin"] = g00;
  }
  out.metadata["box_radius"] = radius;
  out.streams = task_streams(runner);
  return out;
}

ExperimentResult run_crossing_scan(const ExperimentSpec& spec, const RunControl& control) {
  spec.validate();
  ExperimentResult out;
  std::vector<double> alphas = spec.alphas;
  std::sort(alphas.begin(), alphas.end());
  const double top = alphas.back();
  const int far = static_cast<int>(std::ceil(spec.beta * spec.sizes.back()));
  const int radius = spec.box_radius > 0 ? spec.box_radius : static_cast<int>(std::ceil(spec.box_factor * far));
  const LatticeSpec lattice{spec.dimension, radius, spec.kappa};
  const std::size_t na = alphas.size(), nn = spec.sizes.size();
  const int channels = static_cast<int>(na * nn);
  out.metadata["box_radius"] = radius;
  if (!(top > 0.0)) {
    for (double a : alphas) {
      ExperimentSpec s = spec;
      s.alpha = a;
      out.rows.push_back(make_row("crossing-max", s, 0, 0.0, 0.0, spec.replicas, 0.0));
    }
    out.metadata["proxy_alpha"] = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const MultiplicityCap cap = choose_multiplicity_cap(lattice, top);
  const std::string key = "crossing-scan/d=" + std::to_string(spec.dimension) + "/M=" + std::to_string(radius);
  ReplicaRunner runner(control.workers, control.checkpoint_path);
  ReplicaTask task{
      key, spec.replicas, channels, [&]() -> ReplicaFn {
        auto ex = std::make_shared<ClusterExplorer>(lattice, top, cap.jmax, cap.green_bound);
        return [ex, &spec, &alphas, key, top, na, nn](std::uint64_t r, std::span<double> v) {
          const Box& box = ex->box();
          RngStream rng(spec.seed, replica_stream(key, r));
          const int inner = spec.sizes.front();
          std::vector<SiteIndex> roots;
          for (SiteIndex i = 0; i < box.size(); ++i) {
            if (box.sup_norm(i) <= inner) roots.push_back(i);
          }
          // Every loop meeting a cluster that meets B(0, smallest n) at the largest alpha.
          const ExploreResult res = ex->explore_set(roots, rng, 0);
          RngStream thin(spec.seed, replica_stream(key + "/thin", r));
          std::vector<double> u(res.loops.size());
          for (double& x : u) x = thin.uniform();
          for (std::size_t a = 0; a < na; ++a) {
            LoopList kept;
            for (std::size_t i = 0; i < res.loops.size(); ++i) {
              if (u[i] * top < alphas[a]) kept.add(res.loops.loop(i));
            }
            for (std::size_t k = 0; k < nn; ++k) {
              const int n = spec.sizes[k];
              const int m = static_cast<int>(std::ceil(spec.beta * n));
              const bool cross = crossing(kept, box, n, m, spec.box_factor);
              v[a * nn + k] = cross ? 1.0 : 0.0;
              if (a > 0 && v[(a - 1) * nn + k] > v[a * nn + k]) {
                throw RuntimeError("crossing at a smaller alpha but not at a larger one");
              }
            }
          }
        };
      }};
  const ReplicaValues vals = runner.run(task);
  double proxy = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t a = 0; a < na; ++a) {
    ExperimentSpec s = spec;
    s.alpha = alphas[a];
    double best = 0.0, best_se = 0.0;
    for (std::size_t k = 0; k < nn; ++k) {
      const double p = channel_mean(vals, static_cast<int>(a * nn + k)).mean();
      const double se = binomial_se(p, vals.replicas);
      out.rows.push_back(make_row("crossing", s, spec.sizes[k], p, se, vals.replicas, vals.wall_time));
      if (p > best) {
        best = p;
        best_se = se;
      }
    }
    out.rows.push_back(make_row("crossing-max", s, 0, best, best_se, vals.replicas, vals.wall_time));
    if (std::isnan(proxy) && best > spec.level) proxy = alphas[a];
  }
  out.metadata["proxy_alpha"] = proxy;
  out.metadata["level"] = spec.level;
  out.metadata["beta"] = spec.beta;
  out.notes.push_back("crossing-scan output is a finite-box proxy diagnostic, not an estimate of a threshold");
  out.streams = task_streams(runner);
  return out;
}

ExperimentResult run_first_shell(const ExperimentSpec& spec, const RunControl& control) {
  spec.validate();
  ExperimentResult out;
  const int radius = spec.box_radius > 0 ? spec.box_radius : 16;
  if (spec.alpha > 0.0) {
    const LatticeSpec lattice{spec.dimension, radius, spec.kappa};
    const MultiplicityCap cap = choose_multiplicity_cap(lattice, spec.alpha);
    const std::string key = "first-shell/d=" + std::to_string(spec.dimension) + "/M=" + std::to_string(radius);
    ReplicaRunner runner(control.workers, control.checkpoint_path);
    ReplicaTask task{key, spec.replicas, 1, [&]() -> ReplicaFn {
                       auto ex = std::make_shared<ClusterExplorer>(lattice, spec.alpha, cap.jmax, cap.green_bound);
                       return [ex, &spec, key](std::uint64_t r, std::span<double> v) {
                         RngStream rng(spec.seed, replica_stream(key, r));
                         const LoopList root = ex->root_loops(ex->box().origin(), rng);
                         v[0] = root.empty() ? 0.0 : static_cast<double>(distinct_sites(root) - 1);
                       };
                     }};
    const ReplicaValues vals = runner.run(task);
    out.streams = task_streams(runner);
    const auto acc = channel_mean(vals, 0);
    out.rows.push_back(make_row("first-shell-mc", spec, radius, acc.mean(), acc.standard_error(), vals.replicas,
                                vals.wall_time));
    const FirstShellSum exact = expected_first_shell(spec.alpha, spec.dimension, spec.truncation_radius);
    out.rows.push_back(make_row("first-shell-exact", spec, spec.truncation_radius, exact.value, exact.tail_width, 0, 0.0));
  }
  for (int d : spec.dimensions) {
    const auto t0 = std::chrono::steady_clock::now();
    const double a = first_shell_threshold(d, spec.truncation_radius);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ExperimentSpec s = spec;
    s.dimension = d;
    s.alpha = a;
    out.rows.push_back(make_row("first-shell-threshold", s, d, a, 0.0, 0, wall));
    out.rows.push_back(make_row("first-shell-threshold-reference", s, d, 2.0 * d - 6.0, 0.0, 0, 0.0));
  }
  out.notes.push_back("the Monte Carlo mean is over loops inside the box; the exact sum is on the full lattice");
  return out;
}

ExperimentResult run_capacity_growth(const ExperimentSpec& spec, const RunControl& control) {
  spec.validate();
  ExperimentResult out;
  ReplicaRunner runner(control.workers, control.checkpoint_path);
  for (int k : spec.sizes) {
    const LatticeSpec lattice{spec.dimension, k, spec.kappa};
    const MultiplicityCap cap = choose_multiplicity_cap(lattice, spec.alpha);
    const std::string key = "capacity-growth/d=" + std::to_string(spec.dimension) + "/k=" + std::to_string(k);
    CapacityOptions options;
    options.boundary_samples = spec.capacity_walks;
    ReplicaTask task{key, spec.replicas, 2, [&]() -> ReplicaFn {
                       auto ex = std::make_shared<ClusterExplorer>(lattice, spec.alpha, cap.jmax, cap.green_bound);
                       return [ex, &spec, key, options](std::uint64_t r, std::span<double> v) {
                         RngStream rng(spec.seed, replica_stream(key, r));
                         const ExploreResult res = ex->explore(rng, 0);
                         RngStream crng(spec.seed, replica_stream(key + "/capacity", r));
                         const CapacityEstimate c = cluster_capacity(res.loops, ex->box(), options, crng);
                         v[0] = c.value;
                         v[1] = static_cast<double>(distinct_sites(res.loops));
                       };
                     }};
    const ReplicaValues vals = runner.run(task);
    const auto cap_mean = channel_mean(vals, 0);
    const auto size_mean = channel_mean(vals, 1);
    out.rows.push_back(make_row("capacity-growth", spec, k, cap_mean.mean(), cap_mean.standard_error(), vals.replicas,
                                vals.wall_time));
    out.rows.push_back(make_row("capacity-growth-cluster-size", spec, k, size_mean.mean(),
                                size_mean.standard_error(), vals.replicas, vals.wall_time));
  }
  const auto pts = fit_points(out.rows, "capacity-growth");
  bool increasing = true;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    increasing = increasing && pts[i].y - pts[i - 1].y > 3.0 * std::hypot(pts[i].se, pts[i - 1].se);
  }
  out.metadata["strictly_increasing_3sigma"] = increasing ? 1.0 : 0.0;
  if (spec.dimension == 4) {
    std::vector<FitPoint> loglog;
    for (const auto& p : pts) {
      if (p.x > 1.0) loglog.push_back({std::log(p.x), p.y, p.se});
    }
    record_fit(out, loglog, 0.0, false);
    out.notes.push_back("d=4: slope of log capacity against log log k");
  } else {
    record_fit(out, pts, 0.0, false);
  }
  if (out.fit) out.metadata["epsilon_hat"] = out.fit->slope;
  out.streams = task_streams(runner);
  for (int k : spec.sizes) {
    const std::string key = "capacity-growth/d=" + std::to_string(spec.dimension) + "/k=" + std::to_string(k) + "/capacity";
    out.streams.emplace_back(key, tag_hash(key.c_str()));
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const RunControl& control) {
  switch (spec.kind) {
    case ExperimentKind::OneArm:
      return run_one_arm(spec, control);
    case ExperimentKind::TwoPoint:
      return run_two_point(spec, control);
    case ExperimentKind::ClusterTail:
      return run_cluster_tail(spec, control);
    case ExperimentKind::ExcursionTail:
      return run_excursion_tail(spec, control);
    case ExperimentKind::CrossingScan:
      return run_crossing_scan(spec, control);
    case ExperimentKind::FirstShell:
      return run_first_shell(spec, control);
    case ExperimentKind::CapacityGrowth:
      return run_capacity_growth(spec, control);
    case ExperimentKind::GwProgeny:
      return run_gw_progeny(spec, control);
  }
  throw ConfigError("unknown experiment kind");
}

}  // namespace loopsoup
