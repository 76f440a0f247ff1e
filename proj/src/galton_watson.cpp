#include <algorithm>
#include <cmath>
#include <memory>

#include "loopsoup/distributions.hpp"
#include "loopsoup/error.hpp"
#include "loopsoup/estimators.hpp"

namespace loopsoup {

GwOffspring::GwOffspring(double a, double mean) : tail_exponent(a) {
  if (!(a > 1.0)) throw ConfigError("offspring tail exponent must be > 1");
  if (!(mean >= 0.0 && mean < 1.0)) throw ConfigError("offspring mean must be in [0, 1) (supercritical rejected)");
  q = mean / std::riemann_zeta(a);
  if (q > 1.0) throw ConfigError("offspring mean too large for this tail exponent");
}

std::uint64_t GwOffspring::sample(RngStream& rng) const {
  if (!(rng.uniform() < q)) return 0;
  return sample_discrete_pareto(rng, tail_exponent);
}

GwRun simulate_gw(const GwOffspring& law, int generations, std::uint64_t cap, RngStream& rng) {
  GwRun run;
  run.total_progeny = 1;
  run.generation_sizes.assign(static_cast<std::size_t>(generations) + 1, 0);
  run.generation_sizes[0] = 1;
  std::uint64_t z = 1;
  for (int k = 1; z > 0; ++k) {
    std::uint64_t next = 0;
    for (std::uint64_t i = 0; i < z && run.total_progeny + next <= cap; ++i) next += law.sample(rng);
    run.total_progeny += next;
    if (run.total_progeny > cap) {
      // Truncated: later generations are counted as alive.
      run.total_progeny = cap + 1;
      for (int j = k; j <= generations; ++j) run.generation_sizes[j] = std::max<std::uint64_t>(next, 1);
      break;
    }
    if (k <= generations) run.generation_sizes[k] = next;
    z = next;
  }
  return run;
}

ExperimentResult run_gw_progeny(const ExperimentSpec& spec, const RunControl& control) {
  spec.validate();
  ExperimentResult out;
  const GwOffspring law(spec.tail_exponent, spec.mean);
  const int gens = spec.generations;
  constexpr std::uint64_t kCap = 10'000'000;
  const std::string key = "gw-progeny/a=" + std::to_string(spec.tail_exponent) + "/mean=" + std::to_string(spec.mean);
  ReplicaRunner runner(control.workers, control.checkpoint_path);
  // Channels: total progeny, last nonempty generation (capped at gens).
  ReplicaTask task{key, spec.replicas, 2, [&]() -> ReplicaFn {
                     return [&spec, &law, key, gens](std::uint64_t r, std::span<double> v) {
                       RngStream rng(spec.seed, replica_stream(key, r));
                       const GwRun run = simulate_gw(law, gens, kCap, rng);
                       v[0] = static_cast<double>(run.total_progeny);
                       int last = 0;
                       for (int k = 1; k <= gens; ++k) {
                         if (run.generation_sizes[k] > 0) last = k;
                       }
                       v[1] = last;
                     };
                   }};
  const ReplicaValues vals = runner.run(task);
  std::vector<double> s(vals.replicas);
  for (std::uint64_t r = 0; r < vals.replicas; ++r) s[r] = vals.at(r, 0);
  std::vector<double> thresholds(spec.sizes.begin(), spec.sizes.end());
  ExperimentSpec echo = spec;
  echo.alpha = spec.mean;
  echo.dimension = 0;
  out.rows = tail_rows("gw-progeny-tail", echo, s, thresholds, vals.wall_time);

  std::vector<FitPoint> tail;
  for (const auto& row : out.rows) {
    if (row.value > 0.0) tail.push_back({row.n, row.value, row.standard_error});
  }
  if (tail.size() >= 3) {
    out.fit = fit_log_log(tail);
    out.metadata["reference_slope"] = -spec.tail_exponent;
  } else {
    out.notes.push_back("progeny tail fit skipped: fewer than 3 positive thresholds");
  }

  std::vector<FitPoint> survival;
  bool bound_ok = true;
  for (int k = 1; k <= gens; ++k) {
    double alive = 0.0;
    for (std::uint64_t r = 0; r < vals.replicas; ++r) alive += vals.at(r, 1) >= k;
    const double p = alive / static_cast<double>(vals.replicas);
    const double se = binomial_se(p, vals.replicas);
    out.rows.push_back({"gw-survival", 0, spec.mean, 0.0, static_cast<double>(k), p, se, vals.replicas, vals.wall_time});
    bound_ok = bound_ok && p <= std::pow(spec.mean, k) + 3.0 * se;
    if (alive >= 20.0) survival.push_back({static_cast<double>(k), p, se});
  }
  if (survival.size() >= 3) {
    const SlopeFit fit = fit_log_linear(survival);
    out.metadata["survival_slope"] = fit.slope;
    out.metadata["survival_slope_se"] = fit.slope_se;
  }
  out.metadata["survival_reference_slope"] = std::log(spec.mean);
  out.metadata["first_moment_bound_ok"] = bound_ok ? 1.0 : 0.0;
  out.metadata["offspring_q"] = law.q;
  out.streams = task_streams(runner);
  return out;
}

}  // namespace loopsoup
