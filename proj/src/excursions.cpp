#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>

#include "loopsoup/error.hpp"
#include "loopsoup/estimators.hpp"
#include "loopsoup/green.hpp"

namespace loopsoup {

namespace {

// Distinct-site counter keyed by a mixed-radix encoding of the position.
class RangeSet {
 public:
  explicit RangeSet(std::size_t max_sites) {
    std::size_t cap = 16;
    while (cap < 4 * max_sites) cap *= 2;
    keys_.assign(cap, 0);
    stamps_.assign(cap, 0);
    mask_ = cap - 1;
  }
  void reset() {
    ++stamp_;
    count_ = 0;
  }
  void insert(std::uint64_t key) {
    for (std::size_t h = mix64(key) & mask_;; h = (h + 1) & mask_) {
      if (stamps_[h] != stamp_) {
        stamps_[h] = stamp_;
        keys_[h] = key;
        ++count_;
        return;
      }
      if (keys_[h] == key) return;
    }
  }
  std::size_t count() const { return count_; }

 private:
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint32_t> stamps_;
  std::size_t mask_ = 0;
  std::uint32_t stamp_ = 0;
  std::size_t count_ = 0;
};

}  // namespace

ExperimentResult run_excursion_tail(const ExperimentSpec& spec, const RunControl& control) {
  spec.validate();
  ExperimentResult out;
  const int d = spec.dimension;
  const int horizon = spec.horizon > 0 ? spec.horizon : 600;
  const double radix = 2.0 * horizon + 1.0;
  if (d * std::log2(radix) > 63.0) throw GuardError("excursion horizon too long for the site encoding in this dimension");
  std::array<std::uint64_t, kMaxBoxDimension> weight{};
  weight[0] = 1;
  for (int i = 1; i < d; ++i) weight[i] = weight[i - 1] * static_cast<std::uint64_t>(radix);

  const auto green = free_green(d, std::min(horizon, 48));
  const double g00 = green->at(std::vector<int>(d, 0));
  const double f_exact = 1.0 - 1.0 / g00;
  const std::string key = "excursion-tail/d=" + std::to_string(d) + "/T=" + std::to_string(horizon);

  ReplicaRunner runner(control.workers, control.checkpoint_path);
  ReplicaTask task{key, spec.replicas, 4, [&]() -> ReplicaFn {
                     auto range = std::make_shared<RangeSet>(static_cast<std::size_t>(horizon) + 1);
                     return [range, &spec, &weight, green, g00, key, d, horizon](std::uint64_t r, std::span<double> v) {
                       RngStream rng(spec.seed, replica_stream(key, r));
                       std::array<int, kMaxBoxDimension> x{};
                       std::uint64_t code = 0;
                       range->reset();
                       range->insert(0);
                       const auto dirs = static_cast<std::uint32_t>(2 * d);
                       int returned = 0;
                       for (int t = 1; t <= horizon; ++t) {
                         const std::uint32_t dir = rng.below(dirs);
                         const int axis = static_cast<int>(dir >> 1);
                         if (dir & 1U) {
                           ++x[axis];
                           code += weight[axis];
                         } else {
                           --x[axis];
                           code -= weight[axis];
                         }
                         range->insert(code);
                         if (code == 0) {
                           returned = t;
                           break;
                         }
                       }
                       double w = 1.0;
                       if (!returned) {
                         // Probability of a later return given the position at the horizon.
                         const std::span<const int> pos(x.data(), static_cast<std::size_t>(d));
                         int far = 0;
                         for (int c : pos) far = std::max(far, std::abs(c));
                         const double g = far <= green->max_offset() ? green->at(pos)
                                                                     : green_free_asymptotic(d, Site(pos.begin(), pos.end()));
                         w = g / g00;
                       }
                       v[0] = returned ? 1.0 : w;
                       v[1] = returned;
                       v[2] = static_cast<double>(range->count());
                       v[3] = w;
                     };
                   }};
  const ReplicaValues vals = runner.run(task);
  const auto n = static_cast<double>(vals.replicas);

  MeanAccumulator ret;
  for (std::uint64_t i = 0; i < vals.replicas; ++i) ret.add(vals.at(i, 0));
  EstimateRow row{"excursion-return-probability", d, spec.alpha, spec.kappa, static_cast<double>(horizon),
                  ret.mean(), ret.standard_error(), vals.replicas, vals.wall_time};
  out.rows.push_back(row);
  row.kind = "excursion-return-probability-exact";
  row.value = f_exact;
  row.standard_error = 0.0;
  row.replicas = 0;
  out.rows.push_back(row);

  // First-return time against (1 - F)^2 2 d^{d/2} / (4 pi n)^{d/2}.
  for (int k : spec.sizes) {
    if (2 * k > horizon) continue;
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < vals.replicas; ++i) hits += vals.at(i, 1) == 2.0 * k;
    const double p = static_cast<double>(hits) / n;
    const double se = binomial_se(p, vals.replicas);
    const double asym = (1.0 - f_exact) * (1.0 - f_exact) * 2.0 * std::pow(d, d / 2.0) /
                        std::pow(4.0 * std::numbers::pi * k, d / 2.0);
    out.rows.push_back({"excursion-return-time", d, spec.alpha, spec.kappa, static_cast<double>(k), p, se,
                        vals.replicas, vals.wall_time});
    out.rows.push_back({"excursion-griffin-ratio", d, spec.alpha, spec.kappa, static_cast<double>(k), p / asym,
                        se / asym, vals.replicas, vals.wall_time});
  }

  // Range tail of the first excursion given a return. A walk still out at the
  // horizon returns later with probability w; its range then exceeds every
  // threshold its range at the horizon already exceeds, so thresholds are kept
  // well below the typical range at the horizon.
  const double top = horizon / 4.0;
  std::vector<FitPoint> pts;
  for (double xth = 2.0; xth <= top; xth *= 2.0) {
    MeanAccumulator acc;
    for (std::uint64_t i = 0; i < vals.replicas; ++i) acc.add(vals.at(i, 2) > xth ? vals.at(i, 3) : 0.0);
    const double p = acc.mean() / f_exact;
    const double se = acc.standard_error() / f_exact;
    out.rows.push_back({"excursion-range-tail", d, spec.alpha, spec.kappa, xth, p, se, vals.replicas, vals.wall_time});
    pts.push_back({xth, p, se});
  }
  // The four largest thresholds carry the asymptotic regime.
  if (pts.size() > 4) pts.erase(pts.begin(), pts.end() - 4);
  const double exponent = 1.0 - d / 2.0;
  std::erase_if(pts, [](const FitPoint& p) { return !(p.y > 0.0); });
  if (pts.size() >= 3) {
    out.fit = fit_log_log(pts);
    out.metadata["reference_slope"] = exponent;
    out.metadata["fit_min_threshold"] = pts.front().x;
    out.metadata["fit_max_threshold"] = pts.back().x;
  } else {
    out.notes.push_back("range-tail fit skipped: fewer than 3 positive thresholds below horizon/4");
  }
  const double dd = d;
  out.metadata["range_prefactor_reference"] = std::pow(dd, dd / 2.0) * std::pow(1.0 - f_exact, dd / 2.0 + 1.0) /
                                               ((dd / 2.0 - 1.0) * std::pow(2.0 * std::numbers::pi, dd / 2.0) * f_exact);
  out.metadata["green_origin"] = g00;
  out.metadata["horizon"] = horizon;
  out.streams = task_streams(runner);
  return out;
}

}  // namespace loopsoup
