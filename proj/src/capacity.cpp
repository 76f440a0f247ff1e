#include "loopsoup/capacity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

namespace loopsoup {
namespace {

// Membership bitmap over the bounding box of a site set.
class SiteSet {
 public:
  explicit SiteSet(const std::vector<Site>& set) {
    if (set.empty()) return;
    d_ = static_cast<int>(set.front().size());
    lo_.assign(d_, 0);
    hi_.assign(d_, 0);
    for (int i = 0; i < d_; ++i) {
      lo_[i] = hi_[i] = set.front()[i];
    }
    for (const Site& s : set) {
      if (static_cast<int>(s.size()) != d_) throw ConfigError("site set mixes dimensions");
      for (int i = 0; i < d_; ++i) {
        lo_[i] = std::min(lo_[i], s[i]);
        hi_[i] = std::max(hi_[i], s[i]);
      }
    }
    stride_.assign(d_, 1);
    std::size_t n = 1;
    for (int i = d_ - 1; i >= 0; --i) {
      stride_[i] = n;
      n *= static_cast<std::size_t>(hi_[i] - lo_[i] + 1);
      if (n > (std::size_t{1} << 32)) throw GuardError("site set bounding box is too large");
    }
    bits_.assign(n, 0);
    for (const Site& s : set) bits_[offset(s.data())] = 1;
  }

  bool contains(const int* x) const {
    if (bits_.empty()) return false;
    for (int i = 0; i < d_; ++i) {
      if (x[i] < lo_[i] || x[i] > hi_[i]) return false;
    }
    return bits_[offset(x)] != 0;
  }

 private:
  std::size_t offset(const int* x) const {
    std::size_t o = 0;
    for (int i = 0; i < d_; ++i) o += static_cast<std::size_t>(x[i] - lo_[i]) * stride_[i];
    return o;
  }

  int d_ = 0;
  std::vector<int> lo_, hi_;
  std::vector<std::size_t> stride_;
  std::vector<std::uint8_t> bits_;
};

// Returns (reached R1, reached R2) for one walk from x that stops on F.
std::pair<bool, bool> escape_walk(const Site& start, const SiteSet& set, int r1, int r2, RngStream& rng) {
  const int d = static_cast<int>(start.size());
  std::array<int, kMaxBoxDimension> x{};
  std::copy(start.begin(), start.end(), x.begin());
  const auto directions = static_cast<std::uint32_t>(2 * d);
  bool reached1 = false;
  for (std::uint64_t steps = 0; steps < kWalkStepCap; ++steps) {
    const std::uint32_t dir = rng.below(directions);
    x[dir >> 1] += (dir & 1U) ? 1 : -1;
    const int r = std::abs(x[dir >> 1]);
    if (r >= r1) {
      int m = 0;
      for (int i = 0; i < d; ++i) m = std::max(m, std::abs(x[i]));
      if (m >= r2) return {true, true};
      reached1 = true;
    }
    if (set.contains(x.data())) return {reached1, false};
  }
  throw RuntimeError("random walk exceeded the step cap of 1e9 steps");
}

}  // namespace

std::vector<Site> set_boundary(const std::vector<Site>& set) {
  SiteSet member(set);
  std::vector<Site> out;
  std::set<Site> seen;
  for (const Site& s : set) {
    if (!seen.insert(s).second) continue;
    Site y = s;
    bool inner = true;
    for (std::size_t i = 0; i < s.size() && inner; ++i) {
      for (int delta : {-1, 1}) {
        y[i] = s[i] + delta;
        if (!member.contains(y.data())) inner = false;
        y[i] = s[i];
      }
    }
    if (!inner) out.push_back(s);
  }
  return out;
}

CapacityEstimate capacity_mc(const std::vector<Site>& set, int dimension, const CapacityOptions& options,
                             RngStream& rng) {
  if (dimension < 3) throw ConfigError("capacity on Z^d needs d >= 3 (recurrent for d <= 2)");
  CapacityEstimate est;
  est.set = set;
  est.method = CapacityMethod::EscapeMC;
  if (set.empty()) return est;
  int radius = 0;
  for (const Site& s : set) {
    if (static_cast<int>(s.size()) != dimension) throw ConfigError("site has wrong dimension");
    radius = std::max(radius, sup_norm(s));
  }
  const int r1 = options.escape_radius > 0 ? options.escape_radius : std::max(4 * radius, 8);
  if (r1 < 2 * radius || r1 <= radius) throw ConfigError("escape radius must be at least 2 radius(F)");
  const int r2 = 2 * r1;
  const double q = std::pow(2.0, 2.0 - dimension);
  est.escape_radius = r1;

  SiteSet member(set);
  const std::vector<Site> bnd = set_boundary(set);
  auto walk_value = [&](const Site& x) {
    const auto [e1, e2] = escape_walk(x, member, r1, r2, rng);
    return ((e2 ? 1.0 : 0.0) - q * (e1 ? 1.0 : 0.0)) / (1.0 - q);
  };

  if (options.boundary_samples > 0) {
    MeanAccumulator acc;
    for (std::uint64_t k = 0; k < options.boundary_samples; ++k) {
      acc.add(walk_value(bnd[rng.below(static_cast<std::uint32_t>(bnd.size()))]));
    }
    const double scale = static_cast<double>(bnd.size());
    est.value = scale * acc.mean();
    est.standard_error = scale * acc.standard_error();
    est.walks = acc.count();
  } else {
    if (options.walkers < 2) throw ConfigError("capacity needs at least 2 walkers per boundary site");
    double var_sum = 0.0;
    for (const Site& x : bnd) {
      MeanAccumulator acc;
      for (std::uint64_t k = 0; k < options.walkers; ++k) acc.add(walk_value(x));
      est.value += acc.mean();
      var_sum += acc.standard_error() * acc.standard_error();
      est.walks += acc.count();
    }
    est.standard_error = std::sqrt(var_sum);
  }
  return est;
}

CapacityEstimate capacity_exact(const std::vector<Site>& set, const GreenTable& ambient) {
  CapacityEstimate est;
  est.set = set;
  est.method = CapacityMethod::ExactSolve;
  std::set<Site> distinct(set.begin(), set.end());
  std::vector<Site> f(distinct.begin(), distinct.end());
  if (f.empty()) return est;
  if (f.size() > 1000) throw GuardError("exact capacity is limited to 1000 sites");
  const auto n = static_cast<Eigen::Index>(f.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = ambient(f[i], f[j]);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) throw RuntimeError("Green submatrix is not positive definite");
  const Eigen::VectorXd e = llt.solve(Eigen::VectorXd::Ones(n));
  est.value = e.sum();
  return est;
}

double range_capacity_scale(int dimension, int n) {
  if (dimension == 3) return n;
  if (dimension == 4) return n >= 2 ? static_cast<double>(n) * n / std::log(static_cast<double>(n)) : 1.0;
  return static_cast<double>(n) * n;
}

RangeCapacityResult range_capacity_experiment(int dimension, const std::vector<int>& radii, std::uint64_t paths,
                                              const CapacityOptions& options, double c, RngStream& rng) {
  if (dimension < 3) throw ConfigError("range capacity needs d >= 3");
  if (paths < 2) throw ConfigError("range capacity needs at least 2 paths per radius");
  RangeCapacityResult result;
  std::vector<FitPoint> points;
  for (int n : radii) {
    if (n < 1) throw ConfigError("range radius must be >= 1");
    const auto t0 = std::chrono::steady_clock::now();
    const LatticeSpec spec{dimension, n, 0.0};
    std::vector<double> caps;
    std::uint64_t exceed = 0;
    for (std::uint64_t p = 0; p < paths; ++p) {
      RngStream walk_rng = rng.child(derive_stream(static_cast<std::uint64_t>(n), 2 * p));
      RngStream cap_rng = rng.child(derive_stream(static_cast<std::uint64_t>(n), 2 * p + 1));
      Path path = walk_until_killed(Site(dimension, 0), [](const Site&) { return false; }, spec, walk_rng);
      path.sites.pop_back();  // the exterior site where the walk stopped
      std::set<Site> range(path.sites.begin(), path.sites.end());
      CapacityOptions opt = options;
      if (opt.escape_radius > 0) opt.escape_radius = std::max(opt.escape_radius, 2 * n);
      const double cap = capacity_mc({range.begin(), range.end()}, dimension, opt, cap_rng).value;
      caps.push_back(cap);
      if (cap > c * range_capacity_scale(dimension, n)) ++exceed;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::sort(caps.begin(), caps.end());
    const double median = caps[caps.size() / 2];
    // Order-statistics interval for the median: ranks N/2 -+ sqrt(N)/2 span one standard error.
    const auto half = static_cast<std::size_t>(std::ceil(0.5 * std::sqrt(static_cast<double>(caps.size()))));
    const std::size_t lo = caps.size() / 2 >= half ? caps.size() / 2 - half : 0;
    const std::size_t hi = std::min(caps.size() - 1, caps.size() / 2 + half);
    const double median_se = 0.5 * (caps[hi] - caps[lo]);
    result.rows.push_back({"range-capacity-median", dimension, 0.0, 0.0, static_cast<double>(n), median, median_se,
                           paths, wall});
    const double p = static_cast<double>(exceed) / static_cast<double>(paths);
    result.rows.push_back({"range-capacity-exceed", dimension, 0.0, 0.0, static_cast<double>(n), p,
                           binomial_se(p, paths), paths, wall});
    points.push_back({static_cast<double>(n), median, median_se});
  }
  if (points.size() >= 3) result.median_fit = fit_log_log(points);
  return result;
}

}  // namespace loopsoup
