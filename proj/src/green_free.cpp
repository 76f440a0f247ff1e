#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "loopsoup/green.hpp"
#include "loopsoup/simd/kernels.hpp"

namespace loopsoup {
namespace {

constexpr int kMaxFreeOffset = 1024;

// e^{-z} I_n(z) for n = 0..nmax by Miller's backward recurrence, normalized
// with e^{-z} (I_0 + 2 sum_{n>=1} I_n) = 1.
void scaled_bessel(double z, int nmax, double* out) {
  const int start = nmax + 30 + static_cast<int>(std::ceil(12.0 * std::sqrt(z)));
  double next = 0.0, cur = 1.0, sum = 0.0;
  std::fill(out, out + nmax + 1, 0.0);
  for (int k = start; k >= 0; --k) {
    if (k <= nmax) out[k] = cur;
    sum += (k == 0 ? 1.0 : 2.0) * cur;
    if (k == 0) break;
    const double prev = next + (2.0 * k / z) * cur;
    next = cur;
    cur = prev;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      sum *= 1e-250;
      for (int j = k; j <= nmax; ++j) out[j] *= 1e-250;
    }
  }
  for (int k = 0; k <= nmax; ++k) out[k] /= sum;
}

template <int N>
void append_panel(double a, double b, std::vector<double>& nodes, std::vector<double>& weights) {
  using rule = boost::math::quadrature::gauss<double, N>;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  const auto& x = rule::abscissa();
  const auto& w = rule::weights();
  for (std::size_t i = 0; i < x.size(); ++i) {
    nodes.push_back(mid - half * x[i]);
    weights.push_back(half * w[i]);
    nodes.push_back(mid + half * x[i]);
    weights.push_back(half * w[i]);
  }
}

}  // namespace

FreeLatticeGreen::FreeLatticeGreen(int dimension, int max_offset) : dim_(dimension), max_offset_(max_offset) {
  if (dimension < 3) throw ConfigError("free-lattice Green function needs d >= 3 (recurrent for d <= 2)");
  if (dimension > 64) throw ConfigError("free-lattice Green function supports d <= 64");
  if (max_offset < 0 || max_offset > kMaxFreeOffset) {
    throw GuardError("free-lattice Green offsets are limited to " + std::to_string(kMaxFreeOffset));
  }
  // The asymptotic tail series in 1/z is accurate once z >> sum_i (4 n_i^2 - 1) / 8.
  const double a_max = dimension * (4.0 * max_offset * max_offset) / 8.0;
  const double z_tail = std::max(1e5, 200.0 * a_max);
  int panels = 0;
  while (std::ldexp(1.0, panels) < z_tail * dimension) ++panels;
  tail_z_ = std::ldexp(1.0, panels) / dimension;

  std::vector<double> nodes;
  append_panel<30>(0.0, 1.0, nodes, weights_);
  for (int k = 0; k < panels; ++k) append_panel<30>(std::ldexp(1.0, k), std::ldexp(1.0, k + 1), nodes, weights_);

  const auto stride = static_cast<std::size_t>(max_offset + 1);
  table_.assign(nodes.size() * stride, 0.0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    scaled_bessel(nodes[i] / dimension, max_offset, &table_[i * stride]);
  }
}

double FreeLatticeGreen::at(std::span<const int> x) const {
  if (static_cast<int>(x.size()) != dim_) throw ConfigError("site has wrong dimension");
  const auto stride = static_cast<std::size_t>(max_offset_ + 1);
  for (int v : x) {
    if (std::abs(v) > max_offset_) throw GuardError("offset beyond the free Green table");
  }
  double value = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double* row = &table_[i * stride];
    double prod = weights_[i];
    for (int v : x) prod *= row[std::abs(v)];
    value += prod;
  }
  // int_T^inf prod_i e^{-z} I_{n_i}(z) dt with z = t/d, from
  // e^{-z} I_n(z) ~ (2 pi z)^{-1/2} (1 - a_n / z + c_n / z^2).
  double a = 0.0, b = 0.0, c = 0.0;
  for (int v : x) {
    const double mu = 4.0 * v * v;
    const double an = (mu - 1.0) / 8.0;
    const double cn = (mu - 1.0) * (mu - 9.0) / 128.0;
    b += a * an;
    a += an;
    c += cn;
  }
  b += c;
  const double h = 0.5 * dim_;
  const double z = tail_z_;
  const double tail = dim_ * std::pow(2.0 * std::numbers::pi, -h) *
                      (std::pow(z, 1.0 - h) / (h - 1.0) - a * std::pow(z, -h) / h + b * std::pow(z, -h - 1.0) / (h + 1.0));
  return value + tail;
}

double FreeLatticeGreen::operator()(const Site& x, const Site& y) const {
  if (x.size() != y.size()) throw ConfigError("sites of different dimension");
  std::vector<int> diff(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - y[i];
  return at(diff);
}

std::shared_ptr<const FreeLatticeGreen> free_green(int dimension, int max_offset) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const FreeLatticeGreen>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[dimension];
  if (!slot || slot->max_offset() < max_offset) {
    slot = std::make_shared<const FreeLatticeGreen>(dimension, std::max(max_offset, 16));
  }
  return slot;
}

double green_free_quadrature(int dimension, const Site& x) {
  if (dimension < 3) throw ConfigError("free-lattice Green function needs d >= 3");
  if (static_cast<int>(x.size()) != dimension) throw ConfigError("site has wrong dimension");
  int m = 0;
  for (int v : x) m = std::max(m, std::abs(v));
  return free_green(dimension, m)->at(x);
}

double green_asymptotic_constant(int dimension) {
  const double d = dimension;
  return d * std::tgamma(0.5 * d) / ((d - 2.0) * std::pow(std::numbers::pi, 0.5 * d));
}

double green_free_asymptotic(int dimension, const Site& x) {
  if (dimension < 3) throw ConfigError("free-lattice Green asymptotics need d >= 3");
  double r2 = 0.0;
  for (int v : x) r2 += static_cast<double>(v) * v;
  return green_asymptotic_constant(dimension) * std::pow(std::sqrt(r2) + 1.0, 2.0 - dimension);
}

namespace {

template <class Accumulate>
MomentEstimate fourier_mc(int dimension, std::uint64_t samples, RngStream& rng, Accumulate&& acc) {
  if (samples < 2) throw ConfigError("Monte Carlo estimate needs at least 2 samples");
  constexpr std::size_t kBatch = 4096;
  const auto d = static_cast<std::size_t>(dimension);
  std::vector<std::uint32_t> bits(2 * d * kBatch);
  std::vector<double> w(d * kBatch);
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t done = 0; done < samples;) {
    const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(kBatch, samples - done));
    rng.fill(std::span<std::uint32_t>(bits.data(), 2 * d * count));
    for (std::size_t i = 0; i < d * count; ++i) {
      const std::uint64_t u = bits[2 * i] | (static_cast<std::uint64_t>(bits[2 * i + 1]) << 32);
      w[i] = static_cast<double>(u >> 11) * 0x1.0p-52 - 1.0;
    }
    const simd::Moments m = acc(w.data(), count);
    sum += m.sum;
    sum_sq += m.sum_sq;
    done += count;
  }
  MomentEstimate e;
  e.dimension = dimension;
  e.samples = samples;
  const double n = static_cast<double>(samples);
  e.mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * e.mean * e.mean) / (n - 1.0));
  e.standard_error = std::sqrt(var / n);
  return e;
}

}  // namespace

MomentEstimate parseval_moment_mc(int dimension, std::uint64_t samples, RngStream& rng) {
  if (dimension < 5) throw ConfigError("sum_x G(0,x)^2 is finite only for d >= 5");
  const auto& k = simd::kernels();
  return fourier_mc(dimension, samples, rng, [&](const double* w, std::size_t count) {
    return k.parseval_accumulate(w, count, dimension);
  });
}

MomentEstimate green_free_mc(int dimension, const Site& x, std::uint64_t samples, RngStream& rng) {
  if (dimension < 5) throw ConfigError("Fourier Monte Carlo for G needs d >= 5 (finite variance)");
  if (static_cast<int>(x.size()) != dimension) throw ConfigError("site has wrong dimension");
  const auto& k = simd::kernels();
  return fourier_mc(dimension, samples, rng, [&](const double* w, std::size_t count) {
    return k.fourier_green_accumulate(w, count, dimension, x.data());
  });
}

}  // namespace loopsoup
