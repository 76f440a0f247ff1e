#include "loopsoup/distributions.hpp"

#include <cmath>
#include <limits>

#include "loopsoup/error.hpp"

namespace loopsoup {

namespace {

std::uint64_t poisson_inversion(RngStream& rng, double mean) {
  const double u = rng.uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  while (u >= cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
    // cdf can stall just below u through rounding; the remaining mass is < 1e-300.
    if (p < 1e-300 && k > mean) break;
  }
  return k;
}

}  // namespace

std::uint64_t sample_poisson(RngStream& rng, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw ConfigError("poisson mean must be finite and >= 0");
  if (mean == 0.0) return 0;
  constexpr double kPiece = 8.0;
  std::uint64_t total = 0;
  while (mean > kPiece) {
    total += poisson_inversion(rng, kPiece);
    mean -= kPiece;
  }
  return total + poisson_inversion(rng, mean);
}

std::uint64_t sample_discrete_pareto(RngStream& rng, double a) {
  const double y = std::floor(std::pow(rng.uniform_pos(), -1.0 / a));
  if (y >= static_cast<double>(std::numeric_limits<std::uint64_t>::max() / 2)) {
    return std::numeric_limits<std::uint64_t>::max() / 2;
  }
  return static_cast<std::uint64_t>(y);
}

}  // namespace loopsoup
