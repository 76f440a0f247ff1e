#pragma once

#include <cstdint>

#include "loopsoup/rng.hpp"

namespace loopsoup {

/// Poisson variate by sequential inversion. Means above 8 are split into a sum
/// of independent pieces, so the cost is linear in the mean and the output is
/// reproducible on every platform (unlike std::poisson_distribution).
std::uint64_t sample_poisson(RngStream& rng, double mean);

/// Discrete Pareto variate with P[Y >= k] = k^-a for k >= 1.
std::uint64_t sample_discrete_pareto(RngStream& rng, double a);

}  // namespace loopsoup
