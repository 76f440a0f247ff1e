#pragma once

#include <cstdint>
#include <vector>

#include "loopsoup/green.hpp"
#include "loopsoup/lattice.hpp"
#include "loopsoup/rng.hpp"
#include "loopsoup/stats.hpp"

namespace loopsoup {

enum class CapacityMethod { EscapeMC, ExactSolve };

struct CapacityEstimate {
  std::vector<Site> set;
  double value = 0.0;
  double standard_error = 0.0;
  CapacityMethod method = CapacityMethod::EscapeMC;
  int escape_radius = 0;  // R1 of the two-radius extrapolation (EscapeMC only)
  std::uint64_t walks = 0;
};

struct CapacityOptions {
  /// Inner escape radius R1 (sup norm); 0 selects max(4 radius(F), 8).
  /// Walks are followed to 2 R1 and both radii are extrapolated in R^{2-d}.
  int escape_radius = 0;
  /// Walks per boundary site when every boundary site is used.
  std::uint64_t walkers = 1000;
  /// When nonzero, this many walks start from boundary sites drawn uniformly
  /// (with replacement) instead; the sum is rescaled by |boundary|.
  std::uint64_t boundary_samples = 0;
};

/// Sites of F with at least one lattice neighbor outside F.
std::vector<Site> set_boundary(const std::vector<Site>& set);

/// Escape-probability Monte Carlo for Cap(F) on Z^d, d >= 3. Each walk from a
/// boundary site records whether it reaches sup norm R1 and 2 R1 before
/// returning to F; the per-walk value (1{2R1} - q 1{R1}) / (1 - q) with
/// q = 2^{2-d} removes the leading R^{2-d} bias of escape-to-R.
CapacityEstimate capacity_mc(const std::vector<Site>& set, int dimension, const CapacityOptions& options,
                             RngStream& rng);

/// Exact capacity relative to the killed box chain of `ambient`: the equilibrium
/// measure e solves G_B|_{FxF} e = 1 and Cap = sum e.
CapacityEstimate capacity_exact(const std::vector<Site>& set, const GreenTable& ambient);

/// Capacity of the range of a walk from 0 stopped at the exterior of B(0, n),
/// for each n: median (with an order-statistics standard error) and the
/// fraction of paths with Cap(range) > c F(d, n), F(d,n) = n, n^2/log n, n^2
/// for d = 3, 4, >= 5.
struct RangeCapacityResult {
  std::vector<EstimateRow> rows;
  SlopeFit median_fit;
};
RangeCapacityResult range_capacity_experiment(int dimension, const std::vector<int>& radii, std::uint64_t paths,
                                              const CapacityOptions& options, double c, RngStream& rng);

double range_capacity_scale(int dimension, int n);

}  // namespace loopsoup
