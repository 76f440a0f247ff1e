#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "loopsoup/lattice.hpp"
#include "loopsoup/rng.hpp"

namespace loopsoup {

enum class GreenMethod { ExactSolve, FreeQuadrature, FreeAsymptotic };

/// G(x, y): expected number of visits to y of the walk started at x.
class GreenFunction {
 public:
  virtual ~GreenFunction() = default;
  virtual int dimension() const = 0;
  virtual GreenMethod method() const = 0;
  virtual double operator()(const Site& x, const Site& y) const = 0;
};

struct SolverStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Green function of the box chain killed on exit, on a killed set and by the
/// per-step kappa killing: the solution of (I - Q_killed / (1 + kappa)) g = e_y.
/// Columns are solved lazily by conjugate gradients and cached.
class GreenTable final : public GreenFunction {
 public:
  static constexpr double kTolerance = 1e-12;

  explicit GreenTable(const LatticeSpec& spec, const std::vector<Site>& killed = {});

  int dimension() const override { return box_.dimension(); }
  GreenMethod method() const override { return GreenMethod::ExactSolve; }
  double operator()(const Site& x, const Site& y) const override;

  const Box& box() const { return box_; }
  bool killed(SiteIndex i) const { return killed_[i] != 0; }
  std::size_t active_count() const { return active_; }

  /// G(., y) over box indices; killed sites hold 0.
  const std::vector<double>& column(const Site& y) const;
  const std::vector<double>& column(SiteIndex y) const;
  SolverStats stats(SiteIndex y) const;

 private:
  Box box_;
  std::vector<std::uint8_t> killed_;
  std::size_t active_ = 0;
  mutable std::mutex mutex_;
  mutable std::map<SiteIndex, std::pair<std::vector<double>, SolverStats>> columns_;
};

/// One column of the killed box Green function (uncached).
std::vector<double> green_column(const LatticeSpec& spec, const std::vector<Site>& killed,
                                 const Site& y, SolverStats* stats = nullptr);

/// Dense inverse of I - P on the active sites, for boxes with at most 4096 of
/// them. Used as the validation oracle for the iterative solver.
struct DenseGreen {
  std::vector<SiteIndex> active;  // box index of each row/column
  Eigen::MatrixXd transition;     // P = Q_killed / (1 + kappa) on the active sites
  Eigen::MatrixXd green;
};
DenseGreen dense_green(const LatticeSpec& spec, const std::vector<Site>& killed = {});

/// Free-lattice Green function G(0, x) on Z^d, d >= 3, from the heat-kernel
/// representation G(0, x) = int_0^inf prod_i e^{-t/d} I_{x_i}(t/d) dt evaluated
/// by panelled Gauss-Legendre quadrature with an analytic large-t tail.
class FreeLatticeGreen final : public GreenFunction {
 public:
  /// Supports offsets with |x_i| <= max_offset.
  FreeLatticeGreen(int dimension, int max_offset);

  int dimension() const override { return dim_; }
  GreenMethod method() const override { return GreenMethod::FreeQuadrature; }
  double operator()(const Site& x, const Site& y) const override;
  double at(std::span<const int> x) const;
  int max_offset() const { return max_offset_; }

 private:
  int dim_;
  int max_offset_;
  std::vector<double> weights_;  // quadrature weight per node
  std::vector<double> table_;    // e^{-z} I_n(z) per node, n = 0..max_offset
  double tail_z_ = 0.0;
};

/// Shared instance for dimension d covering at least |x_i| <= max_offset.
std::shared_ptr<const FreeLatticeGreen> free_green(int dimension, int max_offset = 16);

/// G_{Z^d}(0, x) by quadrature; d < 3 rejected.
double green_free_quadrature(int dimension, const Site& x);

/// Leading-order term d Gamma(d/2) / ((d-2) pi^{d/2}) (|x|_2 + 1)^{2-d}.
double green_free_asymptotic(int dimension, const Site& x);

/// Prefactor d Gamma(d/2) / ((d-2) pi^{d/2}).
double green_asymptotic_constant(int dimension);

struct MomentEstimate {
  int dimension = 0;
  std::uint64_t samples = 0;
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Monte Carlo estimate of sum_x G(0,x)^2 = E[(1 - Z_d)^-2] with
/// Z_d = (1/d) sum_i cos(U_i), U_i uniform on (-pi, pi). Requires d >= 5.
MomentEstimate parseval_moment_mc(int dimension, std::uint64_t samples, RngStream& rng);

/// Monte Carlo Fourier integral for G(0, x) = E[prod_i cos(U_i x_i) / (1 - Z_d)], d >= 5.
MomentEstimate green_free_mc(int dimension, const Site& x, std::uint64_t samples, RngStream& rng);

}  // namespace loopsoup
