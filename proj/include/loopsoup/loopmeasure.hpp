#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "loopsoup/green.hpp"
#include "loopsoup/lattice.hpp"

namespace loopsoup {

/// (x_1, ..., x_n), n >= 2, consecutive sites adjacent and x_n adjacent to x_1.
struct BasedLoop {
  std::vector<Site> sites;
};

/// Rotation class of a based loop, represented by its lexicographically least rotation.
struct Loop {
  std::vector<Site> sites;
  int multiplicity = 1;
  std::size_t length() const { return sites.size(); }
  friend bool operator==(const Loop&, const Loop&) = default;
  friend auto operator<=>(const Loop&, const Loop&) = default;
};

/// Start of the lexicographically least rotation (Booth's algorithm).
template <class T>
std::size_t least_rotation(std::span<const T> s) {
  const std::size_t n = s.size();
  if (n == 0) return 0;
  std::vector<std::ptrdiff_t> f(2 * n, -1);
  std::size_t k = 0;
  for (std::size_t j = 1; j < 2 * n; ++j) {
    const T& sj = s[j % n];
    std::ptrdiff_t i = f[j - k - 1];
    while (i != -1 && !(sj == s[(k + i + 1) % n])) {
      if (sj < s[(k + i + 1) % n]) k = j - i - 1;
      i = f[i];
    }
    if (i == -1 && !(sj == s[(k + i + 1) % n])) {
      if (sj < s[(k + i + 1) % n]) k = j;
      f[j - k] = -1;
    } else {
      f[j - k] = i + 1;
    }
  }
  return k;
}

/// Largest m such that s is an m-fold repetition of a block.
template <class T>
int repetition_count(std::span<const T> s) {
  const std::size_t n = s.size();
  if (n == 0) return 1;
  std::vector<std::size_t> fail(n + 1, 0);
  for (std::size_t i = 1, k = 0; i < n; ++i) {
    while (k > 0 && !(s[i] == s[k])) k = fail[k];
    if (s[i] == s[k]) ++k;
    fail[i + 1] = k;
  }
  const std::size_t period = n - fail[n];
  return n % period == 0 ? static_cast<int>(n / period) : 1;
}

/// Rotates `s` in place to its least rotation and returns the multiplicity.
template <class T>
int canonicalize_in_place(std::vector<T>& s) {
  const std::size_t k = least_rotation(std::span<const T>(s));
  std::rotate(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k), s.end());
  return repetition_count(std::span<const T>(s));
}

/// Throws ConfigError for a malformed based loop.
void validate_based_loop(const BasedLoop& loop);

Loop canonicalize(const BasedLoop& loop);

/// mu_kappa(l) = (1/m) (2d(1+kappa))^{-n}.
double loop_mass(std::size_t length, int multiplicity, int dimension, double kappa);
double loop_mass(const Loop& loop, double kappa);

/// log det(G|_{FxF}): the mass of loops visiting F. |F| <= 1000.
double mu_hit_mass(const std::vector<Site>& set, const GreenFunction& green);

/// Mass of loops visiting every point, by inclusion-exclusion over log det of
/// the principal submatrices. At most 20 points.
double mu_visit_all(const std::vector<Site>& points, const GreenFunction& green);

/// P[no loop of the soup hits F] = det(G|_{FxF})^{-alpha}.
double prob_avoid(const std::vector<Site>& set, double alpha, const GreenFunction& green);

/// Cov(1{x covered}, 1{y covered}) = (G_xx G_yy)^{-alpha} ((1 - G_xy^2/(G_xx G_yy))^{-alpha} - 1).
double cov_occupancy(const Site& x, const Site& y, double alpha, const GreenFunction& green);

/// Probability that some loop visits both a and b: 1 - (1 - G_ab^2 / (G_aa G_bb))^alpha.
double p_single_loop_two_point(const Site& a, const Site& b, double alpha, const GreenFunction& green);
/// Same with a = 0.
double p_single_loop_two_point(const Site& x, double alpha, const GreenFunction& green);

struct FirstShellSum {
  double value = 0.0;       // lattice sum over 0 < |x|_inf <= R plus the tail estimate
  double tail_width = 0.0;  // the tail estimate itself, taken as the uncertainty
  int truncation_radius = 0;
};

/// E[#C_alpha(0,1)] = sum_{x != 0} 1 - (1 - (G(0,x)/G(0,0))^2)^alpha on Z^d, d >= 5.
/// The sum beyond |x|_inf = R uses the asymptotic Green function.
FirstShellSum expected_first_shell(double alpha, int dimension, int truncation_radius);

/// sum_{x != 0} (G(0,x)/G(0,0))^2 with the same truncation.
FirstShellSum relative_green_square_sum(int dimension, int truncation_radius);

/// Threshold proxy: the alpha with expected_first_shell(alpha) = 1 (bisection).
double first_shell_threshold(int dimension, int truncation_radius);

struct EnumeratedLoop {
  Loop loop;
  double mass = 0.0;
};

struct Enumeration {
  std::vector<EnumeratedLoop> loops;  // sorted by decreasing mass, then canonical order
  double total_mass = 0.0;
  /// log det G_B on the active sites (the mass of all loops in the box).
  double log_det = 0.0;
  /// sum_{n <= Lmax} Tr(P^n) / n: the exact mass of loops of length <= Lmax.
  double trace_sum = 0.0;
  /// Largest eigenvalue of the killed transition matrix P.
  double spectral_radius = 0.0;
  /// Bound on the mass of longer loops: |active| rho^{L+1} / ((L+1)(1 - rho)).
  double tail_bound = 0.0;
};

/// All loops of length <= max_length inside the box avoiding `killed`, with
/// exact masses. Guards: (2M+1)^d <= 64, max_length <= 14.
Enumeration enumerate_loops(const LatticeSpec& spec, const std::vector<Site>& killed, int max_length);

}  // namespace loopsoup
