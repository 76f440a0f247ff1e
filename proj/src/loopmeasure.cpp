#include "loopsoup/loopmeasure.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <string>

namespace loopsoup {
namespace {

bool adjacent(const Site& a, const Site& b) {
  int l1 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) l1 += std::abs(a[i] - b[i]);
  return l1 == 1;
}

std::vector<Site> distinct_sites(const std::vector<Site>& set) {
  std::set<Site> s(set.begin(), set.end());
  return {s.begin(), s.end()};
}

Eigen::MatrixXd green_submatrix(const std::vector<Site>& f, const GreenFunction& green) {
  const auto n = static_cast<Eigen::Index>(f.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = green(f[i], f[j]);
  }
  return g;
}

double log_det_positive(const Eigen::MatrixXd& g) {
  if (g.rows() == 0) return 0.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(g);
  const Eigen::MatrixXd& u = lu.matrixLU();
  double log_det = 0.0;
  int sign = lu.permutationP().determinant();
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const double v = u(i, i);
    if (v == 0.0 || !std::isfinite(v)) throw RuntimeError("Green submatrix is singular");
    if (v < 0) sign = -sign;
    log_det += std::log(std::abs(v));
  }
  if (sign <= 0) throw RuntimeError("Green submatrix has a non-positive determinant; inconsistent Green inputs");
  return log_det;
}

}  // namespace

void validate_based_loop(const BasedLoop& loop) {
  const auto& s = loop.sites;
  if (s.size() < 2) throw ConfigError("a based loop needs at least 2 sites");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].size() != s[0].size() || s[i].empty()) throw ConfigError("based loop mixes dimensions");
    const Site& next = s[(i + 1) % s.size()];
    if (next.size() != s[i].size() || !adjacent(s[i], next)) {
      throw ConfigError("based loop has non-adjacent consecutive sites at position " + std::to_string(i));
    }
  }
}

Loop canonicalize(const BasedLoop& loop) {
  validate_based_loop(loop);
  Loop out;
  out.sites = loop.sites;
  out.multiplicity = canonicalize_in_place(out.sites);
  return out;
}

double loop_mass(std::size_t length, int multiplicity, int dimension, double kappa) {
  if (!(kappa > -1.0)) throw ConfigError("loop mass needs kappa > -1");
  if (multiplicity < 1 || length % static_cast<std::size_t>(multiplicity) != 0) {
    throw ConfigError("multiplicity must divide the loop length");
  }
  return std::pow(2.0 * dimension * (1.0 + kappa), -static_cast<double>(length)) / multiplicity;
}

double loop_mass(const Loop& loop, double kappa) {
  if (loop.sites.empty()) throw ConfigError("empty loop");
  return loop_mass(loop.length(), loop.multiplicity, static_cast<int>(loop.sites[0].size()), kappa);
}

double mu_hit_mass(const std::vector<Site>& set, const GreenFunction& green) {
  const auto f = distinct_sites(set);
  if (f.size() > 1000) throw GuardError("log det is limited to |F| <= 1000");
  return log_det_positive(green_submatrix(f, green));
}

double mu_visit_all(const std::vector<Site>& points, const GreenFunction& green) {
  const auto f = distinct_sites(points);
  if (f.size() > 20) throw GuardError("inclusion-exclusion is limited to 20 points");
  if (f.empty()) return 0.0;
  const Eigen::MatrixXd g = green_submatrix(f, green);
  const int k = static_cast<int>(f.size());
  double total = 0.0;
  for (std::uint32_t mask = 1; mask < (1U << k); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < k; ++i) {
      if (mask & (1U << i)) idx.push_back(i);
    }
    const auto n = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd sub(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) sub(a, b) = g(idx[a], idx[b]);
    }
    const double term = log_det_positive(sub);
    total += (idx.size() % 2 == 1) ? term : -term;
  }
  return total;
}

double prob_avoid(const std::vector<Site>& set, double alpha, const GreenFunction& green) {
  if (!(alpha > 0)) throw ConfigError("alpha must be > 0");
  return std::exp(-alpha * mu_hit_mass(set, green));
}

double cov_occupancy(const Site& x, const Site& y, double alpha, const GreenFunction& green) {
  if (!(alpha > 0)) throw ConfigError("alpha must be > 0");
  if (x == y) throw ConfigError("covariance of occupancy needs x != y");
  const double gxx = green(x, x), gyy = green(y, y), gxy = green(x, y), gyx = green(y, x);
  const double r = gxy * gyx / (gxx * gyy);
  return std::pow(gxx * gyy, -alpha) * (std::pow(1.0 - r, -alpha) - 1.0);
}

double p_single_loop_two_point(const Site& a, const Site& b, double alpha, const GreenFunction& green) {
  if (!(alpha > 0)) throw ConfigError("alpha must be > 0");
  if (a == b) throw ConfigError("two-point probability needs distinct points");
  const double gab = green(a, b);
  const double r = gab * gab / (green(a, a) * green(b, b));
  return 1.0 - std::pow(1.0 - r, alpha);
}

double p_single_loop_two_point(const Site& x, double alpha, const GreenFunction& green) {
  return p_single_loop_two_point(Site(x.size(), 0), x, alpha, green);
}

namespace {

struct Orbit {
  double ratio_sq;  // (G(0,x)/G(0,0))^2
  double count;     // number of lattice points in the symmetry orbit
};

// Orbits of the hyperoctahedral group on {0 < |x|_inf <= R}: sorted tuples
// 0 <= x_1 <= ... <= x_d <= R.
std::vector<Orbit> orbits(int d, int r) {
  auto g = free_green(d, r);
  std::vector<int> zero(d, 0);
  const double g00 = g->at(zero);
  std::vector<Orbit> out;
  std::vector<int> x(d, 0);
  std::vector<double> fact(d + 1, 1.0);
  for (int i = 1; i <= d; ++i) fact[i] = fact[i - 1] * i;
  while (true) {
    // advance to the next nondecreasing tuple
    int i = d - 1;
    while (i >= 0 && x[i] == r) --i;
    if (i < 0) break;
    const int v = x[i] + 1;
    for (int j = i; j < d; ++j) x[j] = v;
    double count = fact[d];
    int nonzero = 0;
    for (int a = 0; a < d;) {
      int b = a;
      while (b < d && x[b] == x[a]) ++b;
      count /= fact[b - a];
      if (x[a] != 0) nonzero += b - a;
      a = b;
    }
    count *= std::ldexp(1.0, nonzero);
    const double gx = g->at(x) / g00;
    out.push_back({gx * gx, count});
  }
  return out;
}

// sum over |x|_inf > R of (G(0,x)/G(0,0))^2 from G ~ c_d |x|^{2-d}, integrated
// outside the ball with the volume of [-R-1/2, R+1/2]^d.
double asymptotic_tail(int d, int r) {
  const double c = green_asymptotic_constant(d);
  const double vd = std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
  const double req = (2.0 * r + 1.0) / std::pow(vd, 1.0 / d);
  const double surface = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
  const double g00 = free_green(d, 0)->at(std::vector<int>(d, 0));
  return c * c * surface * std::pow(req, 4.0 - d) / (d - 4.0) / (g00 * g00);
}

double shell_sum(const std::vector<Orbit>& orb, double alpha) {
  double s = 0.0;
  for (const auto& o : orb) s += o.count * (1.0 - std::pow(1.0 - o.ratio_sq, alpha));
  return s;
}

// 1 - (1-u)^alpha <= alpha u / (1 - u) <= 1.01 alpha u for the tail values u < 0.0099.
double tail_factor(double alpha) { return 1.01 * alpha; }

void check_first_shell_args(int d, int r) {
  if (d <= 4) {
    throw ConfigError("E[#C(0,1)] diverges for d <= 4 (sum of G(0,x)^2 is infinite); d >= 5 required");
  }
  if (r < 1) throw ConfigError("truncation radius must be >= 1");
}

}  // namespace

FirstShellSum expected_first_shell(double alpha, int dimension, int truncation_radius) {
  check_first_shell_args(dimension, truncation_radius);
  if (!(alpha > 0)) throw ConfigError("alpha must be > 0");
  FirstShellSum s;
  s.truncation_radius = truncation_radius;
  s.tail_width = tail_factor(alpha) * asymptotic_tail(dimension, truncation_radius);
  s.value = shell_sum(orbits(dimension, truncation_radius), alpha) + s.tail_width;
  return s;
}

FirstShellSum relative_green_square_sum(int dimension, int truncation_radius) {
  check_first_shell_args(dimension, truncation_radius);
  FirstShellSum s;
  s.truncation_radius = truncation_radius;
  s.tail_width = asymptotic_tail(dimension, truncation_radius);
  double v = 0.0;
  for (const auto& o : orbits(dimension, truncation_radius)) v += o.count * o.ratio_sq;
  s.value = v + s.tail_width;
  return s;
}

double first_shell_threshold(int dimension, int truncation_radius) {
  check_first_shell_args(dimension, truncation_radius);
  const auto orb = orbits(dimension, truncation_radius);
  const double tail = asymptotic_tail(dimension, truncation_radius);
  auto f = [&](double a) { return shell_sum(orb, a) + tail_factor(a) * tail - 1.0; };
  double lo = 1e-6, hi = 1.0;
  while (f(hi) < 0) {
    hi *= 2;
    if (hi > 1e9) throw RuntimeError("first-shell threshold bisection failed to bracket");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace loopsoup
