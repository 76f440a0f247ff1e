#include "loopsoup/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "loopsoup/error.hpp"

namespace loopsoup {
namespace {

SlopeFit weighted_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w,
                       bool known_variance) {
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0)) throw ConfigError("slope fit needs at least two distinct x values");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.points_used = static_cast<int>(x.size());
  if (known_variance) {
    f.slope_se = std::sqrt(1.0 / sxx);
  } else {
    double rss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += w[i] * r * r;
    }
    f.slope_se = x.size() > 2 ? std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx) : 0.0;
  }
  return f;
}

SlopeFit fit_log_y(const std::vector<FitPoint>& points, bool log_x) {
  if (points.size() < 3) throw ConfigError("slope fit needs at least 3 points");
  bool all_have_se = true;
  for (const auto& p : points) {
    if (!(p.y > 0)) throw ConfigError("slope fit refuses a non-positive value");
    if (log_x && !(p.x > 0)) throw ConfigError("log-log fit refuses a non-positive abscissa");
    if (!(p.se > 0)) all_have_se = false;
  }
  std::vector<double> x, y, w;
  for (const auto& p : points) {
    x.push_back(log_x ? std::log(p.x) : p.x);
    y.push_back(std::log(p.y));
    const double rel = p.se / p.y;
    w.push_back(all_have_se ? 1.0 / (rel * rel) : 1.0);
  }
  return weighted_line(x, y, w, all_have_se);
}

}  // namespace

SlopeFit fit_log_log(const std::vector<FitPoint>& points) { return fit_log_y(points, true); }

SlopeFit fit_log_linear(const std::vector<FitPoint>& points) { return fit_log_y(points, false); }

std::vector<FitPoint> drop_noisy_smallest(std::vector<FitPoint> points, std::vector<double>* dropped) {
  if (points.empty()) return points;
  auto smallest = std::min_element(points.begin(), points.end(),
                                   [](const FitPoint& a, const FitPoint& b) { return a.x < b.x; });
  if (smallest->y > 0 && smallest->se / smallest->y > 0.2) {
    if (dropped) dropped->push_back(smallest->x);
    points.erase(smallest);
  }
  return points;
}

double MeanAccumulator::standard_error() const {
  if (n_ < 2) return 0.0;
  const double n = static_cast<double>(n_);
  const double m = sum_ / n;
  const double var = std::max(0.0, (sum_sq_ - n * m * m) / (n - 1.0));
  return std::sqrt(var / n);
}

double chi_square_p_value(const std::vector<double>& observed, const std::vector<double>& expected_prob,
                          int* degrees_of_freedom, double* statistic) {
  if (observed.size() != expected_prob.size()) throw ConfigError("chi-square: size mismatch");
  double total = 0;
  for (double o : observed) total += o;
  std::vector<double> obs, exp;
  double po = 0, pe = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    po += observed[i];
    pe += expected_prob[i] * total;
    if (pe >= 5.0) {
      obs.push_back(po);
      exp.push_back(pe);
      po = pe = 0;
    }
  }
  if (po > 0 || pe > 0) {
    if (exp.empty()) {
      obs.push_back(po);
      exp.push_back(pe);
    } else {
      obs.back() += po;
      exp.back() += pe;
    }
  }
  double stat = 0;
  for (std::size_t i = 0; i < obs.size(); ++i) stat += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
  const int dof = static_cast<int>(obs.size()) - 1;
  if (degrees_of_freedom) *degrees_of_freedom = dof;
  if (statistic) *statistic = stat;
  if (dof < 1) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * stat);
}

double chi_square_homogeneity_p_value(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t k = std::max(a.size(), b.size());
  double na = 0, nb = 0;
  for (double v : a) na += v;
  for (double v : b) nb += v;
  if (!(na > 0) || !(nb > 0)) throw ConfigError("homogeneity test needs two nonempty samples");
  std::vector<double> ca, cb;
  double pa = 0, pb = 0;
  const double fa = na / (na + nb), fb = nb / (na + nb);
  for (std::size_t i = 0; i < k; ++i) {
    pa += i < a.size() ? a[i] : 0.0;
    pb += i < b.size() ? b[i] : 0.0;
    if (std::min(fa, fb) * (pa + pb) >= 5.0) {
      ca.push_back(pa);
      cb.push_back(pb);
      pa = pb = 0;
    }
  }
  if (pa + pb > 0) {
    if (ca.empty()) {
      ca.push_back(pa);
      cb.push_back(pb);
    } else {
      ca.back() += pa;
      cb.back() += pb;
    }
  }
  double stat = 0;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    const double col = ca[i] + cb[i];
    const double ea = col * fa, eb = col * fb;
    stat += (ca[i] - ea) * (ca[i] - ea) / ea + (cb[i] - eb) * (cb[i] - eb) / eb;
  }
  const int dof = static_cast<int>(ca.size()) - 1;
  if (dof < 1) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * stat);
}

}  // namespace loopsoup
