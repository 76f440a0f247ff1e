#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace loopsoup {

/// One experiment output record; serialized with the fixed CSV header
/// kind,d,alpha,kappa,n,value,stderr,replicas,walltime_s.
struct EstimateRow {
  std::string kind;
  int dimension = 0;
  double alpha = 0.0;
  double kappa = 0.0;
  double n = 0.0;
  double value = 0.0;
  double standard_error = 0.0;
  std::uint64_t replicas = 0;
  double wall_time = 0.0;
};

struct SlopeFit {
  double slope = 0.0;
  double slope_se = 0.0;
  double intercept = 0.0;
  int points_used = 0;
  std::vector<double> excluded;  // x values dropped by the caller's policy
};

struct FitPoint {
  double x = 0.0;
  double y = 0.0;
  double se = 0.0;
};

/// Weighted least squares of log y on log x with weights 1 / (se / y)^2.
/// Points without an error estimate (se == 0 for all) are fitted unweighted.
/// Throws ConfigError for fewer than 3 points or a non-positive value.
SlopeFit fit_log_log(const std::vector<FitPoint>& points);

/// Same with y on a linear axis against log-linear data: fits log y on x.
SlopeFit fit_log_linear(const std::vector<FitPoint>& points);

/// Drops the smallest-x point when its relative standard error exceeds 20%.
std::vector<FitPoint> drop_noisy_smallest(std::vector<FitPoint> points, std::vector<double>* dropped);

inline double binomial_se(double p, std::uint64_t n) {
  return n == 0 ? 0.0 : std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

/// Running mean and standard error (sample standard deviation / sqrt(N)).
class MeanAccumulator {
 public:
  void add(double v) {
    ++n_;
    sum_ += v;
    sum_sq_ += v * v;
  }
  void merge(const MeanAccumulator& o) {
    n_ += o.n_;
    sum_ += o.sum_;
    sum_sq_ += o.sum_sq_;
  }
  std::uint64_t count() const { return n_; }
  double sum() const { return sum_; }
  double sum_sq() const { return sum_sq_; }
  double mean() const { return n_ ? sum_ / static_cast<double>(n_) : 0.0; }
  double standard_error() const;

 private:
  std::uint64_t n_ = 0;
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
};

/// Chi-square goodness-of-fit p-value for observed counts against expected
/// probabilities; bins with expected count < 5 are pooled into their neighbor.
double chi_square_p_value(const std::vector<double>& observed, const std::vector<double>& expected_prob,
                          int* degrees_of_freedom = nullptr, double* statistic = nullptr);

/// Two-sample chi-square homogeneity test p-value on count histograms.
double chi_square_homogeneity_p_value(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace loopsoup
