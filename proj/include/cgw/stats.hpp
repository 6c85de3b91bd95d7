#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace cgw {

struct GofResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int dof = 0;  // chi-square only
  std::size_t n = 0;
};

/// One-sample Kolmogorov-Smirnov test with the asymptotic p-value.
GofResult ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Kolmogorov survival function Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} e^{-2 j^2 lambda^2}.
double kolmogorov_tail(double lambda);

struct GeometricFit {
  double p_hat;
  double standard_error;
};

/// MLE for the geometric law on {0, 1, 2, ...} with success probability p.
GeometricFit geometric_fit(std::span<const std::int64_t> samples);

/// Pearson chi-square against category probabilities. Every expected count
/// must be at least 5 (see pool_categories).
GofResult chi_square_gof(std::span<const double> observed, std::span<const double> expected_probs);

struct PooledCategories {
  std::vector<double> observed;
  std::vector<double> probabilities;
};

/// Merges categories from the last one inward until every bucket's expected
/// count reaches min_expected. A short remainder joins the last full bucket.
PooledCategories pool_categories(std::span<const double> observed,
                                 std::span<const double> expected_probs,
                                 double min_expected = 5.0);

/// Regularized upper incomplete gamma Q(a, x).
double regularized_gamma_q(double a, double x);

/// P(chi2_dof >= x).
double chi_square_survival(double x, int dof);

/// Welford accumulator, mergeable with Chan's update.
class RunningMoments {
 public:
  void add(double x);
  void merge(const RunningMoments& other);

  std::size_t count() const { return count_; }
  double mean() const { return mean_; }
  /// Sample variance (n - 1 denominator). Throws TooFewSamples when n < 2.
  double variance() const;
  double standard_error() const;
  /// 1.96 s / sqrt(n); infinite when n < 2.
  double ci_half_width() const;

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace cgw
