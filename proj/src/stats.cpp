#include "cgw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cgw/error.hpp"

namespace cgw {

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  const double a = -2.0 * lambda * lambda;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(a * j * j);
    sum += sign * term;
    if (term < 1e-12) return std::clamp(2.0 * sum, 0.0, 1.0);
    sign = -sign;
  }
  // The alternating series has not settled: lambda is tiny and Q is 1.
  return 1.0;
}

GofResult ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw Error(ErrorCode::EmptySample, "KS test needs samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  // Each run of equal values is one jump of the empirical cdf.
  for (std::size_t first = 0; first < sorted.size();) {
    const double x = sorted[first];
    if (!std::isfinite(x)) throw Error(ErrorCode::InvalidInput, "non-finite sample");
    std::size_t last = first;
    while (last < sorted.size() && sorted[last] == x) ++last;
    const double f = cdf(x);
    d = std::max({d, static_cast<double>(last) / n - f, f - static_cast<double>(first) / n});
    first = last;
  }
  GofResult result;
  result.statistic = d;
  result.n = sorted.size();
  result.p_value = kolmogorov_tail(std::sqrt(n) * d);
  return result;
}

GeometricFit geometric_fit(std::span<const std::int64_t> samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptySample, "geometric fit needs samples");
  double total = 0.0;
  for (auto x : samples) {
    if (x < 0) throw Error(ErrorCode::InvalidInput, "geometric samples must be non-negative");
    total += static_cast<double>(x);
  }
  const auto n = static_cast<double>(samples.size());
  const double p = n / (n + total);
  return {p, p * std::sqrt((1.0 - p) / n)};
}

PooledCategories pool_categories(std::span<const double> observed,
                                 std::span<const double> expected_probs, double min_expected) {
  if (observed.size() != expected_probs.size())
    throw Error(ErrorCode::InvalidInput, "observed and expected sizes differ");
  double n = 0.0;
  for (double o : observed) n += o;
  PooledCategories pooled;
  double obs_acc = 0.0;
  double prob_acc = 0.0;
  for (std::size_t i = observed.size(); i-- > 0;) {
    obs_acc += observed[i];
    prob_acc += expected_probs[i];
    if (prob_acc * n >= min_expected) {
      pooled.observed.push_back(obs_acc);
      pooled.probabilities.push_back(prob_acc);
      obs_acc = 0.0;
      prob_acc = 0.0;
    }
  }
  if (obs_acc > 0.0 || prob_acc > 0.0) {
    if (pooled.observed.empty()) {
      pooled.observed.push_back(obs_acc);
      pooled.probabilities.push_back(prob_acc);
    } else {
      pooled.observed.back() += obs_acc;
      pooled.probabilities.back() += prob_acc;
    }
  }
  std::reverse(pooled.observed.begin(), pooled.observed.end());
  std::reverse(pooled.probabilities.begin(), pooled.probabilities.end());
  return pooled;
}

GofResult chi_square_gof(std::span<const double> observed, std::span<const double> expected_probs) {
  if (observed.size() != expected_probs.size())
    throw Error(ErrorCode::InvalidInput, "observed and expected sizes differ");
  if (observed.size() < 2) throw Error(ErrorCode::TooFewCategories, "need at least 2 categories");
  double n = 0.0;
  double prob_total = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    n += observed[i];
    prob_total += expected_probs[i];
  }
  GofResult result;
  result.n = static_cast<std::size_t>(n);
  result.dof = static_cast<int>(observed.size()) - 1;
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = n * expected_probs[i] / prob_total;
    if (expected < 5.0)
      throw Error(ErrorCode::UnderpooledExpectation,
                  "category " + std::to_string(i) + " expects " + std::to_string(expected));
    const double diff = observed[i] - expected;
    stat += diff * diff / expected;
  }
  result.statistic = stat;
  result.p_value = chi_square_survival(stat, result.dof);
  return result;
}

namespace {

// P(a, x) by its power series; converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by Lentz's continued fraction; for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw Error(ErrorCode::OutOfRange, "gamma Q needs a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return std::clamp(1.0 - gamma_p_series(a, x), 0.0, 1.0);
  return std::clamp(gamma_q_fraction(a, x), 0.0, 1.0);
}

double chi_square_survival(double x, int dof) {
  if (dof < 1) throw Error(ErrorCode::OutOfRange, "chi-square needs dof >= 1");
  if (x <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * dof, 0.5 * x);
}

void RunningMoments::add(double x) {
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
}

void RunningMoments::merge(const RunningMoments& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const auto na = static_cast<double>(count_);
  const auto nb = static_cast<double>(other.count_);
  const double total = na + nb;
  const double delta = other.mean_ - mean_;
  mean_ += delta * nb / total;
  m2_ += other.m2_ + delta * delta * na * nb / total;
  count_ += other.count_;
}

double RunningMoments::variance() const {
  if (count_ < 2) throw Error(ErrorCode::TooFewSamples, "variance needs at least 2 values");
  return m2_ / static_cast<double>(count_ - 1);
}

double RunningMoments::standard_error() const {
  if (count_ < 2) return std::numeric_limits<double>::infinity();
  return std::sqrt(variance() / static_cast<double>(count_));
}

double RunningMoments::ci_half_width() const {
  return 1.96 * standard_error();
}

}  // namespace cgw
