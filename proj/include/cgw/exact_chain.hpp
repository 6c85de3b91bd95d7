#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cgw/offspring.hpp"

namespace cgw {

/// Transition structure of the Galton-Watson process censored at `level`,
/// over states {0, ..., level}. Row m is the law of min(level, X_1 + ... + X_m);
/// row 0 is absorbing.
class CensoredChain {
 public:
  /// Throws LevelTooSmall when level < 2.
  static CensoredChain build(const OffspringDistribution& offspring, int level);

  int level() const { return level_; }
  const OffspringDistribution& offspring() const { return offspring_; }

  std::span<const double> row(int from) const;
  double transition(int from, int to) const;

 private:
  CensoredChain(OffspringDistribution offspring, int level, std::vector<double> rows);

  OffspringDistribution offspring_;
  int level_;
  std::vector<double> rows_;  // (level + 1)^2, row-major
};

/// E[U_m] for start states m = 1..level (index m - 1): mean time to hit 0.
std::vector<double> expected_absorption(const CensoredChain& chain);

/// Expected number of visits to the top state starting from it, counting
/// time zero: the (level, level) entry of (I - M)^{-1}.
double expected_visits_to_top(const CensoredChain& chain);

/// Probability that the chain started at the top never returns to it.
double never_return_probability(const CensoredChain& chain);

/// E[V] where V is the last time the chain sits at the top.
double expected_last_visit(const CensoredChain& chain);

constexpr double kDefaultTailEps = 1e-10;
constexpr std::int64_t kDefaultMaxSteps = 100'000'000;

/// P(U = k) for k = 0, 1, ..., starting from the top, truncated once the
/// survival probability drops below tail_eps. Throws HardCap when more than
/// max_steps steps would be needed.
std::vector<double> distribution_of_u(const CensoredChain& chain,
                                      double tail_eps = kDefaultTailEps,
                                      std::int64_t max_steps = kDefaultMaxSteps);

/// Law of X_steps on {0, ..., level}, started from the top.
std::vector<double> state_law(const CensoredChain& chain, std::int64_t steps);

struct KsDistance {
  double distance;
  // Bound on what the truncated tail could add to the supremum.
  double uncertainty;
};

/// sup_t |P(scale * U <= t) - (1 - e^{-t})| for an integer-valued U with
/// the given (possibly truncated) pmf, checked on both sides of each jump.
KsDistance ks_to_exponential(std::span<const double> u_pmf, double scale);

/// Kolmogorov distance between U * q^level and Exp(1), where q is the
/// extinction probability of the uncensored process.
KsDistance exact_ks_to_exponential(const CensoredChain& chain, double q,
                                   double tail_eps = kDefaultTailEps,
                                   std::int64_t max_steps = kDefaultMaxSteps);

struct ChainReport {
  int n = 0;
  double q = 0.0;
  double q_n = 0.0;
  std::vector<double> expected_u;
  double expected_v = 0.0;
  double ratio_mean = 0.0;  // E[U_N] q^N
  double ratio_qn = 0.0;    // q_N / q^N
  std::optional<double> ks_to_exp;
  std::optional<double> ks_uncertainty;
};

struct ChainReportOptions {
  bool with_ks = true;
  double tail_eps = kDefaultTailEps;
  // When the step count for the KS law would exceed this, the KS fields
  // are left empty instead of failing.
  std::int64_t ks_max_steps = kDefaultMaxSteps;
};

/// Throws NotSupercritical when q is undefined.
ChainReport make_chain_report(const OffspringDistribution& offspring, int level,
                              const ChainReportOptions& options = {});

}  // namespace cgw
