#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cgw/alias_table.hpp"
#include "cgw/rng.hpp"

namespace cgw {

struct PmfEntry {
  int value;
  double probability;
};

/// Offspring law with finite support on the non-negative integers and
/// positive mass at zero. Immutable once built.
class OffspringDistribution {
 public:
  /// Validates and renormalizes a table. Values must be distinct and
  /// non-negative, masses non-negative, the total within 1e-9 of one, and
  /// the mass at zero positive.
  static OffspringDistribution from_pmf(std::span<const PmfEntry> table);

  /// Reads the plain-text `k p_k` format (one pair per line, `#` comments).
  static OffspringDistribution parse(std::istream& in);
  static OffspringDistribution load(const std::filesystem::path& path);

  double probability(int k) const;
  /// Dense pmf indexed by value, of length max_value() + 1.
  std::span<const double> pmf() const { return pmf_; }
  int max_value() const { return static_cast<int>(pmf_.size()) - 1; }
  double mean() const;

  /// Set when this is the Binomial(2, alpha) law; enables exact fast paths
  /// for sums of many copies.
  std::optional<double> binomial2_alpha() const { return binomial2_alpha_; }

  int sample(Rng& rng) const;

 private:
  OffspringDistribution(std::vector<double> pmf, std::optional<double> alpha);

  friend class PairedOffspring;

  std::vector<double> pmf_;
  std::vector<int> support_;
  AliasTable alias_;
  std::optional<double> binomial2_alpha_;
};

struct PairEntry {
  int advance;  // children placed one step to the right
  int stay;     // children placed at the parent's position
  double probability;
};

/// Joint law of (advance, stay) counts with advance + stay >= 1 almost surely.
class PairedOffspring {
 public:
  static PairedOffspring from_table(std::vector<PairEntry> table);

  /// Reads `x x' p` triples, one per line, `#` comments.
  static PairedOffspring parse(std::istream& in);
  static PairedOffspring load(const std::filesystem::path& path);

  std::span<const PairEntry> entries() const { return entries_; }

  /// Law of the advance count. May put no mass at zero (for instance the
  /// deterministic march), in which case marginal() throws ZeroAtOrigin.
  std::vector<double> marginal_pmf() const;
  OffspringDistribution marginal() const;
  double advance_mean() const;

  std::optional<double> binomial2_alpha() const { return binomial2_alpha_; }

  std::pair<int, int> sample(Rng& rng) const;

 private:
  PairedOffspring(std::vector<PairEntry> entries, std::optional<double> alpha);

  friend PairedOffspring binomial2(double alpha);

  std::vector<PairEntry> entries_;
  AliasTable alias_;
  std::optional<double> binomial2_alpha_;
};

/// Each particle duplicates; each copy advances with probability alpha, so
/// advance ~ Binomial(2, alpha) and stay = 2 - advance.
PairedOffspring binomial2(double alpha);

/// Pairs the given law with stay = 1 exactly when advance = 0.
PairedOffspring minimal_stay(const OffspringDistribution& offspring);

/// Generating function f(s) = sum_k p_k s^k for s in [0, 1].
double pgf_eval(const OffspringDistribution& d, double s);
double pgf_derivative(const OffspringDistribution& d, double s);

/// f composed K times, evaluated at 0: P(Z_K = 0) for a single ancestor.
double pgf_iterate(const OffspringDistribution& d, std::int64_t iterations);

/// Root of f(x) = x in (0, 1). Throws NotSupercritical when the mean is
/// at most 1 + 1e-12.
double extinction_probability(const OffspringDistribution& d);

/// Extinction probability of Binomial(2, alpha) offspring, alpha in (1/2, 1).
double q_alpha_closed_form(double alpha);

/// Exact law of min(cap, X_1 + ... + X_m) on {0, ..., cap}.
std::vector<double> capped_sum_distribution(const OffspringDistribution& d, std::int64_t m,
                                            int cap);

/// One more capped convolution: law of min(cap, S + X) given the law of S
/// on {0, ..., cap}.
std::vector<double> capped_convolve(std::span<const double> partial, const OffspringDistribution& d,
                                    int cap);

}  // namespace cgw
