#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "cgw/offspring.hpp"
#include "cgw/rng.hpp"

namespace cgw {

/// Counts of indistinguishable particles per integer position.
class ParticleConfiguration {
 public:
  using Position = std::int64_t;

  ParticleConfiguration() = default;
  static ParticleConfiguration point_mass(Position at, std::int64_t count);

  void add(Position at, std::int64_t count);

  std::int64_t total() const { return total_; }
  bool empty() const { return total_ == 0; }
  std::int64_t count_at(Position at) const;
  // Both require a non-empty configuration.
  Position max_position() const { return counts_.rbegin()->first; }
  Position min_position() const { return counts_.begin()->first; }
  const std::map<Position, std::int64_t>& counts() const { return counts_; }

  bool operator==(const ParticleConfiguration&) const = default;

 private:
  std::map<Position, std::int64_t> counts_;
  std::int64_t total_ = 0;
};

/// Every particle at l draws (x, x') and leaves x children at l + 1 and x'
/// at l. Binomial(2, a) pairs are drawn per position as Binomial(2c, a).
ParticleConfiguration branch(const ParticleConfiguration& config, const PairedOffspring& law,
                             Rng& rng);

/// Keeps the n rightmost particles. Throws TooFewChildren if there are fewer.
ParticleConfiguration select(const ParticleConfiguration& children, std::int64_t n);

struct SpeedBracket {
  double low;   // 1 - 1 / (E[V_N] + 1)
  double high;  // 1 - 1 / E[U_N]
};

/// Exact speed bounds from the censored chain. Throws NotSupercritical.
SpeedBracket speed_bracket(const OffspringDistribution& offspring, int n);

struct FrontSample {
  std::int64_t k;
  std::int64_t max_y;
  std::int64_t frontier_count;
};

struct SpeedEstimate {
  int n = 0;
  std::int64_t steps = 0;
  std::int64_t burn_in = 0;
  double v_hat = 0.0;
  // Batch-means standard error over 10 equal segments after burn-in.
  double v_err = 0.0;
  std::optional<SpeedBracket> bracket;
  // Post-selection times whose support was wider than {max - 1, max}.
  std::int64_t wide_support_steps = 0;
  // Filled when a trace was requested: one row per time k = 0..steps.
  std::vector<FrontSample> trace;
};

struct SpeedOptions {
  bool keep_trace = false;
};

/// Runs `steps` >= 10 steps from n particles at 0 and estimates the speed
/// of the rightmost particle from the slope after a 10% burn-in.
SpeedEstimate simulate_speed(const PairedOffspring& law, int n, std::int64_t steps,
                             std::uint64_t seed, const SpeedOptions& options = {});

/// Histograms of Y_k(k), the count at the rightmost reachable position, for
/// k = 0..k_max. Row k has n + 1 bins.
std::vector<std::vector<std::int64_t>> frontier_counts(const PairedOffspring& law, int n,
                                                       int k_max, std::int64_t runs,
                                                       std::uint64_t seed, unsigned workers = 1);

enum class RenewalInterval {
  VPlusOne,  // dominated process: restart after each last visit
  U,         // dominating process: restart at each frontier extinction
};

/// Front k - I_k of a renewal process whose intervals are drawn by
/// `interval` (each must be >= 1); slope estimated as in simulate_speed.
SpeedEstimate renewal_front_speed(const std::function<std::int64_t(Rng&)>& interval,
                                  std::int64_t steps, std::uint64_t seed);

/// Renewal front with i.i.d. V_N + 1 or U_N intervals from the censored
/// process. Throws NotSupercritical.
SpeedEstimate simulate_renewal_front(RenewalInterval kind, const OffspringDistribution& offspring,
                                     int n, std::int64_t steps, std::uint64_t seed);

}  // namespace cgw
