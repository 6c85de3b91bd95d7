#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cgw/offspring.hpp"
#include "cgw/rng.hpp"

namespace cgw {

/// What one censored step consumed: the number of offspring values drawn
/// and their running total. Drawing stops as soon as the total reaches the
/// level, so `drawn` may be smaller than the current state.
struct StepDraw {
  std::int64_t drawn = 0;
  std::int64_t total = 0;
};

/// Samples X_{k+1} given X_k for one offspring law and level. Binomial(2, a)
/// laws take the exact shortcut X_{k+1} = min(N, Binomial(2 X_k, a)).
class CensoredStepper {
 public:
  CensoredStepper(const OffspringDistribution& offspring, int level);

  int level() const { return level_; }
  StepDraw draw(int state, Rng& rng) const;
  int step(int state, Rng& rng) const;

 private:
  const OffspringDistribution* offspring_;
  int level_;
  std::optional<double> alpha_;
};

struct PathRecord {
  int level = 0;
  bool absorbed = false;
  // Survival time when absorbed; number of observed steps otherwise.
  std::int64_t u = 0;
  // Last time at the level within the observed prefix.
  std::int64_t v = 0;
  // Number of returns to the level within the observed prefix.
  std::int64_t t = 0;

  // Filled only when recording: X_0..X_u, the times k with X_k = level
  // (A_0 = 0 < A_1 < ...), and the draw behind each step.
  std::vector<int> trajectory;
  std::vector<std::int64_t> passages;
  std::vector<StepDraw> draws;
};

/// Forward simulation from X_0 = level until absorption or `horizon` steps.
PathRecord simulate_path(const CensoredStepper& stepper, std::int64_t horizon, Rng& rng,
                         bool record = false);
PathRecord simulate_path(const OffspringDistribution& offspring, int level, std::int64_t horizon,
                         Rng& rng, bool record = false);

/// 100 (1/q)^N steps per path, with at most 1e9 steps for the whole batch.
/// Non-supercritical laws use q = 1.
std::int64_t default_horizon(const OffspringDistribution& offspring, int level, std::int64_t runs);

struct BatchConfig {
  std::int64_t runs = 1000;
  std::int64_t horizon = 0;  // 0 selects default_horizon
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

struct ReplicaSummary {
  bool absorbed;
  std::int64_t u;
  std::int64_t v;
  std::int64_t t;
};

/// Replica i uses make_stream(seed, i); output order is replica order.
std::vector<ReplicaSummary> simulate_replicas(const OffspringDistribution& offspring, int level,
                                              const BatchConfig& config);

struct BatchEstimate {
  int n = 0;
  std::int64_t runs = 0;
  std::int64_t absorbed = 0;
  double mean_u = 0.0;
  double ci_u = 0.0;
  double mean_v = 0.0;
  double ci_v = 0.0;
  double mean_t = 0.0;
  double ci_t = 0.0;
  double t_geometric_p_hat = 0.0;
  double p_hat_se = 0.0;
};

/// Moments over absorbed replicas only. Throws AllTruncated when none was.
BatchEstimate summarize(int level, const std::vector<ReplicaSummary>& replicas);

BatchEstimate batch_estimate(const OffspringDistribution& offspring, int level,
                             const BatchConfig& config);

/// U q^N per replica. Throws NotSupercritical, and HardCap if any replica
/// reaches the horizon.
std::vector<double> rescale_u(const OffspringDistribution& offspring, int level,
                              const std::vector<ReplicaSummary>& replicas);
std::vector<double> sample_u_rescaled(const OffspringDistribution& offspring, int level,
                                      std::int64_t runs, std::uint64_t seed, unsigned workers = 1);

}  // namespace cgw
