#include "cgw/branching_selection.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cgw/censored_sim.hpp"
#include "cgw/error.hpp"
#include "cgw/exact_chain.hpp"
#include "cgw/parallel.hpp"
#include "cgw/stats.hpp"

namespace cgw {
namespace {

constexpr int kSegments = 10;

// Slope of position(k) over [burn_in, steps] and the batch-means error from
// kSegments equal pieces. `at` holds positions at the segment boundaries.
void fill_slope(SpeedEstimate& est, const std::vector<std::int64_t>& boundaries,
                const std::vector<std::int64_t>& at) {
  const auto span = static_cast<double>(boundaries.back() - boundaries.front());
  est.v_hat = static_cast<double>(at.back() - at.front()) / span;
  RunningMoments segments;
  for (std::size_t s = 0; s + 1 < boundaries.size(); ++s) {
    if (boundaries[s + 1] == boundaries[s]) continue;
    segments.add(static_cast<double>(at[s + 1] - at[s]) /
                 static_cast<double>(boundaries[s + 1] - boundaries[s]));
  }
  est.v_err = segments.standard_error();
}

std::vector<std::int64_t> segment_boundaries(std::int64_t steps, std::int64_t burn_in) {
  std::vector<std::int64_t> b;
  for (int s = 0; s <= kSegments; ++s) b.push_back(burn_in + (steps - burn_in) * s / kSegments);
  return b;
}

}  // namespace

ParticleConfiguration ParticleConfiguration::point_mass(Position at, std::int64_t count) {
  ParticleConfiguration c;
  c.add(at, count);
  return c;
}

void ParticleConfiguration::add(Position at, std::int64_t count) {
  if (count < 0) throw Error(ErrorCode::InvalidInput, "negative particle count");
  if (count == 0) return;
  counts_[at] += count;
  total_ += count;
}

std::int64_t ParticleConfiguration::count_at(Position at) const {
  const auto it = counts_.find(at);
  return it == counts_.end() ? 0 : it->second;
}

ParticleConfiguration branch(const ParticleConfiguration& config, const PairedOffspring& law,
                             Rng& rng) {
  ParticleConfiguration children;
  const auto alpha = law.binomial2_alpha();
  for (const auto& [at, count] : config.counts()) {
    std::int64_t advance = 0;
    std::int64_t stay = 0;
    if (alpha) {
      std::binomial_distribution<std::int64_t> moved(2 * count, *alpha);
      advance = moved(rng);
      stay = 2 * count - advance;
    } else {
      for (std::int64_t i = 0; i < count; ++i) {
        const auto [x, x_stay] = law.sample(rng);
        advance += x;
        stay += x_stay;
      }
    }
    children.add(at, stay);
    children.add(at + 1, advance);
  }
  return children;
}

ParticleConfiguration select(const ParticleConfiguration& children, std::int64_t n) {
  if (children.total() < n)
    throw Error(ErrorCode::TooFewChildren, std::to_string(children.total()) + " children for " +
                                               std::to_string(n) + " slots");
  ParticleConfiguration kept;
  std::int64_t remaining = n;
  for (auto it = children.counts().rbegin(); it != children.counts().rend() && remaining > 0;
       ++it) {
    const auto take = std::min(remaining, it->second);
    kept.add(it->first, take);
    remaining -= take;
  }
  return kept;
}

SpeedBracket speed_bracket(const OffspringDistribution& offspring, int n) {
  extinction_probability(offspring);
  const auto chain = CensoredChain::build(offspring, n);
  const double expected_u = expected_absorption(chain).back();
  const double expected_v = expected_last_visit(chain);
  return {1.0 - 1.0 / (expected_v + 1.0), 1.0 - 1.0 / expected_u};
}

SpeedEstimate simulate_speed(const PairedOffspring& law, int n, std::int64_t steps,
                             std::uint64_t seed, const SpeedOptions& options) {
  if (n < 1) throw Error(ErrorCode::OutOfRange, "need at least one particle");
  if (steps < 10) throw Error(ErrorCode::OutOfRange, "need at least 10 steps");
  SpeedEstimate est;
  est.n = n;
  est.steps = steps;
  est.burn_in = steps / 10;
  const auto boundaries = segment_boundaries(steps, est.burn_in);
  std::vector<std::int64_t> at;
  at.reserve(boundaries.size());

  Rng rng = make_stream(seed, 0);
  auto config = ParticleConfiguration::point_mass(0, n);
  std::size_t next_boundary = 0;
  for (std::int64_t k = 0;; ++k) {
    const auto front = config.max_position();
    if (options.keep_trace) est.trace.push_back({k, front, config.count_at(k)});
    if (config.min_position() < front - 1) ++est.wide_support_steps;
    while (next_boundary < boundaries.size() && boundaries[next_boundary] == k) {
      at.push_back(front);
      ++next_boundary;
    }
    if (k == steps) break;
    config = select(branch(config, law, rng), n);
  }
  fill_slope(est, boundaries, at);
  return est;
}

std::vector<std::vector<std::int64_t>> frontier_counts(const PairedOffspring& law, int n,
                                                       int k_max, std::int64_t runs,
                                                       std::uint64_t seed, unsigned workers) {
  if (k_max < 1) throw Error(ErrorCode::OutOfRange, "k_max must be at least 1");
  if (runs < 1) throw Error(ErrorCode::OutOfRange, "runs must be positive");
  // Per-run frontier paths, then integer tallies; the result is independent
  // of scheduling.
  std::vector<std::vector<int>> paths(static_cast<std::size_t>(runs));
  parallel_for(paths.size(), workers, [&](std::size_t r) {
    Rng rng = make_stream(seed, r);
    auto config = ParticleConfiguration::point_mass(0, n);
    auto& path = paths[r];
    path.reserve(static_cast<std::size_t>(k_max) + 1);
    path.push_back(n);
    for (int k = 1; k <= k_max; ++k) {
      config = select(branch(config, law, rng), n);
      path.push_back(static_cast<int>(config.count_at(k)));
    }
  });
  std::vector<std::vector<std::int64_t>> hist(static_cast<std::size_t>(k_max) + 1,
                                              std::vector<std::int64_t>(n + 1, 0));
  for (const auto& path : paths) {
    for (std::size_t k = 0; k < path.size(); ++k) ++hist[k][static_cast<std::size_t>(path[k])];
  }
  return hist;
}

SpeedEstimate renewal_front_speed(const std::function<std::int64_t(Rng&)>& interval,
                                  std::int64_t steps, std::uint64_t seed) {
  if (steps < 10) throw Error(ErrorCode::OutOfRange, "need at least 10 steps");
  SpeedEstimate est;
  est.steps = steps;
  est.burn_in = steps / 10;
  const auto boundaries = segment_boundaries(steps, est.burn_in);
  std::vector<std::int64_t> at;

  Rng rng = make_stream(seed, 0);
  std::int64_t renewals = 0;  // I_k: number of i >= 1 with Gamma^i <= k
  std::int64_t next_renewal = 0;
  auto draw = [&] {
    const auto gap = interval(rng);
    if (gap < 1) throw Error(ErrorCode::InvalidInput, "renewal intervals must be >= 1");
    return gap;
  };
  next_renewal = draw();  // Gamma^1
  for (const auto k : boundaries) {
    while (next_renewal <= k) {
      ++renewals;
      next_renewal += draw();
    }
    at.push_back(k - renewals);
  }
  fill_slope(est, boundaries, at);
  return est;
}

SpeedEstimate simulate_renewal_front(RenewalInterval kind, const OffspringDistribution& offspring,
                                     int n, std::int64_t steps, std::uint64_t seed) {
  extinction_probability(offspring);
  const CensoredStepper stepper(offspring, n);
  const std::int64_t horizon = default_horizon(offspring, n, 1);
  auto interval = [&](Rng& rng) -> std::int64_t {
    const auto path = simulate_path(stepper, horizon, rng);
    if (!path.absorbed) throw Error(ErrorCode::HardCap, "renewal interval reached the horizon");
    return kind == RenewalInterval::VPlusOne ? path.v + 1 : path.u;
  };
  auto est = renewal_front_speed(interval, steps, seed);
  est.n = n;
  return est;
}

}  // namespace cgw
