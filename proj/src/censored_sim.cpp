#include "cgw/censored_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cgw/error.hpp"
#include "cgw/parallel.hpp"
#include "cgw/stats.hpp"

namespace cgw {

CensoredStepper::CensoredStepper(const OffspringDistribution& offspring, int level)
    : offspring_(&offspring), level_(level), alpha_(offspring.binomial2_alpha()) {
  if (level < 2) throw Error(ErrorCode::LevelTooSmall, "censor level must be at least 2");
}

StepDraw CensoredStepper::draw(int state, Rng& rng) const {
  if (state <= 0) return {};
  if (alpha_) {
    std::binomial_distribution<std::int64_t> sum(2 * static_cast<std::int64_t>(state), *alpha_);
    return {state, sum(rng)};
  }
  StepDraw d;
  while (d.drawn < state && d.total < level_) {
    d.total += offspring_->sample(rng);
    ++d.drawn;
  }
  return d;
}

int CensoredStepper::step(int state, Rng& rng) const {
  return static_cast<int>(std::min<std::int64_t>(level_, draw(state, rng).total));
}

PathRecord simulate_path(const CensoredStepper& stepper, std::int64_t horizon, Rng& rng,
                         bool record) {
  if (horizon < 1) throw Error(ErrorCode::OutOfRange, "horizon must be positive");
  const int level = stepper.level();
  PathRecord path;
  path.level = level;
  if (record) {
    path.trajectory.push_back(level);
    path.passages.push_back(0);
  }
  int state = level;
  std::int64_t k = 0;
  while (k < horizon) {
    const StepDraw d = stepper.draw(state, rng);
    state = static_cast<int>(std::min<std::int64_t>(level, d.total));
    ++k;
    if (record) {
      path.trajectory.push_back(state);
      path.draws.push_back(d);
    }
    if (state == level) {
      path.v = k;
      ++path.t;
      if (record) path.passages.push_back(k);
    } else if (state == 0) {
      path.absorbed = true;
      break;
    }
  }
  path.u = k;
  return path;
}

PathRecord simulate_path(const OffspringDistribution& offspring, int level, std::int64_t horizon,
                         Rng& rng, bool record) {
  return simulate_path(CensoredStepper(offspring, level), horizon, rng, record);
}

std::int64_t default_horizon(const OffspringDistribution& offspring, int level, std::int64_t runs) {
  double q = 1.0;
  try {
    q = extinction_probability(offspring);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotSupercritical) throw;
  }
  constexpr double kBatchBudget = 1e9;
  const double per_path = 100.0 * std::pow(1.0 / q, level);
  const double cap = kBatchBudget / static_cast<double>(std::max<std::int64_t>(runs, 1));
  return static_cast<std::int64_t>(std::max(1.0, std::min(per_path, cap)));
}

std::vector<ReplicaSummary> simulate_replicas(const OffspringDistribution& offspring, int level,
                                              const BatchConfig& config) {
  if (config.runs < 1) throw Error(ErrorCode::OutOfRange, "runs must be positive");
  const CensoredStepper stepper(offspring, level);
  const std::int64_t horizon =
      config.horizon > 0 ? config.horizon : default_horizon(offspring, level, config.runs);
  std::vector<ReplicaSummary> out(static_cast<std::size_t>(config.runs));
  parallel_for(out.size(), config.workers, [&](std::size_t i) {
    Rng rng = make_stream(config.seed, i);
    const auto path = simulate_path(stepper, horizon, rng);
    out[i] = {path.absorbed, path.u, path.v, path.t};
  });
  return out;
}

BatchEstimate summarize(int level, const std::vector<ReplicaSummary>& replicas) {
  RunningMoments u, v, t;
  std::vector<std::int64_t> returns;
  for (const auto& r : replicas) {
    if (!r.absorbed) continue;
    u.add(static_cast<double>(r.u));
    v.add(static_cast<double>(r.v));
    t.add(static_cast<double>(r.t));
    returns.push_back(r.t);
  }
  if (returns.empty()) throw Error(ErrorCode::AllTruncated, "every path reached the horizon");
  const auto fit = geometric_fit(returns);
  BatchEstimate est;
  est.n = level;
  est.runs = static_cast<std::int64_t>(replicas.size());
  est.absorbed = static_cast<std::int64_t>(returns.size());
  est.mean_u = u.mean();
  est.ci_u = u.ci_half_width();
  est.mean_v = v.mean();
  est.ci_v = v.ci_half_width();
  est.mean_t = t.mean();
  est.ci_t = t.ci_half_width();
  est.t_geometric_p_hat = fit.p_hat;
  est.p_hat_se = fit.standard_error;
  return est;
}

BatchEstimate batch_estimate(const OffspringDistribution& offspring, int level,
                             const BatchConfig& config) {
  return summarize(level, simulate_replicas(offspring, level, config));
}

std::vector<double> rescale_u(const OffspringDistribution& offspring, int level,
                              const std::vector<ReplicaSummary>& replicas) {
  const double scale = std::pow(extinction_probability(offspring), level);
  std::vector<double> out;
  out.reserve(replicas.size());
  for (const auto& r : replicas) {
    if (!r.absorbed) throw Error(ErrorCode::HardCap, "a replica reached the horizon");
    out.push_back(static_cast<double>(r.u) * scale);
  }
  return out;
}

std::vector<double> sample_u_rescaled(const OffspringDistribution& offspring, int level,
                                      std::int64_t runs, std::uint64_t seed, unsigned workers) {
  extinction_probability(offspring);  // NotSupercritical before any simulation
  BatchConfig config;
  config.runs = runs;
  config.seed = seed;
  config.workers = workers;
  return rescale_u(offspring, level, simulate_replicas(offspring, level, config));
}

}  // namespace cgw
