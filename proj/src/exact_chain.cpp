#include "cgw/exact_chain.hpp"

#include <algorithm>
#include <cmath>

#include "cgw/error.hpp"
#include "cgw/transient_solver.hpp"

namespace cgw {
namespace {

// Solver for I - M where M is the chain restricted to states {1..level}.
TransientSolver top_block_solver(const CensoredChain& chain) {
  const int n = chain.level();
  std::vector<double> s(static_cast<std::size_t>(n) * n);
  std::vector<double> exit(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const auto row = chain.row(i);
    exit[i - 1] = row[0];
    for (int j = 1; j <= n; ++j) s[static_cast<std::size_t>(i - 1) * n + (j - 1)] = row[j];
  }
  return TransientSolver(s, exit, static_cast<std::size_t>(n));
}

std::vector<double> top_unit(int level) {
  std::vector<double> e(static_cast<std::size_t>(level), 0.0);
  e.back() = 1.0;
  return e;
}

}  // namespace

CensoredChain::CensoredChain(OffspringDistribution offspring, int level, std::vector<double> rows)
    : offspring_(std::move(offspring)), level_(level), rows_(std::move(rows)) {}

CensoredChain CensoredChain::build(const OffspringDistribution& offspring, int level) {
  if (level < 2) throw Error(ErrorCode::LevelTooSmall, "censor level must be at least 2");
  const auto width = static_cast<std::size_t>(level) + 1;
  std::vector<double> rows(width * width, 0.0);
  rows[0] = 1.0;
  std::vector<double> law(width, 0.0);
  law[0] = 1.0;
  for (int m = 1; m <= level; ++m) {
    law = capped_convolve(law, offspring, level);
    std::copy(law.begin(), law.end(), rows.begin() + static_cast<std::ptrdiff_t>(m * width));
  }
  return CensoredChain(offspring, level, std::move(rows));
}

std::span<const double> CensoredChain::row(int from) const {
  const auto width = static_cast<std::size_t>(level_) + 1;
  return std::span<const double>(rows_).subspan(static_cast<std::size_t>(from) * width, width);
}

double CensoredChain::transition(int from, int to) const {
  return row(from)[static_cast<std::size_t>(to)];
}

std::vector<double> expected_absorption(const CensoredChain& chain) {
  const std::vector<double> ones(static_cast<std::size_t>(chain.level()), 1.0);
  return top_block_solver(chain).solve(ones);
}

double expected_visits_to_top(const CensoredChain& chain) {
  return top_block_solver(chain).solve(top_unit(chain.level())).back();
}

double never_return_probability(const CensoredChain& chain) {
  const int n = chain.level();
  const int inner = n - 1;
  std::vector<double> s(static_cast<std::size_t>(inner) * inner);
  std::vector<double> exit(static_cast<std::size_t>(inner));
  std::vector<double> to_zero(static_cast<std::size_t>(inner));
  for (int i = 1; i < n; ++i) {
    const auto row = chain.row(i);
    to_zero[i - 1] = row[0];
    exit[i - 1] = row[0] + row[n];
    for (int j = 1; j < n; ++j) s[static_cast<std::size_t>(i - 1) * inner + (j - 1)] = row[j];
  }
  // h_j: probability of reaching 0 before the top, from j.
  const auto h = TransientSolver(s, exit, static_cast<std::size_t>(inner)).solve(to_zero);
  const auto top = chain.row(n);
  double q_n = top[0];
  for (int j = 1; j < n; ++j) q_n += top[j] * h[j - 1];
  return q_n;
}

double expected_last_visit(const CensoredChain& chain) {
  // P(V = k) = P(X_k = N) q_N, so E[V] = q_N [M F^2]_{N,N} with F = (I - M)^{-1}.
  const int n = chain.level();
  const auto solver = top_block_solver(chain);
  const auto column = solver.solve(top_unit(n));
  const auto column2 = solver.solve(column);
  const auto top = chain.row(n);
  double acc = 0.0;
  for (int j = 1; j <= n; ++j) acc += top[j] * column2[j - 1];
  return never_return_probability(chain) * acc;
}

std::vector<double> distribution_of_u(const CensoredChain& chain, double tail_eps,
                                      std::int64_t max_steps) {
  if (!(tail_eps > 0.0 && tail_eps < 1.0))
    throw Error(ErrorCode::OutOfRange, "tail_eps must lie in (0, 1)");
  const int n = chain.level();
  std::vector<double> alive(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> next(alive.size());
  alive[n] = 1.0;
  std::vector<double> pmf{0.0};
  double survival = 1.0;
  while (survival >= tail_eps) {
    if (static_cast<std::int64_t>(pmf.size()) > max_steps)
      throw Error(ErrorCode::HardCap, "law of U not resolved within " +
                                          std::to_string(max_steps) + " steps");
    std::fill(next.begin(), next.end(), 0.0);
    double absorbed = 0.0;
    for (int i = 1; i <= n; ++i) {
      const double mass = alive[i];
      if (mass == 0.0) continue;
      const auto row = chain.row(i);
      absorbed += mass * row[0];
      for (int j = 1; j <= n; ++j) next[j] += mass * row[j];
    }
    survival = 0.0;
    for (int j = 1; j <= n; ++j) survival += next[j];
    pmf.push_back(absorbed);
    alive.swap(next);
  }
  return pmf;
}

std::vector<double> state_law(const CensoredChain& chain, std::int64_t steps) {
  const int n = chain.level();
  std::vector<double> law(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> next(law.size());
  law[n] = 1.0;
  for (std::int64_t k = 0; k < steps; ++k) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i <= n; ++i) {
      if (law[i] == 0.0) continue;
      const auto row = chain.row(i);
      for (int j = 0; j <= n; ++j) next[j] += law[i] * row[j];
    }
    law.swap(next);
  }
  return law;
}

KsDistance ks_to_exponential(std::span<const double> u_pmf, double scale) {
  if (!(scale > 0.0)) throw Error(ErrorCode::OutOfRange, "scale must be positive");
  double below = 0.0;  // P(U <= k - 1)
  double distance = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < u_pmf.size(); ++k) {
    const double t = static_cast<double>(k) * scale;
    const double exp_cdf = -std::expm1(-t);
    const double at = below + u_pmf[k];
    distance = std::max({distance, std::abs(below - exp_cdf), std::abs(at - exp_cdf)});
    below = at;
    last = k;
  }
  const double residual = std::max(0.0, 1.0 - below);
  const double exp_tail = std::exp(-static_cast<double>(last) * scale);
  return {distance, std::max(residual, exp_tail)};
}

KsDistance exact_ks_to_exponential(const CensoredChain& chain, double q, double tail_eps,
                                   std::int64_t max_steps) {
  if (!(q > 0.0 && q < 1.0))
    throw Error(ErrorCode::NotSupercritical, "extinction probability must lie in (0, 1)");
  const auto pmf = distribution_of_u(chain, tail_eps, max_steps);
  return ks_to_exponential(pmf, std::pow(q, chain.level()));
}

ChainReport make_chain_report(const OffspringDistribution& offspring, int level,
                              const ChainReportOptions& options) {
  const auto chain = CensoredChain::build(offspring, level);
  ChainReport report;
  report.n = level;
  report.q = extinction_probability(offspring);
  report.q_n = never_return_probability(chain);
  report.expected_u = expected_absorption(chain);
  report.expected_v = expected_last_visit(chain);
  const double q_pow = std::pow(report.q, level);
  report.ratio_mean = report.expected_u.back() * q_pow;
  report.ratio_qn = report.q_n / q_pow;
  if (options.with_ks) {
    try {
      const auto ks = exact_ks_to_exponential(chain, report.q, options.tail_eps,
                                              options.ks_max_steps);
      report.ks_to_exp = ks.distance;
      report.ks_uncertainty = ks.uncertainty;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::HardCap) throw;
    }
  }
  return report;
}

}  // namespace cgw
