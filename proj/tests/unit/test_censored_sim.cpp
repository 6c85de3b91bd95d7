#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "cgw/censored_sim.hpp"
#include "cgw/error.hpp"
#include "cgw/exact_chain.hpp"
#include "cgw/stats.hpp"

using namespace cgw;

namespace {

OffspringDistribution pmf(std::vector<PmfEntry> t) { return OffspringDistribution::from_pmf(t); }
OffspringDistribution two_point() { return pmf({{0, 0.4}, {2, 0.6}}); }
OffspringDistribution bin75() { return binomial2(0.75).marginal(); }

double exp_cdf(double t) { return t <= 0 ? 0.0 : -std::expm1(-t); }

// Every recorded step obeys the censoring rule and the summaries match the
// trajectory.
void check_replay(const PathRecord& path) {
  const int n = path.level;
  REQUIRE(path.trajectory.size() == path.draws.size() + 1);
  CHECK(path.trajectory.front() == n);
  std::vector<std::int64_t> at_top;
  for (std::size_t k = 0; k < path.trajectory.size(); ++k) {
    const int x = path.trajectory[k];
    if (x == n) at_top.push_back(static_cast<std::int64_t>(k));
    if (k + 1 == path.trajectory.size()) break;
    CHECK(x > 0);
    const auto& d = path.draws[k];
    CHECK(path.trajectory[k + 1] == std::min<std::int64_t>(n, d.total));
    CHECK(d.drawn <= x);
    if (d.drawn < x) CHECK(d.total >= n);
  }
  CHECK(path.passages == at_top);
  CHECK(path.t == static_cast<std::int64_t>(path.passages.size()) - 1);
  CHECK(path.v == path.passages.back());
  CHECK(path.u == static_cast<std::int64_t>(path.trajectory.size()) - 1);
  if (path.absorbed) {
    CHECK(path.trajectory.back() == 0);
    CHECK(path.u >= path.v + 1);
  }
}

}  // namespace

TEST_CASE("immediate extinction") {
  const auto dead = pmf({{0, 1.0}});
  Rng rng = make_stream(0, 0);
  for (int i = 0; i < 20; ++i) {
    const auto path = simulate_path(dead, 2, 100, rng, true);
    CHECK(path.absorbed);
    CHECK(path.u == 1);
    CHECK(path.v == 0);
    CHECK(path.t == 0);
    check_replay(path);
  }
}

TEST_CASE("recorded paths replay under the censoring rule") {
  for (const auto& d : {two_point(), bin75(), pmf({{0, 0.3}, {1, 0.2}, {3, 0.5}})}) {
    for (int n : {2, 3, 6}) {
      Rng rng = make_stream(17, static_cast<std::uint64_t>(n));
      for (int i = 0; i < 50; ++i) check_replay(simulate_path(d, n, 10'000, rng, true));
    }
  }
  // Truncated paths keep a consistent prefix.
  Rng rng = make_stream(3, 0);
  const auto path = simulate_path(bin75(), 6, 25, rng, true);
  CHECK_FALSE(path.absorbed);
  CHECK(path.u == 25);
  check_replay(path);
}

TEST_CASE("paths are reproducible") {
  Rng a = make_stream(42, 7);
  Rng b = make_stream(42, 7);
  const auto p = simulate_path(two_point(), 5, 100'000, a, true);
  const auto q = simulate_path(two_point(), 5, 100'000, b, true);
  CHECK(p.trajectory == q.trajectory);
  CHECK(p.passages == q.passages);
  CHECK(p.u == q.u);
}

TEST_CASE("first-step escape frequency matches the chain") {
  for (const auto& [d, n] : {std::pair{two_point(), 5}, std::pair{bin75(), 3}}) {
    const auto chain = CensoredChain::build(d, n);
    const double p = 1.0 - chain.transition(n, n);
    const CensoredStepper stepper(d, n);
    Rng rng = make_stream(5, 0);
    const int trials = 200'000;
    int below = 0;
    for (int i = 0; i < trials; ++i) below += stepper.step(n, rng) < n;
    CHECK(std::abs(below / double(trials) - p) < 4 * std::sqrt(p * (1 - p) / trials) + 1e-12);
  }
}

TEST_CASE("batch estimates at N = 2") {
  BatchConfig config;
  config.runs = 100'000;
  config.seed = 0;
  const auto est = batch_estimate(two_point(), 2, config);
  CHECK(est.absorbed == est.runs);
  CHECK(std::abs(est.mean_u - 6.25) < 4 * est.ci_u / 1.96);
  CHECK(std::abs(est.mean_v - 5.25) < 4 * est.ci_v / 1.96);
  CHECK(std::abs(est.t_geometric_p_hat - 0.16) < 4 * est.p_hat_se);
  CHECK(est.t_geometric_p_hat ==
        doctest::Approx(est.runs / (est.runs + est.mean_t * est.runs)).epsilon(1e-12));
}

TEST_CASE("batch estimates converge to the exact chain") {
  struct Case {
    OffspringDistribution d;
    int n;
    std::int64_t runs;
  };
  const Case cases[] = {{two_point(), 2, 20'000}, {two_point(), 5, 20'000},
                        {two_point(), 10, 5'000}, {bin75(), 2, 20'000},
                        {bin75(), 5, 300}};
  for (const auto& c : cases) {
    BatchConfig config;
    config.runs = c.runs;
    config.seed = 1;
    const auto est = batch_estimate(c.d, c.n, config);
    const auto chain = CensoredChain::build(c.d, c.n);
    CHECK(std::abs(est.mean_u - expected_absorption(chain).back()) < 4 * est.ci_u / 1.96);
    CHECK(std::abs(est.mean_v - expected_last_visit(chain)) < 4 * est.ci_v / 1.96);
  }
}

TEST_CASE("results do not depend on the worker count") {
  BatchConfig config;
  config.runs = 3000;
  config.seed = 9;
  config.workers = 1;
  const auto serial = simulate_replicas(two_point(), 6, config);
  config.workers = 4;
  const auto threaded = simulate_replicas(two_point(), 6, config);
  REQUIRE(serial.size() == threaded.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].u == threaded[i].u);
    CHECK(serial[i].v == threaded[i].v);
    CHECK(serial[i].t == threaded[i].t);
  }
}

TEST_CASE("batch edge cases") {
  BatchConfig config;
  config.runs = 5;
  config.horizon = 1;
  const auto slow = pmf({{0, 1e-6}, {3, 1.0 - 1e-6}});
  try {
    batch_estimate(slow, 2, config);
    FAIL("expected AllTruncated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AllTruncated);
  }

  config.runs = 1;
  config.horizon = 0;
  const auto single = batch_estimate(two_point(), 2, config);
  CHECK(single.runs == 1);
  CHECK(std::isinf(single.ci_u));

  CHECK(default_horizon(two_point(), 2, 1) == 225);
  CHECK(default_horizon(two_point(), 40, 1) == 1'000'000'000);
  CHECK(default_horizon(pmf({{0, 1.0}}), 2, 10) == 100);
}

TEST_CASE("rescaled survival times against Exp(1)") {
  // The exact Kolmogorov distance at N = 20 is about 0.215 (exact chain), so
  // the empirical statistic must sit within sampling noise of it.
  const double q = 2.0 / 3.0;
  const int runs = 2000;
  const double noise = 1.95 / std::sqrt(static_cast<double>(runs));  // 0.1% Kolmogorov quantile

  const auto u20 = sample_u_rescaled(two_point(), 20, runs, 0);
  const auto emp20 = ks_statistic(u20, exp_cdf).statistic;
  const auto exact20 = exact_ks_to_exponential(CensoredChain::build(two_point(), 20), q).distance;
  CHECK(std::abs(emp20 - exact20) < noise);

  RunningMoments m;
  for (double x : u20) m.add(x);
  const double want = expected_absorption(CensoredChain::build(two_point(), 20)).back() *
                      std::pow(q, 20);
  CHECK(std::abs(m.mean() - want) < 4 * m.standard_error());

  std::vector<double> emp;
  for (int n : {5, 10, 15}) {
    const auto u = sample_u_rescaled(two_point(), n, runs, 1);
    emp.push_back(ks_statistic(u, exp_cdf).statistic);
    const double exact = exact_ks_to_exponential(CensoredChain::build(two_point(), n), q).distance;
    CHECK(std::abs(emp.back() - exact) < noise);
  }
  CHECK(emp[0] > emp[2]);

  const auto critical = pmf({{0, 0.5}, {2, 0.5}});
  try {
    sample_u_rescaled(critical, 5, 10, 0);
    FAIL("expected NotSupercritical");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotSupercritical);
  }
}
