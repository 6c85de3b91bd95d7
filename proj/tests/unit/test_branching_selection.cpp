#include <doctest.h>

#include <cmath>
#include <vector>

#include "cgw/branching_selection.hpp"
#include "cgw/error.hpp"
#include "cgw/exact_chain.hpp"
#include "cgw/stats.hpp"

using namespace cgw;

namespace {

using Config = ParticleConfiguration;

OffspringDistribution two_point() {
  return OffspringDistribution::from_pmf(std::vector<PmfEntry>{{0, 0.4}, {2, 0.6}});
}

Config make(std::initializer_list<std::pair<std::int64_t, std::int64_t>> cells) {
  Config c;
  for (auto [at, count] : cells) c.add(at, count);
  return c;
}

}  // namespace

TEST_CASE("branch with deterministic pairs") {
  Rng rng = make_stream(0, 0);
  const auto shift = PairedOffspring::from_table(std::vector<PairEntry>{{1, 0, 1.0}});
  CHECK(branch(make({{0, 3}, {4, 2}}), shift, rng) == make({{1, 3}, {5, 2}}));
  const auto stay = PairedOffspring::from_table(std::vector<PairEntry>{{0, 1, 1.0}});
  CHECK(branch(make({{0, 3}, {4, 2}}), stay, rng) == make({{0, 3}, {4, 2}}));
}

TEST_CASE("binomial pairs give two children per parent") {
  const auto law = binomial2(0.75);
  Rng rng = make_stream(1, 0);
  auto config = Config::point_mass(0, 7);
  for (int k = 0; k < 20; ++k) {
    const auto children = branch(config, law, rng);
    CHECK(children.total() == 2 * config.total());
    CHECK(children.min_position() >= config.min_position());
    CHECK(children.max_position() <= config.max_position() + 1);
    config = select(children, 7);
  }
}

TEST_CASE("select keeps the rightmost particles") {
  CHECK(select(make({{0, 3}, {1, 4}}), 5) == make({{0, 1}, {1, 4}}));
  CHECK(select(make({{2, 7}}), 5) == make({{2, 5}}));
  CHECK(select(make({{0, 2}, {3, 1}}), 3) == make({{0, 2}, {3, 1}}));
  try {
    select(make({{0, 2}}), 3);
    FAIL("expected TooFewChildren");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewChildren);
  }
}

TEST_CASE("population invariants along a run") {
  for (const auto& law : {minimal_stay(two_point()), binomial2(0.6)}) {
    for (int n : {1, 2, 5}) {
      Rng rng = make_stream(3, static_cast<std::uint64_t>(n));
      auto config = Config::point_mass(0, n);
      auto front = config.max_position();
      for (std::int64_t k = 1; k <= 500; ++k) {
        config = select(branch(config, law, rng), n);
        CHECK(config.total() == n);
        CHECK(config.max_position() >= front);
        CHECK(config.max_position() <= k);
        front = config.max_position();
      }
    }
  }
}

TEST_CASE("speed of a deterministic march") {
  const auto march = PairedOffspring::from_table(std::vector<PairEntry>{{1, 0, 1.0}});
  const auto est = simulate_speed(march, 3, 1000, 0);
  CHECK(est.v_hat == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(est.v_err == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(est.burn_in == 100);
}

TEST_CASE("speed brackets") {
  const auto two = speed_bracket(two_point(), 2);
  CHECK(two.low == doctest::Approx(0.84).epsilon(1e-12));
  CHECK(two.high == doctest::Approx(0.84).epsilon(1e-12));
  const auto bin = speed_bracket(binomial2(0.75).marginal(), 2);
  CHECK(bin.high == doctest::Approx(1.0 - 11.0 / 1376.0).epsilon(1e-12));
  CHECK(bin.low == doctest::Approx(1.0 - 1.0 / (6777.0 / 55.0 + 1.0)).epsilon(1e-12));
  CHECK(bin.low <= bin.high);
  const auto critical =
      OffspringDistribution::from_pmf(std::vector<PmfEntry>{{0, 0.5}, {2, 0.5}});
  CHECK_THROWS_AS(speed_bracket(critical, 3), Error);
}

TEST_CASE("speed at N = 2 with minimal stays") {
  const auto est = simulate_speed(minimal_stay(two_point()), 2, 1'000'000, 0);
  CHECK(std::abs(est.v_hat - 0.84) < 3 * est.v_err + 1e-3);
  CHECK(est.v_err < 1e-3);
  CHECK(est.wide_support_steps == 0);
}

TEST_CASE("estimated speed lies inside the bracket") {
  struct Case {
    PairedOffspring law;
    int n;
    std::int64_t steps;
  };
  const Case cases[] = {{minimal_stay(two_point()), 2, 200'000},
                        {minimal_stay(two_point()), 5, 200'000},
                        {minimal_stay(two_point()), 10, 100'000},
                        {binomial2(0.75), 2, 200'000},
                        {binomial2(0.75), 5, 50'000}};
  for (const auto& c : cases) {
    const auto est = simulate_speed(c.law, c.n, c.steps, 11);
    const auto b = speed_bracket(c.law.marginal(), c.n);
    CHECK(est.v_hat >= b.low - 3 * est.v_err);
    CHECK(est.v_hat <= b.high + 3 * est.v_err);
  }
}

TEST_CASE("trace records the front") {
  SpeedOptions options;
  options.keep_trace = true;
  const auto est = simulate_speed(minimal_stay(two_point()), 3, 50, 2, options);
  REQUIRE(est.trace.size() == 51);
  CHECK(est.trace[0].max_y == 0);
  CHECK(est.trace[0].frontier_count == 3);
  for (std::size_t k = 1; k < est.trace.size(); ++k) {
    CHECK(est.trace[k].k == static_cast<std::int64_t>(k));
    CHECK(est.trace[k].max_y >= est.trace[k - 1].max_y);
    CHECK(est.trace[k].max_y <= est.trace[k].k);
  }
}

TEST_CASE("frontier counts follow the censored chain") {
  const int n = 3;
  const int k_max = 5;
  const std::int64_t runs = 20'000;
  const auto hist = frontier_counts(minimal_stay(two_point()), n, k_max, runs, 4, 4);
  REQUIRE(hist.size() == k_max + 1);
  CHECK(hist[0][n] == runs);

  const auto chain = CensoredChain::build(two_point(), n);
  const auto law = state_law(chain, k_max);
  std::vector<double> observed(hist[k_max].begin(), hist[k_max].end());
  const auto pooled = pool_categories(observed, law);
  const auto gof = chi_square_gof(pooled.observed, pooled.probabilities);
  CHECK(gof.p_value > 1e-3);

  // Once the frontier dies, the same run cannot repopulate it.
  const auto again = frontier_counts(minimal_stay(two_point()), n, k_max, runs, 4, 1);
  CHECK(again == hist);
  for (int k = 1; k <= k_max; ++k) CHECK(hist[k][0] >= hist[k - 1][0]);
}

TEST_CASE("renewal fronts") {
  const auto flat = renewal_front_speed([](Rng&) -> std::int64_t { return 1; }, 1000, 0);
  CHECK(flat.v_hat == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(renewal_front_speed([](Rng&) -> std::int64_t { return 0; }, 100, 0), Error);

  for (auto kind : {RenewalInterval::VPlusOne, RenewalInterval::U}) {
    const auto est = simulate_renewal_front(kind, two_point(), 2, 1'000'000, 5);
    CHECK(std::abs(est.v_hat - 0.84) < 0.01 * 0.84);
  }
}
