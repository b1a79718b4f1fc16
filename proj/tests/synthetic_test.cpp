#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "itime/dc_engine.hpp"
#include "itime/scaling_stats.hpp"
#include "itime/synthetic.hpp"

namespace itime {
namespace {

TEST(NormalSource, UsesStandardMersenneTwister) {
  // The standard fixes the 10000th output of a default-seeded mt19937_64.
  NormalSource src(5489U);
  std::uint64_t last = 0;
  for (int i = 0; i < 10000; ++i) {
    last = src.bits();
  }
  EXPECT_EQ(last, 9981545732273789042ULL);
}

TEST(NormalSource, MomentsOfBoxMuller) {
  NormalSource src(123);
  const int n = 400'000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = src.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(GenerateGbm, FlatWithoutVolatilityOrDrift) {
  const auto ticks = generate_gbm({50.0, 0.0, 0.0, 0.5, 1000, 9});
  ASSERT_EQ(ticks.size(), 1001U);
  for (std::size_t k = 0; k < ticks.size(); ++k) {
    EXPECT_EQ(ticks[k].price, 50.0);
    EXPECT_EQ(ticks[k].timestamp_ns, static_cast<Nanos>(k) * 500'000'000);
  }
}

TEST(GenerateGbm, DeterministicRampWithoutVolatility) {
  const double mu = 0.03;
  const double dt = 0.25;
  const auto ticks = generate_gbm({10.0, mu, 0.0, dt, 400, 1});
  for (std::size_t k = 0; k < ticks.size(); ++k) {
    const double expected = 10.0 * std::exp(mu * static_cast<double>(k) * dt);
    EXPECT_NEAR(ticks[k].price, expected, 1e-12 * expected);
  }
}

TEST(GenerateGbm, LogReturnVarianceMatchesSigmaSquaredDt) {
  const double sigma = 0.2;
  const double dt = 1.0 / 252.0;
  const auto ticks = generate_gbm({100.0, 0.0, sigma, dt, 100'000, 17});
  std::vector<double> r;
  for (std::size_t k = 1; k < ticks.size(); ++k) {
    r.push_back(std::log(ticks[k].price / ticks[k - 1].price));
  }
  double mean = 0.0;
  for (double x : r) {
    mean += x;
  }
  mean /= static_cast<double>(r.size());
  double var = 0.0;
  for (double x : r) {
    var += (x - mean) * (x - mean);
  }
  var /= static_cast<double>(r.size() - 1);
  EXPECT_NEAR(var, sigma * sigma * dt, 0.05 * sigma * sigma * dt);
}

TEST(GenerateGbm, SeedDeterminismAndPositivity) {
  const GbmParams p{100.0, 0.1, 0.8, 0.01, 50'000, 77};
  const auto a = generate_gbm(p);
  const auto b = generate_gbm(p);
  EXPECT_EQ(a, b);
  for (const auto& t : a) {
    EXPECT_GT(t.price, 0.0);
  }
  GbmParams q = p;
  q.seed = 78;
  EXPECT_NE(generate_gbm(q), a);
}

TEST(GenerateGbm, RejectsInvalidParams) {
  EXPECT_THROW(generate_gbm({0.0, 0, 0.1, 1, 10, 0}), ConfigError);
  EXPECT_THROW(generate_gbm({1.0, 0, -0.1, 1, 10, 0}), ConfigError);
  EXPECT_THROW(generate_gbm({1.0, 0, 0.1, 0, 10, 0}), ConfigError);
  EXPECT_THROW(generate_gbm({1.0, 0, 0.1, 1, 0, 0}), ConfigError);
}

std::size_t count_dc(const std::vector<IntrinsicEvent>& events) {
  return static_cast<std::size_t>(std::count_if(
      events.begin(), events.end(), [](const auto& e) { return e.kind == EventKind::DirectionalChange; }));
}

TEST(GenerateGbm, ZeroVolatilityNeverTriggersDc) {
  for (double mu : {0.0, 0.5}) {
    const auto ticks = generate_gbm({100.0, mu, 0.0, 0.01, 5000, 3});
    for (double d : {0.001, 0.01, 0.1}) {
      for (auto conv : {MoveConvention::Relative, MoveConvention::LogReturn}) {
        EXPECT_EQ(count_dc(process(ticks, {d, conv}, Mode::Up)), 0U);
      }
    }
  }
  // A falling ramp only reverses an Up-initialized runner once, into its true
  // direction; started Down it never reverses.
  const auto falling = generate_gbm({100.0, -0.5, 0.0, 0.01, 5000, 3});
  EXPECT_EQ(count_dc(process(falling, {0.01, MoveConvention::Relative}, Mode::Up)), 1U);
  EXPECT_EQ(count_dc(process(falling, {0.01, MoveConvention::Relative}, Mode::Down)), 0U);
}

TEST(GenerateRandomWalk, SingleStepIsFairCoin) {
  int ups = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const auto ticks = generate_random_walk(10.0, 0.01, 1, seed);
    ASSERT_EQ(ticks.size(), 2U);
    const double p = ticks[1].price;
    const bool up = p == 10.0 * std::exp(0.01);
    EXPECT_TRUE(up || p == 10.0 * std::exp(-0.01));
    ups += up ? 1 : 0;
  }
  EXPECT_GT(ups, 900);
  EXPECT_LT(ups, 1100);
}

TEST(GenerateRandomWalk, DeterministicPerSeed) {
  EXPECT_EQ(generate_random_walk(1.0, 0.001, 10'000, 5), generate_random_walk(1.0, 0.001, 10'000, 5));
  EXPECT_NE(generate_random_walk(1.0, 0.001, 10'000, 5), generate_random_walk(1.0, 0.001, 10'000, 6));
  EXPECT_THROW(generate_random_walk(0.0, 0.01, 10, 0), ConfigError);
  EXPECT_THROW(generate_random_walk(1.0, 1.0, 10, 0), ConfigError);
  EXPECT_THROW(generate_random_walk(1.0, 0.01, 0, 0), ConfigError);
}

// With step == delta every reversal of the step direction is a DC and every
// continuation after the first DC is one OS.
TEST(GenerateRandomWalk, UnitStepWalkMatchesCombinatorialCount) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double step = 0.004;
    const auto ticks = generate_random_walk(100.0, step, 20'000, seed);
    std::size_t expected_dc = 0;
    std::size_t expected_os = 0;
    bool prev_up = true;  // runner starts in Up mode
    for (std::size_t i = 1; i < ticks.size(); ++i) {
      const bool up = ticks[i].price > ticks[i - 1].price;
      if (up != prev_up) {
        ++expected_dc;
      } else if (expected_dc > 0) {
        ++expected_os;
      }
      prev_up = up;
    }
    const auto events = process(ticks, {step, MoveConvention::LogReturn}, Mode::Up);
    const auto dc = std::count_if(events.begin(), events.end(),
                                  [](const auto& e) { return e.kind == EventKind::DirectionalChange; });
    EXPECT_EQ(static_cast<std::size_t>(dc), expected_dc) << "seed " << seed;
    EXPECT_EQ(events.size() - static_cast<std::size_t>(dc), expected_os) << "seed " << seed;
  }
}

}  // namespace
}  // namespace itime
