#include "mrim/spread.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "mrim/bruteforce.hpp"
#include "test_support.hpp"

namespace mrim {
namespace {

using testing::chain;
using testing::hub_plus_isolated;
using testing::make_schedule;
using testing::no_edges;
using testing::random_graph_m;
using testing::random_schedule;
using testing::single_edge;

TEST(SpreadExact, SingleEdgeSingleRound) {
  Graph g = single_edge(0.5);
  EXPECT_DOUBLE_EQ(spread_exact(g, make_schedule({{0}})), 1.5);
}

TEST(SpreadExact, SingleEdgeTwoRounds) {
  Graph g = single_edge(0.5);
  EXPECT_DOUBLE_EQ(spread_exact(g, make_schedule({{0}, {0}})), 1.75);
}

TEST(SpreadExact, EmptyScheduleIsZero) {
  Graph g = single_edge(0.5);
  EXPECT_DOUBLE_EQ(spread_exact(g, make_schedule({{}, {}})), 0.0);
}

TEST(SpreadExact, IsolatedSeedsCountOnce) {
  Graph g = no_edges(6);
  EXPECT_DOUBLE_EQ(spread_exact(g, make_schedule({{0, 1}, {1, 2}})), 3.0);
}

TEST(SpreadExact, HubPlusIsolatedOptimum) {
  Graph g = hub_plus_isolated();
  EXPECT_DOUBLE_EQ(spread_exact(g, make_schedule({{0}, {4}})), 5.0);
  EXPECT_DOUBLE_EQ(spread_exact(g, make_schedule({{0}, {0}})), 4.0);
}

TEST(SpreadExact, RoundSymmetry) {
  Graph g = random_graph_m(6, 6, 0.1, 0.9, 51);
  SeedSchedule s = make_schedule({{0, 2}, {1}});
  SeedSchedule swapped = make_schedule({{1}, {0, 2}});
  EXPECT_NEAR(spread_exact(g, s), spread_exact(g, swapped), 1e-12);
}

TEST(SpreadExact, CapEnforced) {
  Graph g = random_graph_m(8, 13, 0.1, 0.9, 53);
  EXPECT_THROW(spread_exact(g, make_schedule({{0}, {1}})), EnumerationCapError);
  EXPECT_NO_THROW(spread_exact(g, make_schedule({{0}})));
}

TEST(SpreadExact, MonotoneAndSubmodularExhaustive) {
  // All schedules over the (v,t) lattice, checked pairwise on tiny graphs.
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    Graph g = random_graph_m(4, 5, 0.1, 0.9, seed);
    const std::uint32_t T = 2;
    const std::uint32_t items = g.n() * T;
    std::vector<double> value(1u << items, 0.0);
    auto schedule_of = [&](std::uint32_t bits) {
      SeedSchedule s(T);
      for (std::uint32_t i = 0; i < items; ++i)
        if ((bits >> i) & 1u) s.add(i % g.n(), i / g.n() + 1);
      return s;
    };
    for (std::uint32_t bits = 0; bits < (1u << items); ++bits)
      value[bits] = spread_exact(g, schedule_of(bits));

    for (std::uint32_t b = 0; b < (1u << items); ++b) {
      // enumerate strict subsets a of b
      for (std::uint32_t a = b; ; a = (a - 1) & b) {
        EXPECT_LE(value[a], value[b] + 1e-9);
        for (std::uint32_t i = 0; i < items; ++i) {
          if ((b >> i) & 1u) continue;
          const std::uint32_t bit = 1u << i;
          EXPECT_GE(value[a | bit] - value[a], value[b | bit] - value[b] - 1e-9);
        }
        if (a == 0) break;
      }
    }
  }
}

TEST(SpreadMc, DeterministicGraphHasZeroStderr) {
  Graph g = hub_plus_isolated();
  auto est = spread_mc(g, make_schedule({{0}, {4}}), 50, Rng(1));
  EXPECT_DOUBLE_EQ(est.mean, 5.0);
  EXPECT_DOUBLE_EQ(est.stderr_mean, 0.0);
}

TEST(SpreadMc, MatchesExactWithinThreeStderr) {
  Graph g = single_edge(0.5);
  auto est = spread_mc(g, make_schedule({{0}, {0}}), 100000, Rng(5));
  EXPECT_NEAR(est.mean, 1.75, 3.0 * est.stderr_mean);
}

TEST(SpreadMc, SingleDrawStderrSentinel) {
  Graph g = single_edge(0.5);
  auto est = spread_mc(g, make_schedule({{0}}), 1, Rng(5));
  EXPECT_FALSE(est.ci_defined());
  EXPECT_TRUE(std::isinf(est.stderr_mean));
}

TEST(SpreadMc, ConvergesOnRandomEnumerableInstances) {
  Rng rng(77);
  for (int i = 0; i < 5; ++i) {
    Graph g = random_graph_m(5, 5, 0.1, 0.9, 100 + i);
    Rng sub = rng.substream(i);
    SeedSchedule s = random_schedule(g.n(), 2, 2, sub);
    double exact = spread_exact(g, s);
    auto est = spread_mc(g, s, 20000, rng.substream(1000 + i));
    double tol = 3.0 * est.stderr_mean + 1e-9;
    EXPECT_NEAR(est.mean, exact, tol) << "instance " << i;
  }
}

TEST(SpreadMc, JobsDoNotChangeResult) {
  Graph g = random_graph_m(30, 80, 0.05, 0.5, 61);
  SeedSchedule s = make_schedule({{0, 5, 9}, {1}});
  auto a = spread_mc(g, s, 5000, Rng(9), 1);
  auto b = spread_mc(g, s, 5000, Rng(9), 4);
  EXPECT_DOUBLE_EQ(a.mean, b.mean);
  EXPECT_DOUBLE_EQ(a.stderr_mean, b.stderr_mean);
}

TEST(WeightedSpread, ExcludedTargetNotCounted) {
  Graph g = single_edge(1.0);
  auto est = weighted_spread_mc(g, std::vector<NodeId>{0}, std::vector<NodeId>{1}, 100, Rng(2));
  EXPECT_DOUBLE_EQ(est.mean, 1.0);
  EXPECT_DOUBLE_EQ(weighted_spread_exact(g, std::vector<NodeId>{0}, std::vector<NodeId>{1}), 1.0);
}

TEST(WeightedSpread, EmptyExclusionEqualsSingleRoundSpread) {
  Graph g = random_graph_m(6, 7, 0.1, 0.9, 57);
  std::vector<NodeId> seeds{0, 3};
  EXPECT_NEAR(weighted_spread_exact(g, seeds, {}), spread_exact_single(g, seeds), 1e-12);
  auto est = weighted_spread_mc(g, seeds, {}, 20000, Rng(3));
  EXPECT_NEAR(est.mean, spread_exact_single(g, seeds), 3.0 * est.stderr_mean + 1e-9);
}

TEST(WeightedSpread, SeedsInsideExclusionZeroProbability) {
  Graph g = testing::random_graph(5, 0.3, 0.0, 0.0, 3);
  auto est = weighted_spread_mc(g, std::vector<NodeId>{1, 2}, std::vector<NodeId>{1, 2}, 100, Rng(4));
  EXPECT_DOUBLE_EQ(est.mean, 0.0);
}

TEST(WeightedSpread, ExactMatchesMc) {
  Graph g = random_graph_m(6, 8, 0.2, 0.8, 59);
  std::vector<NodeId> seeds{0, 4};
  std::vector<NodeId> excluded{1, 2};
  double exact = weighted_spread_exact(g, seeds, excluded);
  auto est = weighted_spread_mc(g, seeds, excluded, 50000, Rng(6));
  EXPECT_NEAR(est.mean, exact, 3.0 * est.stderr_mean + 1e-9);
}

TEST(AdaptiveValueExact, DeterministicGraphSingleTrajectory) {
  Graph g = hub_plus_isolated();
  DeterministicPolicyFn policy = [](std::uint32_t t, const std::vector<NodeId>&) {
    return t == 1 ? std::vector<NodeId>{0} : std::vector<NodeId>{4};
  };
  EXPECT_DOUBLE_EQ(adaptive_value_exact(g, policy, 2, 1), 5.0);
}

TEST(AdaptiveValueExact, ZeroProbabilityCountsDistinctSeeds) {
  Graph g = no_edges(6);
  DeterministicPolicyFn policy = [](std::uint32_t t, const std::vector<NodeId>&) {
    return t == 1 ? std::vector<NodeId>{0, 1} : std::vector<NodeId>{1, 2};
  };
  EXPECT_DOUBLE_EQ(adaptive_value_exact(g, policy, 2, 2), 3.0);
}

TEST(AdaptiveValueExact, FixedPolicyMatchesSpreadExact) {
  // A policy that ignores feedback realizes the non-adaptive spread.
  Graph g = random_graph_m(5, 6, 0.2, 0.8, 63);
  SeedSchedule s = make_schedule({{0, 2}, {1}});
  DeterministicPolicyFn policy = [&](std::uint32_t t, const std::vector<NodeId>&) {
    return s.round(t);
  };
  EXPECT_NEAR(adaptive_value_exact(g, policy, 2, 2), spread_exact(g, s), 1e-9);
}

TEST(AdaptiveValueExact, BudgetViolationRejected) {
  Graph g = no_edges(4);
  DeterministicPolicyFn policy = [](std::uint32_t, const std::vector<NodeId>&) {
    return std::vector<NodeId>{0, 1, 2};
  };
  EXPECT_THROW(adaptive_value_exact(g, policy, 1, 2), std::invalid_argument);
}

TEST(BruteForce, OptScheduleOnHubGraph) {
  Graph g = hub_plus_isolated();
  auto opt = opt_schedule_exact(g, 2, 1);
  EXPECT_DOUBLE_EQ(opt.value, 5.0);
}

TEST(BruteForce, AdaptiveOptAtLeastNonAdaptiveOpt) {
  for (std::uint64_t seed : {71u, 72u, 73u}) {
    Graph g = random_graph_m(4, 5, 0.2, 0.8, seed);
    auto non_adaptive = opt_schedule_exact(g, 2, 1);
    double adaptive = adaptive_opt_exact(g, 2, 1);
    EXPECT_GE(adaptive, non_adaptive.value - 1e-9);
  }
}

}  // namespace
}  // namespace mrim
