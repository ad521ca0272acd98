#include "mrim/propagation.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "test_support.hpp"

namespace mrim {
namespace {

using testing::chain;
using testing::hub_plus_isolated;
using testing::random_graph;
using testing::single_edge;

TEST(SampleLiveEdges, AllZeroProbability) {
  Graph g = random_graph(10, 0.3, 0.0, 0.0, 1);
  Rng rng(5);
  auto sample = sample_live_edges(g, rng);
  for (const auto& in : sample.live_in) EXPECT_TRUE(in.empty());
}

TEST(SampleLiveEdges, AllOneProbability) {
  Graph g = random_graph(10, 0.3, 1.0, 1.0, 2);
  Rng rng(5);
  auto sample = sample_live_edges(g, rng);
  for (NodeId v = 0; v < g.n(); ++v) {
    auto expected = g.in_neighbors(v);
    ASSERT_EQ(sample.live_in[v].size(), expected.size());
    EXPECT_TRUE(std::equal(expected.begin(), expected.end(), sample.live_in[v].begin()));
  }
}

TEST(SampleLiveEdges, BernoulliFraction) {
  Graph g = single_edge(0.5);
  Rng rng(7);
  const int draws = 100000;
  int live = 0;
  for (int i = 0; i < draws; ++i) {
    Rng sub = rng.substream(i);
    auto sample = sample_live_edges(g, sub);
    live += static_cast<int>(!sample.live_in[1].empty());
  }
  const double se = std::sqrt(0.25 / draws);
  EXPECT_NEAR(live / static_cast<double>(draws), 0.5, 3.0 * se);
}

TEST(ForwardPropagate, ChainFullyLive) {
  Graph g = chain(3, 1.0);
  Rng rng(1);
  auto sample = sample_live_edges(g, rng);
  auto res = forward_propagate(g, sample, std::vector<NodeId>{0});
  EXPECT_EQ(res.activated, (std::vector<NodeId>{0, 1, 2}));
}

TEST(ForwardPropagate, EmptySeeds) {
  Graph g = chain(3, 1.0);
  Rng rng(1);
  auto sample = sample_live_edges(g, rng);
  auto res = forward_propagate(g, sample, std::vector<NodeId>{});
  EXPECT_TRUE(res.activated.empty());
}

TEST(ForwardPropagate, StarPartialLive) {
  Graph g = hub_plus_isolated();
  // only hub -> 1 live
  auto sample = LiveEdgeSample::from_live_in({{}, {0}, {}, {}, {}});
  auto res = forward_propagate(g, sample, std::vector<NodeId>{0});
  EXPECT_EQ(res.activated, (std::vector<NodeId>{0, 1}));
}

TEST(ForwardPropagate, SeedOutOfRange) {
  Graph g = chain(3, 1.0);
  Rng rng(1);
  auto sample = sample_live_edges(g, rng);
  EXPECT_THROW(forward_propagate(g, sample, std::vector<NodeId>{9}), std::out_of_range);
}

TEST(SimulateRound, DeterministicGraphIsExactReachability) {
  Graph g = hub_plus_isolated();
  Rng rng(3);
  auto res = simulate_round(g, std::vector<NodeId>{0}, rng);
  EXPECT_EQ(res.activated, (std::vector<NodeId>{0, 1, 2, 3}));
}

TEST(SimulateRound, ZeroProbabilityKeepsSeedsOnly) {
  Graph g = random_graph(8, 0.4, 0.0, 0.0, 9);
  Rng rng(3);
  auto res = simulate_round(g, std::vector<NodeId>{1, 4}, rng);
  EXPECT_EQ(res.activated, (std::vector<NodeId>{1, 4}));
}

TEST(SimulateRound, MeanActivationMatchesEnumeration) {
  Graph g = single_edge(0.5);
  Rng rng(11);
  const int draws = 100000;
  double total = 0;
  for (int i = 0; i < draws; ++i) {
    Rng sub = rng.substream(i);
    total += static_cast<double>(simulate_round(g, std::vector<NodeId>{0}, sub).activated.size());
  }
  const double se = std::sqrt(0.25 / draws);
  EXPECT_NEAR(total / draws, 1.5, 3.0 * se);
}

TEST(Propagation, MonotoneInSeeds) {
  Graph g = random_graph(15, 0.15, 0.2, 0.9, 17);
  Rng rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    Rng sub = rng.substream(rep);
    auto sample = sample_live_edges(g, sub);
    std::vector<NodeId> small{static_cast<NodeId>(sub.below(g.n()))};
    std::vector<NodeId> large = small;
    large.push_back(sub.below(g.n()));
    auto a = forward_propagate(g, sample, small).activated;
    auto b = forward_propagate(g, sample, large).activated;
    EXPECT_TRUE(std::includes(b.begin(), b.end(), a.begin(), a.end()));
  }
}

TEST(Propagation, ReachabilityFixpoint) {
  Graph g = random_graph(15, 0.15, 0.2, 0.9, 19);
  Rng rng(29);
  auto sample = sample_live_edges(g, rng);
  auto first = forward_propagate(g, sample, std::vector<NodeId>{0, 3});
  auto again = forward_propagate(g, sample, first.activated);
  EXPECT_EQ(first.activated, again.activated);
}

TEST(Propagation, DeterministicForSeed) {
  Graph g = random_graph(20, 0.2, 0.1, 0.9, 31);
  Rng a(555), b(555);
  auto ra = simulate_round(g, std::vector<NodeId>{2, 7}, a, true);
  auto rb = simulate_round(g, std::vector<NodeId>{2, 7}, b, true);
  EXPECT_EQ(ra.activated, rb.activated);
  EXPECT_EQ(ra.per_step, rb.per_step);
}

TEST(Propagation, ActivatedClosedUnderLiveEdges) {
  Graph g = random_graph(12, 0.25, 0.3, 0.8, 37);
  Rng rng(41);
  auto sample = sample_live_edges(g, rng);
  auto res = forward_propagate(g, sample, std::vector<NodeId>{1});
  for (NodeId u : res.activated)
    for (NodeId v : sample.live_out[u])
      EXPECT_TRUE(std::binary_search(res.activated.begin(), res.activated.end(), v));
}

TEST(DiffusionScratch, UnionAcrossRoundsMatchesSeparateRuns) {
  Graph g = random_graph(12, 0.25, 0.3, 0.8, 43);
  DiffusionScratch scratch(g);
  scratch.begin_union();
  std::uint32_t n1 = scratch.run_round(std::vector<NodeId>{0}, CoinHash{derive_seed(1, 1)});
  std::uint32_t n2 = scratch.run_round(std::vector<NodeId>{5}, CoinHash{derive_seed(1, 2)});
  EXPECT_EQ(scratch.union_size(), n1 + n2);
  EXPECT_TRUE(scratch.in_union(0));
  EXPECT_TRUE(scratch.in_union(5));
}

}  // namespace
}  // namespace mrim
