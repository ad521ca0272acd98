#include "mrim/rrset.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mrim/spread.hpp"
#include "test_support.hpp"

namespace mrim {
namespace {

using testing::chain;
using testing::make_schedule;
using testing::random_graph_m;
using testing::random_schedule;
using testing::single_edge;

TEST(GenRR, DeterministicChain) {
  Graph g = single_edge(1.0);
  Rng rng(1);
  EXPECT_EQ(gen_rr(g, 1, rng).nodes, (std::vector<NodeId>{0, 1}));
  EXPECT_EQ(gen_rr(g, 0, rng).nodes, (std::vector<NodeId>{0}));
}

TEST(GenRR, ZeroProbabilityIsSingleton) {
  Graph g = testing::random_graph(8, 0.4, 0.0, 0.0, 3);
  Rng rng(2);
  for (NodeId v = 0; v < g.n(); ++v) EXPECT_EQ(gen_rr(g, v, rng).nodes, (std::vector<NodeId>{v}));
}

TEST(GenRR, BernoulliMembership) {
  Graph g = single_edge(0.5);
  Rng rng(5);
  const int draws = 100000;
  int contains = 0;
  for (int i = 0; i < draws; ++i) {
    Rng sub = rng.substream(i);
    auto rr = gen_rr(g, 1, sub);
    contains += static_cast<int>(rr.nodes.size() == 2);
  }
  const double se = std::sqrt(0.25 / draws);
  EXPECT_NEAR(contains / static_cast<double>(draws), 0.5, 3.0 * se);
}

TEST(GenRR, OnlyReverseReachableNodesAppear) {
  Graph g = random_graph_m(10, 18, 0.3, 0.9, 7);
  // reverse-reachable closure with all edges treated as present
  auto reverse_closure = [&](NodeId root) {
    std::vector<char> seen(g.n(), 0);
    std::vector<NodeId> stack{root};
    seen[root] = 1;
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      for (NodeId u : g.in_neighbors(v))
        if (!seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
    }
    return seen;
  };
  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    NodeId root = rng.below(g.n());
    auto closure = reverse_closure(root);
    Rng sub = rng.substream(rep);
    for (NodeId u : gen_rr(g, root, sub).nodes) EXPECT_TRUE(closure[u]);
  }
}

TEST(GenMultiRoundRR, DeterministicPairs) {
  Graph g = single_edge(1.0);
  Rng rng(1);
  auto set = gen_multi_round_rr(g, 1, 2, rng);
  ASSERT_EQ(set.per_round.size(), 2u);
  EXPECT_EQ(set.per_round[0], (std::vector<NodeId>{0, 1}));
  EXPECT_EQ(set.per_round[1], (std::vector<NodeId>{0, 1}));
}

TEST(GenMultiRoundRR, SingleRoundReduction) {
  Graph g = random_graph_m(6, 8, 0.2, 0.8, 13);
  Rng a(77), b(77);
  auto multi = gen_multi_round_rr(g, 3, 1, a);
  auto single = gen_rr(g, 3, b);
  ASSERT_EQ(multi.per_round.size(), 1u);
  EXPECT_EQ(multi.per_round[0], single.nodes);
}

TEST(GenMultiRoundRR, HitRateMatchesSpreadExact) {
  // rho(S) = n * P(S intersects the multi-round RR set)
  Graph g = random_graph_m(5, 6, 0.2, 0.8, 17);
  SeedSchedule sched = make_schedule({{0, 2}, {1}});
  const double exact = spread_exact(g, sched);
  Rng rng(19);
  const int draws = 100000;
  int hits = 0;
  for (int i = 0; i < draws; ++i) {
    Rng sub = rng.substream(i);
    NodeId root = sub.below(g.n());
    auto set = gen_multi_round_rr(g, root, sched.rounds(), sub);
    bool hit = false;
    for (std::uint32_t t = 1; t <= sched.rounds() && !hit; ++t)
      for (NodeId u : set.per_round[t - 1])
        if (sched.contains(u, t)) {
          hit = true;
          break;
        }
    hits += hit;
  }
  const double p = exact / g.n();
  const double se = g.n() * std::sqrt(p * (1 - p) / draws);
  EXPECT_NEAR(g.n() * hits / static_cast<double>(draws), exact, 3.0 * se + 1e-9);
}

TEST(RootPool, UniformChiSquare) {
  RootPool pool = RootPool::uniform(4);
  Rng rng(23);
  std::vector<int> counts(4, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[pool.sample(rng)];
  double chi2 = 0;
  for (int c : counts) {
    const double expected = draws / 4.0;
    chi2 += (c - expected) * (c - expected) / expected;
  }
  EXPECT_LT(chi2, 16.27);  // df=3, far tail
}

TEST(RootPool, UniformMinusANeverYieldsExcluded) {
  RootPool pool = RootPool::uniform_minus(6, std::vector<NodeId>{0, 3});
  Rng rng(29);
  for (int i = 0; i < 2000; ++i) {
    NodeId v = pool.sample(rng);
    EXPECT_NE(v, 0u);
    EXPECT_NE(v, 3u);
  }
}

TEST(RootPool, RemainingRootsProportional) {
  RootPool pool = RootPool::remaining({0, 0, 1});
  Rng rng(31);
  const int draws = 100000;
  int zeros = 0;
  for (int i = 0; i < draws; ++i) zeros += pool.sample(rng) == 0;
  const double se = std::sqrt((2.0 / 3) * (1.0 / 3) / draws);
  EXPECT_NEAR(zeros / static_cast<double>(draws), 2.0 / 3, 3.0 * se);
}

TEST(RootPool, EmptyPoolSignalsFallback) {
  RootPool pool = RootPool::remaining({});
  Rng rng(1);
  EXPECT_THROW(pool.sample(rng), EmptyRootPoolError);
}

TEST(ConditionalRR, FirstRoundNeverRejects) {
  Graph g = random_graph_m(6, 6, 0.2, 0.8, 37);
  Rng rng(41);
  for (int i = 0; i < 200; ++i) {
    Rng sub = rng.substream(i);
    EXPECT_TRUE(validate_conditional_rr(g, SeedSchedule(), sub.below(g.n()), 1, sub).has_value());
  }
}

TEST(ConditionalRR, DeterministicChainAlwaysRejected) {
  Graph g = single_edge(1.0);
  SeedSchedule prefix = make_schedule({{0}});
  Rng rng(43);
  for (int i = 0; i < 50; ++i) {
    Rng sub = rng.substream(i);
    EXPECT_FALSE(validate_conditional_rr(g, prefix, 1, 2, sub).has_value());
  }
}

TEST(ConditionalRR, EmptyPrefixAlwaysAccepts) {
  Graph g = random_graph_m(6, 6, 0.2, 0.8, 47);
  SeedSchedule prefix = make_schedule({{}});
  Rng rng(53);
  for (int i = 0; i < 200; ++i) {
    Rng sub = rng.substream(i);
    EXPECT_TRUE(validate_conditional_rr(g, prefix, sub.below(g.n()), 2, sub).has_value());
  }
}

TEST(ConditionalRR, MarginalIdentityMatchesExactOracle) {
  // n * E[I{prefix misses rounds 1..t-1} * I{S_t hits round t}]
  //   = rho(S^{t-1} u S_t) - rho(S^{t-1})
  Graph g = random_graph_m(5, 5, 0.2, 0.8, 59);
  SeedSchedule full = make_schedule({{0, 3}, {1}});
  const double marginal = spread_exact(g, full) - spread_exact(g, full.prefix(1));
  ConditionalRRSampler sampler(g, full.prefix(1), 2);
  Rng rng(61);
  const int draws = 100000;
  int accepted_hits = 0;
  for (int i = 0; i < draws; ++i) {
    Rng sub = rng.substream(i);
    NodeId root = sub.below(g.n());
    auto rr = sampler.sample(root, sub);
    if (!rr) continue;
    for (NodeId u : rr->nodes)
      if (full.contains(u, 2)) {
        ++accepted_hits;
        break;
      }
  }
  const double p = marginal / g.n();
  const double se = g.n() * std::sqrt(p * (1 - p) / draws);
  EXPECT_NEAR(g.n() * accepted_hits / static_cast<double>(draws), marginal, 3.0 * se + 1e-9);
}

TEST(ExcludedRootRR, WeightedIdentityMatchesExactOracle) {
  // sigma^{-A}(S) = (n - |A|) * P(S intersects RR set rooted in V \ A)
  Graph g = random_graph_m(6, 8, 0.2, 0.8, 67);
  std::vector<NodeId> excluded{1, 4};
  std::vector<NodeId> seeds{0, 2};
  const double exact = weighted_spread_exact(g, seeds, excluded);
  RootPool pool = RootPool::uniform_minus(g.n(), excluded);
  Rng rng(71);
  const int draws = 100000;
  int hits = 0;
  for (int i = 0; i < draws; ++i) {
    Rng sub = rng.substream(i);
    auto rr = gen_rr(g, pool.sample(sub), sub);
    for (NodeId u : rr.nodes)
      if (u == 0 || u == 2) {
        ++hits;
        break;
      }
  }
  const double scale = static_cast<double>(g.n() - excluded.size());
  const double p = exact / scale;
  const double se = scale * std::sqrt(p * (1 - p) / draws);
  EXPECT_NEAR(scale * hits / static_cast<double>(draws), exact, 3.0 * se + 1e-9);
}

TEST(RRDump, RoundTripsRandomCollections) {
  Graph g = random_graph_m(20, 40, 0.2, 0.8, 73);
  Rng rng(79);
  std::vector<MultiRoundRRSet> sets;
  for (int i = 0; i < 50; ++i) {
    Rng sub = rng.substream(i);
    sets.push_back(gen_multi_round_rr(g, sub.below(g.n()), 3, sub));
  }
  std::ostringstream out;
  dump_rr_collection(out, g.n(), 3, sets);
  std::istringstream in(out.str());
  NodeId n = 0;
  std::uint32_t T = 0;
  auto loaded = load_rr_collection(in, &n, &T);
  EXPECT_EQ(n, g.n());
  EXPECT_EQ(T, 3u);
  ASSERT_EQ(loaded.size(), sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    EXPECT_EQ(loaded[i].root, sets[i].root);
    EXPECT_EQ(loaded[i].per_round, sets[i].per_round);
  }
}

}  // namespace
}  // namespace mrim
