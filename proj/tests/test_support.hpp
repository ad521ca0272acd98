#pragma once

#include <vector>

#include "mrim/graph.hpp"
#include "mrim/rng.hpp"
#include "mrim/schedule.hpp"

namespace mrim::testing {

// a -> b -> c chain with uniform probability p, node ids 0,1,2,...
inline Graph chain(NodeId n, double p) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i + 1 < n; ++i) edges.push_back({i, static_cast<NodeId>(i + 1), p});
  return Graph::from_edges(n, std::move(edges), WeightScheme::from_file());
}

// Hub 0 -> {1,2,3} with p=1 plus isolated node 4. Optimal T=2,k=1 schedule
// is {(0,1),(4,2)} with spread 5.
inline Graph hub_plus_isolated() {
  return Graph::from_edges(5, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}}, WeightScheme::from_file());
}

inline Graph single_edge(double p) { return chain(2, p); }

inline Graph no_edges(NodeId n) { return Graph::from_edges(n, {}, WeightScheme::from_file()); }

// Random small digraph: every ordered pair kept with density, probabilities
// uniform in [p_lo, p_hi]. Deterministic in seed.
inline Graph random_graph(NodeId n, double density, double p_lo, double p_hi, std::uint64_t seed,
                          std::size_t max_edges = 1u << 20) {
  Rng rng(seed);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (u == v) continue;
      if (rng.uniform01() < density && edges.size() < max_edges) {
        double p = p_lo + (p_hi - p_lo) * rng.uniform01();
        edges.push_back({u, v, p});
      }
    }
  }
  return Graph::from_edges(n, std::move(edges), WeightScheme::from_file());
}

// Random small digraph with exactly m edges (sampled without replacement).
inline Graph random_graph_m(NodeId n, std::uint32_t m, double p_lo, double p_hi,
                            std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = 0; v < n; ++v)
      if (u != v) pairs.push_back({u, v});
  for (std::size_t i = pairs.size(); i > 1; --i)
    std::swap(pairs[i - 1], pairs[rng.below(static_cast<std::uint32_t>(i))]);
  if (m > pairs.size()) m = static_cast<std::uint32_t>(pairs.size());
  std::vector<Edge> edges;
  for (std::uint32_t i = 0; i < m; ++i) {
    double p = p_lo + (p_hi - p_lo) * rng.uniform01();
    edges.push_back({pairs[i].first, pairs[i].second, p});
  }
  return Graph::from_edges(n, std::move(edges), WeightScheme::from_file());
}

inline SeedSchedule make_schedule(std::initializer_list<std::vector<NodeId>> rounds) {
  SeedSchedule s(static_cast<std::uint32_t>(rounds.size()));
  std::uint32_t t = 1;
  for (const auto& r : rounds) s.set_round(t++, r);
  return s;
}

// Random schedule with up to k seeds per round, at least one seed total.
inline SeedSchedule random_schedule(NodeId n, std::uint32_t T, std::uint32_t k, Rng& rng) {
  SeedSchedule s(T);
  for (;;) {
    for (std::uint32_t t = 1; t <= T; ++t) {
      std::vector<NodeId> nodes;
      std::uint32_t size = rng.below(k + 1);
      for (std::uint32_t i = 0; i < size; ++i) nodes.push_back(rng.below(n));
      s.set_round(t, std::move(nodes));
    }
    if (s.total_seeds() > 0) return s;
  }
}

}  // namespace mrim::testing
