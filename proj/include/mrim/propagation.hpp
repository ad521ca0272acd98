#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "mrim/graph.hpp"
#include "mrim/rng.hpp"

namespace mrim {

// One realized live-edge graph: per-node list of live in-edges (the sampled
// triggering sets). live_out is derived at construction for forward walks.
struct LiveEdgeSample {
  std::vector<std::vector<NodeId>> live_in;
  std::vector<std::vector<NodeId>> live_out;
  std::uint64_t rng_seed = 0;

  static LiveEdgeSample from_live_in(std::vector<std::vector<NodeId>> in, std::uint64_t seed = 0) {
    LiveEdgeSample s;
    s.live_in = std::move(in);
    s.rng_seed = seed;
    s.live_out.resize(s.live_in.size());
    for (NodeId v = 0; v < s.live_in.size(); ++v)
      for (NodeId u : s.live_in[v]) s.live_out[u].push_back(v);
    return s;
  }
};

struct PropagationResult {
  std::vector<NodeId> activated;              // sorted
  std::vector<std::vector<NodeId>> per_step;  // frontier trace, optional
};

inline LiveEdgeSample sample_live_edges(const Graph& g, Rng& rng) {
  std::vector<std::vector<NodeId>> live(g.n());
  for (NodeId v = 0; v < g.n(); ++v) {
    auto srcs = g.in_neighbors(v);
    auto probs = g.in_probs(v);
    for (std::size_t i = 0; i < srcs.size(); ++i)
      if (rng.bernoulli(probs[i])) live[v].push_back(srcs[i]);
  }
  return LiveEdgeSample::from_live_in(std::move(live), rng.seed());
}

inline void check_seeds(const Graph& g, std::span<const NodeId> seeds) {
  for (NodeId s : seeds)
    if (s >= g.n()) throw std::out_of_range("seed id out of range");
}

// Exact reachable set from `seeds` in the live-edge graph (BFS).
inline PropagationResult forward_propagate(const Graph& g, const LiveEdgeSample& sample,
                                           std::span<const NodeId> seeds,
                                           bool record_steps = false) {
  check_seeds(g, seeds);
  PropagationResult result;
  std::vector<char> active(g.n(), 0);
  std::vector<NodeId> frontier;
  for (NodeId s : seeds) {
    if (!active[s]) {
      active[s] = 1;
      frontier.push_back(s);
      result.activated.push_back(s);
    }
  }
  if (record_steps) result.per_step.push_back(frontier);
  while (!frontier.empty()) {
    std::vector<NodeId> next;
    for (NodeId u : frontier) {
      for (NodeId v : sample.live_out[u]) {
        if (!active[v]) {
          active[v] = 1;
          next.push_back(v);
          result.activated.push_back(v);
        }
      }
    }
    if (record_steps && !next.empty()) result.per_step.push_back(next);
    frontier = std::move(next);
  }
  std::sort(result.activated.begin(), result.activated.end());
  return result;
}

// Forward diffusion with lazy coin flips: each out-edge coin is flipped at
// most once (when its source activates), which realizes the same live-edge
// distribution without materializing the sample.
inline PropagationResult simulate_round(const Graph& g, std::span<const NodeId> seeds, Rng& rng,
                                        bool record_steps = false) {
  check_seeds(g, seeds);
  PropagationResult result;
  std::vector<char> active(g.n(), 0);
  std::vector<NodeId> frontier;
  for (NodeId s : seeds) {
    if (!active[s]) {
      active[s] = 1;
      frontier.push_back(s);
      result.activated.push_back(s);
    }
  }
  if (record_steps) result.per_step.push_back(frontier);
  while (!frontier.empty()) {
    std::vector<NodeId> next;
    for (NodeId u : frontier) {
      auto nbrs = g.out_neighbors(u);
      auto probs = g.out_probs(u);
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        NodeId v = nbrs[i];
        if (!active[v] && rng.bernoulli(probs[i])) {
          active[v] = 1;
          next.push_back(v);
          result.activated.push_back(v);
        }
      }
    }
    if (record_steps && !next.empty()) result.per_step.push_back(next);
    frontier = std::move(next);
  }
  std::sort(result.activated.begin(), result.activated.end());
  return result;
}

// Reusable scratch for tight Monte-Carlo loops: stamped visit marks avoid
// clearing O(n) state per draw, and coins come from a stateless hash so any
// two runs that share a key see identical edge outcomes.
class DiffusionScratch {
 public:
  explicit DiffusionScratch(const Graph& g)
      : g_(&g), round_mark_(g.n(), 0), union_mark_(g.n(), 0) {}

  // Activates the reachable set of `seeds` under coins (coin key must be
  // unique per (draw, round)); returns nodes newly added to the union since
  // begin_union(). Nodes flagged in `excluded` are activated and marked but
  // not counted, which yields weighted (sigma^{-A}) counts.
  std::uint32_t run_round(std::span<const NodeId> seeds, CoinHash coins,
                          const char* excluded = nullptr) {
    ++round_stamp_;
    std::uint32_t newly = 0;
    frontier_.clear();
    for (NodeId s : seeds) {
      if (round_mark_[s] != round_stamp_) {
        round_mark_[s] = round_stamp_;
        frontier_.push_back(s);
        newly += touch_union(s, excluded);
      }
    }
    std::size_t head = 0;
    while (head < frontier_.size()) {
      NodeId u = frontier_[head++];
      auto nbrs = g_->out_neighbors(u);
      auto probs = g_->out_probs(u);
      EdgeId base = g_->out_index(u);
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        NodeId v = nbrs[i];
        if (round_mark_[v] != round_stamp_ && coins.flip(base + i, probs[i])) {
          round_mark_[v] = round_stamp_;
          frontier_.push_back(v);
          newly += touch_union(v, excluded);
        }
      }
    }
    return newly;
  }

  // Must be called before the first run_round of every multi-round draw.
  void begin_union() {
    ++union_stamp_;
    union_size_ = 0;
  }

  // Nodes activated in at least one round since begin_union().
  std::uint32_t union_size() const { return union_size_; }

  bool in_union(NodeId v) const { return union_mark_[v] == union_stamp_; }

 private:
  std::uint32_t touch_union(NodeId v, const char* excluded) {
    if (union_mark_[v] == union_stamp_) return 0;
    union_mark_[v] = union_stamp_;
    if (excluded && excluded[v]) return 0;
    ++union_size_;
    return 1;
  }

  const Graph* g_;
  std::vector<std::uint64_t> round_mark_, union_mark_;
  std::uint64_t round_stamp_ = 0, union_stamp_ = 0;
  std::uint32_t union_size_ = 0;
  std::vector<NodeId> frontier_;
};

}  // namespace mrim
