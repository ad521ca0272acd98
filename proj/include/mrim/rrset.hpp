#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "mrim/graph.hpp"
#include "mrim/rng.hpp"
#include "mrim/schedule.hpp"

namespace mrim {

// Nodes that reach `root` in one sampled live-edge graph; sorted, includes
// the root.
struct RRSet {
  NodeId root = 0;
  std::vector<NodeId> nodes;
};

// T independent per-round RR sets from one root (pair notation view:
// {(u, t) : u in per_round[t-1]}).
struct MultiRoundRRSet {
  NodeId root = 0;
  std::vector<std::vector<NodeId>> per_round;

  std::size_t entry_count() const {
    std::size_t s = 0;
    for (const auto& r : per_round) s += r.size();
    return s;
  }
};

// Reverse BFS with stamped visit marks; each in-edge coin is flipped at most
// once per generated set.
class RRGenerator {
 public:
  explicit RRGenerator(const Graph& g) : g_(&g), mark_(g.n(), 0) {}

  void generate(NodeId root, Rng& rng, std::vector<NodeId>& out) {
    if (root >= g_->n()) throw std::out_of_range("root id out of range");
    ++stamp_;
    out.clear();
    out.push_back(root);
    mark_[root] = stamp_;
    std::size_t head = 0;
    while (head < out.size()) {
      NodeId v = out[head++];
      auto srcs = g_->in_neighbors(v);
      auto probs = g_->in_probs(v);
      for (std::size_t i = 0; i < srcs.size(); ++i) {
        NodeId u = srcs[i];
        if (mark_[u] != stamp_ && rng.bernoulli(probs[i])) {
          mark_[u] = stamp_;
          out.push_back(u);
        }
      }
    }
    std::sort(out.begin(), out.end());
  }

 private:
  const Graph* g_;
  std::vector<std::uint64_t> mark_;
  std::uint64_t stamp_ = 0;
};

inline RRSet gen_rr(const Graph& g, NodeId root, Rng& rng) {
  RRGenerator gen(g);
  RRSet set;
  set.root = root;
  gen.generate(root, rng, set.nodes);
  return set;
}

inline MultiRoundRRSet gen_multi_round_rr(const Graph& g, NodeId root, std::uint32_t T, Rng& rng) {
  RRGenerator gen(g);
  MultiRoundRRSet set;
  set.root = root;
  set.per_round.resize(T);
  for (std::uint32_t t = 0; t < T; ++t) gen.generate(root, rng, set.per_round[t]);
  return set;
}

// Signals that a RemainingRoots pool ran dry (every RR set of the previous
// round was covered); callers fall back to uniform roots.
struct EmptyRootPoolError : std::runtime_error {
  EmptyRootPoolError() : std::runtime_error("root pool is empty") {}
};

// Candidate-root multiset. RemainingRoots keeps repetitions, so repeated
// roots are proportionally more likely to be drawn.
class RootPool {
 public:
  enum class Origin { UniformV, UniformMinusA, RemainingRoots };

  static RootPool uniform(NodeId n) {
    RootPool p;
    p.origin_ = Origin::UniformV;
    p.n_ = n;
    return p;
  }

  static RootPool uniform_minus(NodeId n, std::span<const NodeId> excluded) {
    RootPool p;
    p.origin_ = Origin::UniformMinusA;
    std::vector<char> out(n, 0);
    for (NodeId v : excluded) out.at(v) = 1;
    for (NodeId v = 0; v < n; ++v)
      if (!out[v]) p.pool_.push_back(v);
    return p;
  }

  static RootPool remaining(std::vector<NodeId> multiset) {
    RootPool p;
    p.origin_ = Origin::RemainingRoots;
    p.pool_ = std::move(multiset);
    return p;
  }

  Origin origin() const { return origin_; }

  std::size_t size() const { return origin_ == Origin::UniformV ? n_ : pool_.size(); }

  bool empty() const { return size() == 0; }

  NodeId sample(Rng& rng) const {
    if (empty()) throw EmptyRootPoolError();
    if (origin_ == Origin::UniformV) return rng.below(n_);
    return pool_[rng.below(static_cast<std::uint32_t>(pool_.size()))];
  }

 private:
  Origin origin_ = Origin::UniformV;
  NodeId n_ = 0;
  std::vector<NodeId> pool_;
};

// Rejection sampler realizing the conditional RR distribution for round t
// given the first t-1 seed sets: a draw is valid only when none of its
// rounds 1..t-1 RR sets intersects that round's seed set.
class ConditionalRRSampler {
 public:
  ConditionalRRSampler(const Graph& g, const SeedSchedule& prefix, std::uint32_t t)
      : gen_(g), t_(t) {
    if (t == 0) throw std::invalid_argument("round indices are 1-based");
    seed_mask_.resize(t - 1);
    for (std::uint32_t tau = 1; tau < t; ++tau) {
      seed_mask_[tau - 1].assign(g.n(), 0);
      if (tau <= prefix.rounds())
        for (NodeId v : prefix.round(tau)) seed_mask_[tau - 1].at(v) = 1;
    }
  }

  // nullopt signals rejection (distinct from errors, which throw).
  std::optional<RRSet> sample(NodeId root, Rng& rng) {
    for (std::uint32_t tau = 1; tau < t_; ++tau) {
      gen_.generate(root, rng, scratch_);
      for (NodeId u : scratch_)
        if (seed_mask_[tau - 1][u]) return std::nullopt;
    }
    RRSet set;
    set.root = root;
    gen_.generate(root, rng, set.nodes);
    return set;
  }

 private:
  RRGenerator gen_;
  std::uint32_t t_;
  std::vector<std::vector<char>> seed_mask_;
  std::vector<NodeId> scratch_;
};

inline std::optional<RRSet> validate_conditional_rr(const Graph& g, const SeedSchedule& prefix,
                                                    NodeId root, std::uint32_t t, Rng& rng) {
  ConditionalRRSampler sampler(g, prefix, t);
  return sampler.sample(root, rng);
}

namespace detail {

inline void write_varint(std::ostream& out, std::uint64_t x) {
  while (x >= 0x80) {
    out.put(static_cast<char>((x & 0x7f) | 0x80));
    x >>= 7;
  }
  out.put(static_cast<char>(x));
}

inline std::uint64_t read_varint(std::istream& in) {
  std::uint64_t x = 0;
  int shift = 0;
  for (;;) {
    int c = in.get();
    if (c == EOF) throw ParseError("truncated varint in RR dump");
    x |= static_cast<std::uint64_t>(c & 0x7f) << shift;
    if (!(c & 0x80)) return x;
    shift += 7;
    if (shift > 63) throw ParseError("varint overflow in RR dump");
  }
}

}  // namespace detail

// Debug dump of an RR collection; not a stability-guaranteed format.
// Header (n, T, count), then per set the root and delta-varint sorted ids.
inline void dump_rr_collection(std::ostream& out, NodeId n, std::uint32_t T,
                               std::span<const MultiRoundRRSet> sets) {
  out.write("MRRR", 4);
  detail::write_varint(out, 1);  // version
  detail::write_varint(out, n);
  detail::write_varint(out, T);
  detail::write_varint(out, sets.size());
  for (const auto& set : sets) {
    detail::write_varint(out, set.root);
    for (std::uint32_t t = 0; t < T; ++t) {
      const auto& nodes = set.per_round.at(t);
      detail::write_varint(out, nodes.size());
      NodeId prev = 0;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        detail::write_varint(out, i == 0 ? nodes[0] : nodes[i] - prev);
        prev = nodes[i];
      }
    }
  }
}

inline std::vector<MultiRoundRRSet> load_rr_collection(std::istream& in, NodeId* n_out = nullptr,
                                                       std::uint32_t* t_out = nullptr) {
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::string_view(magic, 4) != "MRRR")
    throw ParseError("bad RR dump magic");
  if (detail::read_varint(in) != 1) throw ParseError("unsupported RR dump version");
  const NodeId n = static_cast<NodeId>(detail::read_varint(in));
  const std::uint32_t T = static_cast<std::uint32_t>(detail::read_varint(in));
  const std::uint64_t count = detail::read_varint(in);
  if (n_out) *n_out = n;
  if (t_out) *t_out = T;
  std::vector<MultiRoundRRSet> sets(count);
  for (auto& set : sets) {
    set.root = static_cast<NodeId>(detail::read_varint(in));
    set.per_round.resize(T);
    for (std::uint32_t t = 0; t < T; ++t) {
      const std::uint64_t size = detail::read_varint(in);
      auto& nodes = set.per_round[t];
      nodes.resize(size);
      NodeId prev = 0;
      for (std::uint64_t i = 0; i < size; ++i) {
        prev = (i == 0 ? 0 : prev) + static_cast<NodeId>(detail::read_varint(in));
        nodes[i] = prev;
        if (prev >= n) throw ParseError("node id out of range in RR dump");
      }
    }
  }
  return sets;
}

}  // namespace mrim
