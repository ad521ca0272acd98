#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "mrim/graph.hpp"
#include "mrim/parallel.hpp"
#include "mrim/propagation.hpp"
#include "mrim/rng.hpp"
#include "mrim/schedule.hpp"
#include "mrim/stats.hpp"

namespace mrim {

// Joint live-edge configurations enumerated by the exact oracle are capped at
// 2^24; larger instances must use the Monte-Carlo estimators.
constexpr std::uint32_t kExactCoinCap = 24;

namespace detail {

// Machinery shared by the exact oracles: edges get fixed bit positions, and
// nodes incident to at least one edge are compacted into a <=48-bit space so
// a reachable set is a single word. Seeds that touch no edge can only ever
// activate themselves and are folded in as a constant.
class ExactCore {
 public:
  explicit ExactCore(const Graph& g) : g_(&g) {
    endpoint_of_.assign(g.n(), -1);
    for (NodeId u = 0; u < g.n(); ++u) {
      auto nbrs = g.out_neighbors(u);
      auto probs = g.out_probs(u);
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        int cu = intern(u), cv = intern(nbrs[i]);
        adj_.resize(endpoints_.size());
        adj_[cu].push_back({static_cast<int>(edge_p_.size()), cv});
        edge_p_.push_back(probs[i]);
      }
    }
    adj_.resize(endpoints_.size());
  }

  std::uint32_t edge_count() const { return static_cast<std::uint32_t>(edge_p_.size()); }
  std::size_t endpoint_count() const { return endpoints_.size(); }
  NodeId endpoint_node(int c) const { return endpoints_[c]; }
  int endpoint_index(NodeId v) const { return endpoint_of_[v]; }

  // Seed bits over the compact space; non-endpoint seeds reported separately.
  std::uint64_t seed_bits(std::span<const NodeId> seeds, std::vector<NodeId>* loose = nullptr) const {
    std::uint64_t bits = 0;
    for (NodeId s : seeds) {
      int c = endpoint_of_.at(s);
      if (c >= 0) {
        bits |= std::uint64_t{1} << c;
      } else if (loose) {
        loose->push_back(s);
      }
    }
    return bits;
  }

  // Reachable compact set from seed_bits in the live-edge graph `mask`.
  std::uint64_t reach(std::uint32_t mask, std::uint64_t seed_bits) const {
    std::uint64_t act = seed_bits;
    int stack[64];
    int sp = 0;
    for (std::uint64_t rest = seed_bits; rest;) {
      int c = std::countr_zero(rest);
      rest &= rest - 1;
      stack[sp++] = c;
    }
    while (sp) {
      int u = stack[--sp];
      for (const auto& [bit, v] : adj_[u]) {
        if ((mask >> bit) & 1u) {
          std::uint64_t vb = std::uint64_t{1} << v;
          if (!(act & vb)) {
            act |= vb;
            stack[sp++] = v;
          }
        }
      }
    }
    return act;
  }

  // Probability of live-edge mask over edge bit range [first, first+count).
  std::vector<double> prob_table(std::uint32_t first, std::uint32_t count) const {
    std::vector<double> table{1.0};
    table.reserve(std::size_t{1} << count);
    for (std::uint32_t e = first; e < first + count; ++e) {
      const double p = edge_p_[e];
      const std::size_t half = table.size();
      table.resize(half * 2);
      for (std::size_t mask = 0; mask < half; ++mask) {
        table[half + mask] = table[mask] * p;
        table[mask] *= 1.0 - p;
      }
    }
    return table;
  }

 private:
  int intern(NodeId v) {
    if (endpoint_of_[v] < 0) {
      if (endpoints_.size() >= 64) throw EnumerationCapError("too many edge endpoints for exact oracle");
      endpoint_of_[v] = static_cast<int>(endpoints_.size());
      endpoints_.push_back(v);
    }
    return endpoint_of_[v];
  }

  const Graph* g_;
  std::vector<NodeId> endpoints_;
  std::vector<int> endpoint_of_;
  std::vector<std::vector<std::pair<int, int>>> adj_;  // compact u -> (edge bit, compact v)
  std::vector<double> edge_p_;
};

inline std::size_t distinct_count(std::vector<NodeId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v.size();
}

}  // namespace detail

// Exact rho(S): expected size of the union of per-round reachable sets,
// enumerating every joint live-edge configuration weighted by probability.
// Rounds with empty seed sets contribute nothing and are skipped, so the
// 2^(T*m) cap applies to rounds that actually seed.
inline double spread_exact(const Graph& g, const SeedSchedule& sched) {
  std::vector<std::span<const NodeId>> round_seeds;
  for (std::uint32_t t = 1; t <= sched.rounds(); ++t) {
    check_seeds(g, sched.round(t));
    if (!sched.round(t).empty()) round_seeds.push_back(sched.round(t));
  }
  if (round_seeds.empty()) return 0.0;

  detail::ExactCore core(g);
  const std::uint32_t m = core.edge_count();
  const std::uint32_t rounds = static_cast<std::uint32_t>(round_seeds.size());
  if (static_cast<std::uint64_t>(rounds) * m > kExactCoinCap)
    throw EnumerationCapError("instance too large for exact enumeration (T*m > 24)");

  // Seeds never reached by any edge always count, once, in the union.
  std::vector<NodeId> loose;
  std::vector<std::uint64_t> seed_bits(rounds);
  for (std::uint32_t t = 0; t < rounds; ++t) seed_bits[t] = core.seed_bits(round_seeds[t], &loose);
  const double constant = static_cast<double>(detail::distinct_count(std::move(loose)));

  KahanSum acc;
  if (rounds == 1) {
    // Stream the masks; probability comes from two half tables.
    const std::uint32_t lo_bits = m < 12 ? m : 12;
    const auto lo = core.prob_table(0, lo_bits);
    const auto hi = core.prob_table(lo_bits, m - lo_bits);
    const std::uint64_t total = std::uint64_t{1} << m;
    const std::uint32_t lo_mask = (1u << lo_bits) - 1;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      const double p = lo[mask & lo_mask] * hi[mask >> lo_bits];
      if (p == 0.0) continue;
      const auto act = core.reach(static_cast<std::uint32_t>(mask), seed_bits[0]);
      acc.add(p * (static_cast<double>(std::popcount(act)) + constant));
    }
    return acc.value();
  }

  const auto prob = core.prob_table(0, m);
  std::vector<std::vector<std::uint64_t>> reach(rounds);
  for (std::uint32_t t = 0; t < rounds; ++t) {
    reach[t].resize(std::size_t{1} << m);
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask)
      reach[t][mask] = core.reach(mask, seed_bits[t]);
  }

  const std::uint64_t total = std::uint64_t{1} << (rounds * m);
  const std::uint32_t round_mask = m ? (1u << m) - 1 : 0;
  for (std::uint64_t joint = 0; joint < total; ++joint) {
    double p = 1.0;
    std::uint64_t bits = 0;
    std::uint64_t rest = joint;
    for (std::uint32_t t = 0; t < rounds; ++t) {
      const std::uint32_t mask = static_cast<std::uint32_t>(rest & round_mask);
      rest >>= m;
      p *= prob[mask];
      bits |= reach[t][mask];
    }
    if (p == 0.0) continue;
    acc.add(p * (static_cast<double>(std::popcount(bits)) + constant));
  }
  return acc.value();
}

// Exact weighted single-round spread sigma^{-A}(S) = E[|Gamma(L,S) \ A|].
inline double weighted_spread_exact(const Graph& g, std::span<const NodeId> seeds,
                                    std::span<const NodeId> excluded) {
  check_seeds(g, seeds);
  if (seeds.empty()) return 0.0;
  detail::ExactCore core(g);
  const std::uint32_t m = core.edge_count();
  if (m > kExactCoinCap) throw EnumerationCapError("instance too large for exact enumeration");

  std::vector<NodeId> loose;
  const std::uint64_t bits = core.seed_bits(seeds, &loose);
  std::uint64_t excluded_bits = 0;
  std::vector<char> excluded_full(g.n(), 0);
  for (NodeId v : excluded) {
    excluded_full.at(v) = 1;
    int c = core.endpoint_index(v);
    if (c >= 0) excluded_bits |= std::uint64_t{1} << c;
  }
  double constant = 0.0;
  {
    std::vector<NodeId> kept;
    for (NodeId v : loose)
      if (!excluded_full[v]) kept.push_back(v);
    constant = static_cast<double>(detail::distinct_count(std::move(kept)));
  }

  const std::uint32_t lo_bits = m < 12 ? m : 12;
  const auto lo = core.prob_table(0, lo_bits);
  const auto hi = core.prob_table(lo_bits, m - lo_bits);
  const std::uint32_t lo_mask = (1u << lo_bits) - 1;
  KahanSum acc;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    const double p = lo[mask & lo_mask] * hi[mask >> lo_bits];
    if (p == 0.0) continue;
    const auto act = core.reach(static_cast<std::uint32_t>(mask), bits);
    acc.add(p * (static_cast<double>(std::popcount(act & ~excluded_bits)) + constant));
  }
  return acc.value();
}

inline double spread_exact_single(const Graph& g, std::span<const NodeId> seeds) {
  SeedSchedule s(1);
  s.set_round(1, {seeds.begin(), seeds.end()});
  return spread_exact(g, s);
}

namespace detail {

constexpr std::size_t kMcChunks = 64;
constexpr std::uint64_t kMinDrawsPerChunk = 256;

// Chunk layout depends only on r and draw j depends only on (seed, j), so
// the estimate is bit-identical for any worker count. Small r collapses to
// few chunks to keep per-call scratch setup cheap.
template <class PerDraw>
SpreadEstimate mc_estimate(const Graph& g, std::uint64_t r, int jobs, PerDraw&& per_draw) {
  if (r == 0) throw std::invalid_argument("simulation count must be >= 1");
  std::vector<Welford> acc(static_cast<std::size_t>(
      std::min<std::uint64_t>(kMcChunks, std::max<std::uint64_t>(1, r / kMinDrawsPerChunk + 1))));
  parallel_chunks(static_cast<std::size_t>(r), jobs, acc.size(),
                  [&](std::size_t chunk, std::size_t begin, std::size_t end) {
                    DiffusionScratch scratch(g);
                    Welford w;
                    for (std::size_t j = begin; j < end; ++j) w.add(per_draw(scratch, j));
                    acc[chunk] = w;
                  });
  Welford total;
  for (const auto& w : acc) total.merge(w);
  return SpreadEstimate::from(total);
}

}  // namespace detail

// Unbiased Monte-Carlo estimate of rho(S): r joint draws of T independent
// live-edge rounds.
inline SpreadEstimate spread_mc(const Graph& g, const SeedSchedule& sched, std::uint64_t r,
                                Rng rng, int jobs = 1) {
  for (std::uint32_t t = 1; t <= sched.rounds(); ++t) check_seeds(g, sched.round(t));
  const std::uint64_t base = rng.seed();
  return detail::mc_estimate(g, r, jobs, [&](DiffusionScratch& scratch, std::size_t j) {
    scratch.begin_union();
    const std::uint64_t draw_key = derive_seed(base, j);
    for (std::uint32_t t = 1; t <= sched.rounds(); ++t)
      scratch.run_round(sched.round(t), CoinHash{derive_seed(draw_key, t)});
    return static_cast<double>(scratch.union_size());
  });
}

inline SpreadEstimate weighted_spread_mc(const Graph& g, std::span<const NodeId> seeds,
                                         std::span<const NodeId> excluded, std::uint64_t r,
                                         Rng rng, int jobs = 1) {
  check_seeds(g, seeds);
  std::vector<char> excl(g.n(), 0);
  for (NodeId v : excluded) excl.at(v) = 1;
  const std::uint64_t base = rng.seed();
  return detail::mc_estimate(g, r, jobs, [&](DiffusionScratch& scratch, std::size_t j) {
    scratch.begin_union();
    return static_cast<double>(
        scratch.run_round(seeds, CoinHash{derive_seed(base, j)}, excl.data()));
  });
}

// Deterministic per-round decision rule: S_t = f(t, activated so far).
using DeterministicPolicyFn =
    std::function<std::vector<NodeId>(std::uint32_t t, const std::vector<NodeId>& activated)>;

namespace detail {

struct BitsKey {
  std::uint32_t t;
  std::vector<std::uint64_t> words;
  bool operator==(const BitsKey&) const = default;
};

struct BitsKeyHash {
  std::size_t operator()(const BitsKey& k) const {
    std::uint64_t h = mix64(k.t);
    for (auto w : k.words) h = mix64(h ^ w);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

// Exact expected utility f_avg of a deterministic policy: enumerates every
// joint live-edge realization, feeding the policy the accumulated activated
// set. Policies must depend on feedback only through (t, activated).
inline double adaptive_value_exact(const Graph& g, const DeterministicPolicyFn& policy,
                                   std::uint32_t T, std::uint32_t k) {
  detail::ExactCore core(g);
  const std::uint32_t m = core.edge_count();
  if (static_cast<std::uint64_t>(T) * m > kExactCoinCap)
    throw EnumerationCapError("instance too large for exact enumeration (T*m > 24)");
  const auto prob = core.prob_table(0, m);
  const std::size_t words = (g.n() + 63) / 64;

  std::unordered_map<detail::BitsKey, double, detail::BitsKeyHash> memo;
  auto activated_vec = [&](const std::vector<std::uint64_t>& bits) {
    std::vector<NodeId> out;
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t x = bits[w];
      while (x) {
        out.push_back(static_cast<NodeId>(w * 64 + std::countr_zero(x)));
        x &= x - 1;
      }
    }
    return out;
  };

  std::function<double(std::uint32_t, const std::vector<std::uint64_t>&)> value =
      [&](std::uint32_t t, const std::vector<std::uint64_t>& bits) -> double {
    if (t > T) {
      double c = 0;
      for (auto w : bits) c += std::popcount(w);
      return c;
    }
    detail::BitsKey key{t, bits};
    if (auto it = memo.find(key); it != memo.end()) return it->second;

    const auto activated = activated_vec(bits);
    std::vector<NodeId> seeds = policy(t, activated);
    if (seeds.size() > k) throw std::invalid_argument("policy exceeded per-round budget");
    check_seeds(g, seeds);
    std::vector<NodeId> loose;
    const std::uint64_t sbits = core.seed_bits(seeds, &loose);

    KahanSum acc;
    for (std::uint32_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
      if (prob[mask] == 0.0) continue;
      auto next = bits;
      std::uint64_t act = core.reach(mask, sbits);
      while (act) {
        int c = std::countr_zero(act);
        act &= act - 1;
        NodeId v = core.endpoint_node(c);
        next[v / 64] |= std::uint64_t{1} << (v % 64);
      }
      for (NodeId v : loose) next[v / 64] |= std::uint64_t{1} << (v % 64);
      acc.add(prob[mask] * value(t + 1, next));
    }
    memo.emplace(std::move(key), acc.value());
    return acc.value();
  };

  return value(1, std::vector<std::uint64_t>(words, 0));
}

}  // namespace mrim
