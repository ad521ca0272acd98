#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "mrim/spread.hpp"

namespace mrim {

namespace detail {

// Visits every size-k subset of 0..n-1.
inline void for_each_subset(NodeId n, std::uint32_t k,
                            const std::function<void(const std::vector<NodeId>&)>& visit) {
  std::vector<NodeId> pick;
  std::function<void(NodeId)> rec = [&](NodeId next) {
    if (pick.size() == k) {
      visit(pick);
      return;
    }
    if (n - next < k - pick.size()) return;
    for (NodeId v = next; v < n; ++v) {
      pick.push_back(v);
      rec(v + 1);
      pick.pop_back();
    }
  };
  rec(0);
}

}  // namespace detail

struct BruteForceResult {
  SeedSchedule schedule;
  double value = 0.0;
};

// Brute-force optimum of the non-adaptive problem: evaluates spread_exact on
// every feasible schedule with exactly k seeds per round. Independent of
// every selection algorithm; only usable on enumerable instances.
inline BruteForceResult opt_schedule_exact(const Graph& g, std::uint32_t T, std::uint32_t k) {
  if (k > g.n()) throw std::invalid_argument("k exceeds node count");
  std::vector<std::vector<NodeId>> subsets;
  detail::for_each_subset(g.n(), k, [&](const std::vector<NodeId>& s) { subsets.push_back(s); });

  BruteForceResult best;
  SeedSchedule current(T);
  std::function<void(std::uint32_t)> rec = [&](std::uint32_t t) {
    if (t > T) {
      double v = spread_exact(g, current);
      if (v > best.value + 1e-12) {
        best.value = v;
        best.schedule = current;
      }
      return;
    }
    for (const auto& s : subsets) {
      current.set_round(t, s);
      rec(t + 1);
    }
  };
  best.schedule = SeedSchedule(T);
  rec(1);
  return best;
}

// Optimal adaptive policy value by dynamic programming over the activated
// set: V(t, A) = max_S E_L[ V(t+1, A u Gamma(L, S)) ], V(T+1, A) = |A|.
inline double adaptive_opt_exact(const Graph& g, std::uint32_t T, std::uint32_t k) {
  if (k > g.n()) throw std::invalid_argument("k exceeds node count");
  detail::ExactCore core(g);
  const std::uint32_t m = core.edge_count();
  if (static_cast<std::uint64_t>(T) * m > kExactCoinCap)
    throw EnumerationCapError("instance too large for exact enumeration (T*m > 24)");
  const auto prob = core.prob_table(0, m);
  const std::size_t words = (g.n() + 63) / 64;

  std::vector<std::vector<NodeId>> subsets;
  detail::for_each_subset(g.n(), k, [&](const std::vector<NodeId>& s) { subsets.push_back(s); });
  struct SubsetBits {
    std::uint64_t endpoint_bits;
    std::vector<NodeId> loose;
  };
  std::vector<SubsetBits> subset_bits;
  subset_bits.reserve(subsets.size());
  for (const auto& s : subsets) {
    SubsetBits sb;
    sb.endpoint_bits = core.seed_bits(s, &sb.loose);
    subset_bits.push_back(std::move(sb));
  }

  std::unordered_map<detail::BitsKey, double, detail::BitsKeyHash> memo;
  std::function<double(std::uint32_t, const std::vector<std::uint64_t>&)> value =
      [&](std::uint32_t t, const std::vector<std::uint64_t>& bits) -> double {
    if (t > T) {
      double c = 0;
      for (auto w : bits) c += std::popcount(w);
      return c;
    }
    detail::BitsKey key{t, bits};
    if (auto it = memo.find(key); it != memo.end()) return it->second;

    double best = 0.0;
    for (std::size_t si = 0; si < subsets.size(); ++si) {
      KahanSum acc;
      for (std::uint32_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        if (prob[mask] == 0.0) continue;
        auto next = bits;
        std::uint64_t act = core.reach(mask, subset_bits[si].endpoint_bits);
        while (act) {
          int c = std::countr_zero(act);
          act &= act - 1;
          NodeId v = core.endpoint_node(c);
          next[v / 64] |= std::uint64_t{1} << (v % 64);
        }
        for (NodeId v : subset_bits[si].loose) next[v / 64] |= std::uint64_t{1} << (v % 64);
        acc.add(prob[mask] * value(t + 1, next));
      }
      if (acc.value() > best) best = acc.value();
    }
    memo.emplace(std::move(key), best);
    return best;
  };

  return value(1, std::vector<std::uint64_t>(words, 0));
}

}  // namespace mrim
