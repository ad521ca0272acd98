#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "mrim/spread.hpp"

namespace mrim {

struct GreedyConfig {
  std::uint32_t k = 1;
  std::uint32_t T = 1;
  std::uint64_t r = 10000;  // simulations per spread estimate
  std::uint64_t seed = 0;
  bool use_lazy = true;  // CELF; selection-identical to plain greedy under an exact evaluator
  int jobs = 1;

  void validate(const Graph& g) const {
    if (k == 0 || T == 0 || r == 0) throw std::invalid_argument("k, T, r must be >= 1");
    if (k > g.n()) throw std::invalid_argument("per-round budget exceeds node count");
  }
};

// Schedule value under a named evaluation stream. Monte-Carlo evaluators use
// the stream for common random numbers; exact evaluators ignore it.
using ScheduleValueFn = std::function<double(const SeedSchedule&, std::uint64_t stream)>;

// Node-set value with a fixed exclusion baked in (sigma^{-A}).
using NodeSetValueFn = std::function<double(const std::vector<NodeId>&, std::uint64_t stream)>;

inline ScheduleValueFn make_mc_schedule_evaluator(const Graph& g, std::uint64_t r, int jobs = 1) {
  return [&g, r, jobs](const SeedSchedule& s, std::uint64_t stream) {
    if (s.total_seeds() == 0) return 0.0;
    return spread_mc(g, s, r, Rng(stream), jobs).mean;
  };
}

inline ScheduleValueFn make_exact_schedule_evaluator(const Graph& g) {
  return [&g](const SeedSchedule& s, std::uint64_t) { return spread_exact(g, s); };
}

inline NodeSetValueFn make_mc_weighted_evaluator(const Graph& g, std::vector<NodeId> excluded,
                                                 std::uint64_t r, int jobs = 1) {
  return [&g, excluded = std::move(excluded), r, jobs](const std::vector<NodeId>& seeds,
                                                       std::uint64_t stream) {
    if (seeds.empty()) return 0.0;
    return weighted_spread_mc(g, seeds, excluded, r, Rng(stream), jobs).mean;
  };
}

inline NodeSetValueFn make_exact_weighted_evaluator(const Graph& g, std::vector<NodeId> excluded) {
  return [&g, excluded = std::move(excluded)](const std::vector<NodeId>& seeds, std::uint64_t) {
    return weighted_spread_exact(g, seeds, excluded);
  };
}

struct GreedyStats {
  std::size_t steps = 0;
  std::size_t total_evaluations = 0;
  std::size_t max_evaluations_per_step = 0;
};

struct GreedyResult {
  SeedSchedule schedule;
  double value = 0.0;  // evaluator's estimate of the final schedule
  GreedyStats stats;
};

namespace detail {

struct LazyEntry {
  double gain;
  NodeId node;
  std::uint32_t round;
  std::uint64_t stamp;  // selection step at which `gain` was computed
};

// Max-heap order: higher gain first; ties by lower node id, then lower
// round. With cached gains being upper bounds (submodularity), selecting
// only when the top entry is fresh reproduces plain greedy exactly,
// including tie-breaks: any equal-gain entry with a better tie-break sorts
// above the fresh top and is refreshed first.
struct LazyOrder {
  bool operator()(const LazyEntry& a, const LazyEntry& b) const {
    if (a.gain != b.gain) return a.gain < b.gain;
    if (a.node != b.node) return a.node > b.node;
    return a.round > b.round;
  }
};

using LazyQueue = std::priority_queue<LazyEntry, std::vector<LazyEntry>, LazyOrder>;

// Evaluates every candidate's gain in parallel. Safe because evaluations use
// common random numbers keyed by candidate-independent streams; results do
// not depend on evaluation order. gain_of must be callable concurrently.
template <class GainFn>
inline void parallel_gains(std::vector<LazyEntry>& entries, const GainFn& gain_of, int jobs) {
  parallel_chunks(entries.size(), jobs, std::max<std::size_t>(1, entries.size() / 8),
                  [&](std::size_t, std::size_t b, std::size_t e) {
                    for (std::size_t i = b; i < e; ++i)
                      entries[i].gain = gain_of(entries[i].node, entries[i].round);
                  });
}

}  // namespace detail

// Cross-round greedy: k*T steps, each scanning all remaining (v,t) pairs for
// the best estimated spread gain; a round leaves the candidate pool once it
// holds k seeds.
inline GreedyResult cr_greedy(const Graph& g, const GreedyConfig& cfg,
                              ScheduleValueFn evaluate = {}) {
  cfg.validate(g);
  if (!evaluate) evaluate = make_mc_schedule_evaluator(g, cfg.r, cfg.jobs);

  GreedyResult result;
  result.schedule = SeedSchedule(cfg.T);
  std::vector<std::uint32_t> picked_in_round(cfg.T + 1, 0);
  detail::LazyQueue queue;
  bool queue_seeded = false;

  auto collect_candidates = [&](std::uint64_t stamp) {
    std::vector<detail::LazyEntry> entries;
    for (std::uint32_t t = 1; t <= cfg.T; ++t) {
      if (picked_in_round[t] >= cfg.k) continue;
      for (NodeId v = 0; v < g.n(); ++v)
        if (!result.schedule.contains(v, t)) entries.push_back({0.0, v, t, stamp});
    }
    return entries;
  };

  const std::uint64_t total_steps = static_cast<std::uint64_t>(cfg.k) * cfg.T;
  for (std::uint64_t step = 1; step <= total_steps; ++step) {
    const std::uint64_t stream = derive_seed(cfg.seed, step);
    const double base = step == 1 ? 0.0 : evaluate(result.schedule, stream);
    std::size_t evals = 0;
    auto gain_of = [&](NodeId v, std::uint32_t t) {
      SeedSchedule candidate = result.schedule;
      candidate.add(v, t);
      return evaluate(candidate, stream) - base;
    };

    detail::LazyEntry chosen{};
    if (cfg.use_lazy) {
      if (!queue_seeded) {
        auto entries = collect_candidates(step);
        detail::parallel_gains(entries, gain_of, cfg.jobs);
        evals += entries.size();
        for (const auto& e : entries) queue.push(e);
        queue_seeded = true;
      }
      for (;;) {
        detail::LazyEntry top = queue.top();
        queue.pop();
        if (picked_in_round[top.round] >= cfg.k ||
            result.schedule.contains(top.node, top.round))
          continue;
        if (top.stamp == step) {
          chosen = top;
          break;
        }
        top.gain = gain_of(top.node, top.round);
        ++evals;
        top.stamp = step;
        queue.push(top);
      }
    } else {
      auto entries = collect_candidates(step);
      detail::parallel_gains(entries, gain_of, cfg.jobs);
      evals += entries.size();
      bool have = false;
      for (const auto& e : entries) {
        if (!have || detail::LazyOrder{}(chosen, e)) {
          chosen = e;
          have = true;
        }
      }
    }

    // Always select the max, even on a non-positive estimate: the algorithm
    // places exactly k seeds per round.
    result.schedule.add(chosen.node, chosen.round);
    ++picked_in_round[chosen.round];
    ++result.stats.steps;
    result.stats.total_evaluations += evals;
    result.stats.max_evaluations_per_step = std::max(result.stats.max_evaluations_per_step, evals);
  }
  result.value = evaluate(result.schedule, derive_seed(cfg.seed, total_steps + 1));
  return result;
}

// Within-round greedy: rounds are finalized in order; round t's k seeds are
// picked greedily with rounds 1..t-1 held fixed.
inline GreedyResult wr_greedy(const Graph& g, const GreedyConfig& cfg,
                              ScheduleValueFn evaluate = {}) {
  cfg.validate(g);
  if (!evaluate) evaluate = make_mc_schedule_evaluator(g, cfg.r, cfg.jobs);

  GreedyResult result;
  result.schedule = SeedSchedule(cfg.T);
  std::uint64_t step = 0;
  for (std::uint32_t t = 1; t <= cfg.T; ++t) {
    detail::LazyQueue queue;
    bool queue_seeded = false;
    auto collect_candidates = [&](std::uint64_t stamp) {
      std::vector<detail::LazyEntry> entries;
      for (NodeId v = 0; v < g.n(); ++v)
        if (!result.schedule.contains(v, t)) entries.push_back({0.0, v, t, stamp});
      return entries;
    };

    for (std::uint32_t i = 0; i < cfg.k; ++i) {
      ++step;
      const std::uint64_t stream = derive_seed(cfg.seed, step);
      const double base = step == 1 ? 0.0 : evaluate(result.schedule, stream);
      std::size_t evals = 0;
      auto gain_of = [&](NodeId v, std::uint32_t) {
        SeedSchedule candidate = result.schedule;
        candidate.add(v, t);
        return evaluate(candidate, stream) - base;
      };

      detail::LazyEntry chosen{};
      if (cfg.use_lazy) {
        if (!queue_seeded) {
          auto entries = collect_candidates(step);
          detail::parallel_gains(entries, gain_of, cfg.jobs);
          evals += entries.size();
          for (const auto& e : entries) queue.push(e);
          queue_seeded = true;
        }
        for (;;) {
          detail::LazyEntry top = queue.top();
          queue.pop();
          if (result.schedule.contains(top.node, t)) continue;
          if (top.stamp == step) {
            chosen = top;
            break;
          }
          top.gain = gain_of(top.node, t);
          ++evals;
          top.stamp = step;
          queue.push(top);
        }
      } else {
        auto entries = collect_candidates(step);
        detail::parallel_gains(entries, gain_of, cfg.jobs);
        evals += entries.size();
        bool have = false;
        for (const auto& e : entries) {
          if (!have || detail::LazyOrder{}(chosen, e)) {
            chosen = e;
            have = true;
          }
        }
      }

      result.schedule.add(chosen.node, t);
      ++result.stats.steps;
      result.stats.total_evaluations += evals;
      result.stats.max_evaluations_per_step =
          std::max(result.stats.max_evaluations_per_step, evals);
    }
  }
  result.value = evaluate(result.schedule, derive_seed(cfg.seed, step + 1));
  return result;
}

// Weighted greedy (sigma^{-A}) used by AdaGreedy and the single-round
// baselines. Picks argmax while the best estimated gain is positive; once it
// is not, the remaining slots are filled with the lowest-id unused nodes.
// Returns nodes in selection order.
inline std::vector<NodeId> mc_greedy_weighted(const Graph& g, std::uint32_t k,
                                              const NodeSetValueFn& evaluate, std::uint64_t seed,
                                              GreedyStats* stats = nullptr, bool use_lazy = true,
                                              int jobs = 1) {
  if (k > g.n()) throw std::invalid_argument("budget exceeds node count");
  std::vector<NodeId> selected;
  std::vector<char> in_selected(g.n(), 0);
  detail::LazyQueue queue;
  bool queue_seeded = false;
  auto collect_candidates = [&](std::uint64_t stamp) {
    std::vector<detail::LazyEntry> entries;
    for (NodeId v = 0; v < g.n(); ++v)
      if (!in_selected[v]) entries.push_back({0.0, v, 1, stamp});
    return entries;
  };

  bool fill_mode = false;
  for (std::uint32_t step = 1; step <= k; ++step) {
    const std::uint64_t stream = derive_seed(seed, step);
    double base = 0.0;
    std::size_t evals = 0;
    if (!fill_mode && step > 1) base = evaluate(selected, stream);
    auto gain_of = [&](NodeId v, std::uint32_t) {
      std::vector<NodeId> candidate = selected;
      candidate.push_back(v);
      return evaluate(candidate, stream) - base;
    };

    NodeId pick = kInvalidNode;
    if (!fill_mode) {
      if (use_lazy) {
        if (!queue_seeded) {
          auto entries = collect_candidates(step);
          detail::parallel_gains(entries, gain_of, jobs);
          evals += entries.size();
          for (const auto& e : entries) queue.push(e);
          queue_seeded = true;
        }
        for (;;) {
          detail::LazyEntry top = queue.top();
          queue.pop();
          if (in_selected[top.node]) continue;
          if (top.stamp == step) {
            if (top.gain > 0.0) {
              pick = top.node;
            } else {
              fill_mode = true;  // no positive gain remains under the estimates
            }
            break;
          }
          top.gain = gain_of(top.node, 1);
          ++evals;
          top.stamp = step;
          queue.push(top);
        }
      } else {
        auto entries = collect_candidates(step);
        detail::parallel_gains(entries, gain_of, jobs);
        evals += entries.size();
        bool have = false;
        detail::LazyEntry chosen{};
        for (const auto& e : entries) {
          if (!have || detail::LazyOrder{}(chosen, e)) {
            chosen = e;
            have = true;
          }
        }
        if (chosen.gain > 0.0) {
          pick = chosen.node;
        } else {
          fill_mode = true;
        }
      }
    }
    if (fill_mode) {
      for (NodeId v = 0; v < g.n(); ++v) {
        if (!in_selected[v]) {
          pick = v;
          break;
        }
      }
    }
    selected.push_back(pick);
    in_selected[pick] = 1;
    if (stats) {
      ++stats->steps;
      stats->total_evaluations += evals;
      stats->max_evaluations_per_step = std::max(stats->max_evaluations_per_step, evals);
    }
  }
  return selected;
}

inline std::vector<NodeId> mc_greedy_weighted(const Graph& g, std::vector<NodeId> excluded,
                                              std::uint32_t k, std::uint64_t r, Rng rng,
                                              int jobs = 1, GreedyStats* stats = nullptr) {
  auto evaluate = make_mc_weighted_evaluator(g, std::move(excluded), r);
  return mc_greedy_weighted(g, k, evaluate, rng.seed(), stats, true, jobs);
}

struct TheoreticalR {
  std::uint64_t value = 0;
  bool saturated = false;
};

enum class GreedyVariant { Cross, Within };

// Simulation counts from the approximation theorems; informational only,
// practical runs pass r explicitly.
inline TheoreticalR theoretical_r(std::uint64_t n, std::uint64_t k, std::uint64_t T, double eps,
                                  double ell, GreedyVariant variant) {
  if (!(eps > 0.0) || !(ell > 0.0)) throw std::invalid_argument("eps and ell must be positive");
  if (n < 2 || k == 0 || T == 0) throw std::invalid_argument("need n >= 2, k >= 1, T >= 1");
  const double ln_n = std::log(static_cast<double>(n));
  double raw = 0.0;
  if (variant == GreedyVariant::Cross) {
    const double log_term = std::log(2.0 * static_cast<double>(k)) + (ell + 1.0) * ln_n;
    raw = 31.0 * static_cast<double>(k * k) * static_cast<double>(T * T) *
          static_cast<double>(n) * log_term / (eps * eps);
  } else {
    const double log_term =
        std::log(2.0 * static_cast<double>(k)) + (ell + 1.0) * ln_n + std::log(static_cast<double>(T));
    raw = 31.0 * static_cast<double>(k * k) * static_cast<double>(n) * log_term / (eps * eps);
  }
  TheoreticalR out;
  const double cap = 9.0e18;
  if (!(raw < cap)) {
    out.value = std::numeric_limits<std::uint64_t>::max();
    out.saturated = true;
  } else {
    out.value = static_cast<std::uint64_t>(std::ceil(raw));
    if (out.value == 0) out.value = 1;
  }
  return out;
}

}  // namespace mrim
