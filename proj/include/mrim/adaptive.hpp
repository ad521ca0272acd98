#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "mrim/greedy.hpp"
#include "mrim/imm.hpp"
#include "mrim/propagation.hpp"
#include "mrim/spread.hpp"

#include "json.hpp"

namespace mrim {

// Feedback carried between rounds: the activated-node set. Policies consume
// only (t, activated); the per-round history is diagnostic trace data.
struct AdaptiveState {
  std::uint32_t t = 1;            // round about to be decided, 1-based
  std::vector<NodeId> activated;  // sorted A_{t-1}

  struct RoundRecord {
    std::vector<NodeId> seeds;
    std::vector<NodeId> newly_activated;
  };
  std::vector<RoundRecord> history;
};

// Per-round seed chooser; decide must be deterministic given the state (any
// internal randomness derives from the policy seed and the state).
struct Policy {
  std::string name;
  std::uint32_t budget = 1;
  std::function<std::vector<NodeId>(const AdaptiveState&)> decide;
};

inline std::uint64_t hash_nodes(std::span<const NodeId> nodes) {
  std::uint64_t h = 0x5bd1e995u;
  for (NodeId v : nodes) h = mix64(h ^ (v + 1));
  return h;
}

// The diffusion side of the adaptive loop. Sampled mode draws a fresh
// live-edge graph per round from (seed, t); Fixed mode replays a pinned
// realization of exactly T samples.
class Environment {
 public:
  static Environment sampled(const Graph& g, std::uint32_t T, std::uint64_t seed) {
    Environment env(g, T);
    env.seed_ = seed;
    env.sampled_ = true;
    return env;
  }

  static Environment fixed(const Graph& g, std::vector<LiveEdgeSample> rounds) {
    Environment env(g, static_cast<std::uint32_t>(rounds.size()));
    env.fixed_rounds_ = std::move(rounds);
    env.sampled_ = false;
    return env;
  }

  const Graph& graph() const { return *g_; }
  std::uint32_t rounds() const { return T_; }

  // Activated set of round t's diffusion from `seeds`.
  std::vector<NodeId> propagate(std::uint32_t t, std::span<const NodeId> seeds) const {
    if (t == 0 || t > T_) throw std::invalid_argument("round out of range");
    if (sampled_) {
      // one coin per edge per round, keyed by (seed, t): the round's
      // live-edge graph is fixed no matter how it is explored
      DiffusionScratch scratch(*g_);
      scratch.begin_union();
      scratch.run_round(seeds, CoinHash{derive_seed(seed_, t)});
      std::vector<NodeId> out;
      for (NodeId v = 0; v < g_->n(); ++v)
        if (scratch.in_union(v)) out.push_back(v);
      return out;
    }
    return forward_propagate(*g_, fixed_rounds_.at(t - 1), seeds).activated;
  }

 private:
  Environment(const Graph& g, std::uint32_t T) : g_(&g), T_(T) {}

  const Graph* g_;
  std::uint32_t T_;
  bool sampled_ = true;
  std::uint64_t seed_ = 0;
  std::vector<LiveEdgeSample> fixed_rounds_;
};

struct PolicyRunResult {
  SeedSchedule schedule;
  std::vector<NodeId> activated;  // final A_T, sorted
  AdaptiveState trace;            // full history
  std::uint32_t value = 0;        // |A_T|
};

// Runs T rounds of pick -> observe -> update feedback.
inline PolicyRunResult run_policy(const Environment& env, const Policy& policy, std::uint32_t T,
                                  std::uint32_t k) {
  if (T > env.rounds()) throw std::invalid_argument("environment has fewer rounds than requested");
  PolicyRunResult result;
  result.schedule = SeedSchedule(T);
  AdaptiveState state;
  std::vector<char> active(env.graph().n(), 0);

  for (std::uint32_t t = 1; t <= T; ++t) {
    state.t = t;
    std::vector<NodeId> seeds = policy.decide(state);
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    if (seeds.size() > k)
      throw std::invalid_argument("policy '" + policy.name + "' exceeded budget in round " +
                                  std::to_string(t) + ": " + std::to_string(seeds.size()) + " > " +
                                  std::to_string(k));
    result.schedule.set_round(t, seeds);

    std::vector<NodeId> reached = env.propagate(t, seeds);
    AdaptiveState::RoundRecord record;
    record.seeds = seeds;
    for (NodeId v : reached) {
      if (!active[v]) {
        active[v] = 1;
        record.newly_activated.push_back(v);
      }
    }
    std::vector<NodeId> merged;
    merged.reserve(state.activated.size() + record.newly_activated.size());
    std::merge(state.activated.begin(), state.activated.end(), record.newly_activated.begin(),
               record.newly_activated.end(), std::back_inserter(merged));
    state.activated = std::move(merged);
    state.history.push_back(std::move(record));
  }
  result.activated = state.activated;
  result.value = static_cast<std::uint32_t>(state.activated.size());
  state.t = T + 1;
  result.trace = std::move(state);
  return result;
}

// AdaGreedy: per-round weighted Monte-Carlo greedy with the activated set
// excluded. The decision stream is derived from (seed, t, activated), so the
// policy is a pure function of the feedback.
inline Policy ada_greedy_policy(const Graph& g, std::uint32_t k, std::uint64_t r,
                                std::uint64_t seed, int jobs = 1) {
  Policy p;
  p.name = "ada-greedy";
  p.budget = k;
  p.decide = [&g, k, r, seed, jobs](const AdaptiveState& state) {
    const std::uint64_t stream = derive_seed(derive_seed(seed, state.t), hash_nodes(state.activated));
    auto evaluate = make_mc_weighted_evaluator(g, state.activated, r);
    return mc_greedy_weighted(g, k, evaluate, stream, nullptr, true, jobs);
  };
  return p;
}

// AdaGreedy with the exact weighted oracle; usable only on enumerable
// instances, where it is fully deterministic.
inline Policy ada_greedy_exact_policy(const Graph& g, std::uint32_t k) {
  Policy p;
  p.name = "ada-greedy-exact";
  p.budget = k;
  p.decide = [&g, k](const AdaptiveState& state) {
    auto evaluate = make_exact_weighted_evaluator(g, state.activated);
    return mc_greedy_weighted(g, k, evaluate, 0);
  };
  return p;
}

// AdaIMM policy: one IMM pass per round over RR sets rooted outside the
// activated set.
inline Policy ada_imm_policy(const Graph& g, std::uint32_t k, double eps, double ell,
                             std::uint32_t T, std::uint64_t seed, const ImmOptions& opts = {}) {
  Policy p;
  p.name = "ada-imm";
  p.budget = k;
  p.decide = [&g, k, eps, ell, T, seed, opts](const AdaptiveState& state) {
    const std::uint64_t stream = derive_seed(derive_seed(seed, state.t), hash_nodes(state.activated));
    return ada_imm_round(g, state.activated, T, k, eps, ell, stream, opts).seeds;
  };
  return p;
}

// Bridge to the exact policy-value oracle (policies must consume feedback
// only through (t, activated), which holds for every policy built here).
inline DeterministicPolicyFn to_deterministic_fn(const Policy& policy) {
  return [&policy](std::uint32_t t, const std::vector<NodeId>& activated) {
    AdaptiveState state;
    state.t = t;
    state.activated = activated;
    return policy.decide(state);
  };
}

// Monte-Carlo estimate of f_avg(policy): mean final activation count over
// independent sampled realizations.
inline SpreadEstimate estimate_policy_value(const Graph& g, std::uint32_t T, std::uint32_t k,
                                            const Policy& policy, std::uint64_t trials,
                                            std::uint64_t env_seed, int jobs = 1) {
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  std::vector<Welford> acc(std::min<std::uint64_t>(trials, 64));
  parallel_chunks(static_cast<std::size_t>(trials), jobs, acc.size(),
                  [&](std::size_t chunk, std::size_t begin, std::size_t end) {
                    Welford w;
                    for (std::size_t i = begin; i < end; ++i) {
                      Environment env = Environment::sampled(g, T, derive_seed(env_seed, i));
                      w.add(static_cast<double>(run_policy(env, policy, T, k).value));
                    }
                    acc[chunk] = w;
                  });
  Welford total;
  for (const auto& w : acc) total.merge(w);
  return SpreadEstimate::from(total);
}

// Trace export: one JSON record per round.
inline void write_trace_jsonl(std::ostream& out, const AdaptiveState& trace) {
  std::size_t cumulative = 0;
  for (std::size_t i = 0; i < trace.history.size(); ++i) {
    const auto& record = trace.history[i];
    cumulative += record.newly_activated.size();
    nlohmann::json line;
    line["round"] = i + 1;
    line["seeds"] = record.seeds;
    line["new_activations"] = record.newly_activated.size();
    line["cumulative_activated"] = cumulative;
    out << line.dump() << '\n';
  }
}

}  // namespace mrim
