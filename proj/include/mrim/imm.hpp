#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "mrim/parallel.hpp"
#include "mrim/rrset.hpp"
#include "mrim/schedule.hpp"

namespace mrim {

enum class ImmVariant { Cross, Within, Adaptive };

// ln C(n, k) through log-gamma; overflow-free for any n.
inline double log_choose(std::uint64_t n, std::uint64_t k) {
  if (k > n) throw std::invalid_argument("k exceeds n in log_choose");
  if (k > n - k) k = n - k;
  if (k == 0) return 0.0;
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

// Derived sampling constants for the two-phase RR machinery. `ell` is stored
// post-adjustment. The cross variant keeps the T factor inside lambda' and
// lambda* but no ln T inside alpha; that asymmetry follows the pseudocode as
// written.
struct ImmParams {
  ImmVariant variant = ImmVariant::Within;
  double eps = 0.0;
  double eps0 = 0.0;       // per-round error budget (within/adaptive); = eps for cross
  double eps_prime = 0.0;  // sqrt(2) * eps0
  double ell = 0.0;        // post-adjustment
  double alpha = 0.0;
  double beta = 0.0;
  double lambda_prime = 0.0;
  double lambda_star = 0.0;
};

inline ImmParams compute_params(NodeId n, std::uint32_t k, std::uint32_t T, double eps, double ell,
                                ImmVariant variant) {
  if (k > n) throw std::invalid_argument("budget k exceeds node count");
  if (n < 2 || k == 0 || T == 0) throw std::invalid_argument("need n >= 2, k >= 1, T >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must be in (0,1)");
  if (!(ell > 0.0)) throw std::invalid_argument("ell must be positive");

  constexpr double kOneMinusInvE = 1.0 - 1.0 / std::numbers::e;
  const double ln_n = std::log(static_cast<double>(n));
  const double ln_log2_n = std::log(std::log2(static_cast<double>(n)));
  const double lnC = log_choose(n, k);

  ImmParams p;
  p.variant = variant;
  p.eps = eps;
  switch (variant) {
    case ImmVariant::Cross: {
      p.ell = ell + std::log(2.0) / ln_n;
      p.eps0 = eps;
      p.eps_prime = std::numbers::sqrt2 * eps;
      p.alpha = std::sqrt(p.ell * ln_n + std::log(2.0));
      p.beta = std::sqrt(0.5 * (T * lnC + p.alpha * p.alpha));
      p.lambda_prime = (2.0 + (2.0 / 3.0) * p.eps_prime) *
                       (T * lnC + p.ell * ln_n + ln_log2_n) * n /
                       (p.eps_prime * p.eps_prime);
      const double core = kOneMinusInvE * p.alpha + p.beta;
      p.lambda_star = 2.0 * n * T * core * core / (eps * eps);
      break;
    }
    case ImmVariant::Within:
    case ImmVariant::Adaptive: {
      p.ell = ell + std::log(2.0 * T) / ln_n;
      p.eps0 = std::exp(kOneMinusInvE) * eps / 2.0;
      p.eps_prime = std::numbers::sqrt2 * p.eps0;
      const double ln_T = variant == ImmVariant::Within ? std::log(static_cast<double>(T)) : 0.0;
      p.alpha = std::sqrt(p.ell * ln_n + std::log(2.0) + ln_T);
      p.beta = std::sqrt(kOneMinusInvE * (lnC + p.alpha * p.alpha));
      p.lambda_prime = (2.0 + (2.0 / 3.0) * p.eps_prime) * (lnC + p.ell * ln_n + ln_T + ln_log2_n) *
                       n / (p.eps_prime * p.eps_prime);
      const double core = kOneMinusInvE * p.alpha + p.beta;
      p.lambda_star = 2.0 * n * core * core / (p.eps0 * p.eps0);
      break;
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Greedy max-cover node selection over RR collections. Counts are maintained
// incrementally through an inverted index; c[key] always equals the number
// of uncovered sets containing the key.

struct CrSelectionResult {
  SeedSchedule schedule;
  std::size_t covered = 0;
};

class CrMaxCover {
 public:
  CrMaxCover(const std::vector<MultiRoundRRSet>& sets, NodeId n, std::uint32_t T, std::uint32_t k)
      : sets_(&sets), n_(n), T_(T), k_(k), schedule_(T) {
    counts_.assign(static_cast<std::size_t>(n) * T, 0);
    covered_.assign(sets.size(), 0);
    picked_.assign(static_cast<std::size_t>(n) * T, 0);
    picked_in_round_.assign(T + 1, 0);
    inverted_.resize(static_cast<std::size_t>(n) * T);
    for (std::size_t i = 0; i < sets.size(); ++i) {
      for (std::uint32_t t = 0; t < T; ++t) {
        for (NodeId u : sets[i].per_round.at(t)) {
          const std::size_t key = static_cast<std::size_t>(t) * n_ + u;
          ++counts_[key];
          inverted_[key].push_back(i);
        }
      }
    }
  }

  bool done() const { return picks_ == static_cast<std::size_t>(k_) * T_; }

  // One greedy pick: max count over feasible pairs, ties to lower node id
  // then lower round.
  SeedPair pick_next() {
    std::uint32_t best_count = 0;
    NodeId best_u = kInvalidNode;
    std::uint32_t best_t = 0;
    bool have = false;
    for (NodeId u = 0; u < n_; ++u) {
      for (std::uint32_t t = 1; t <= T_; ++t) {
        if (picked_in_round_[t] >= k_) continue;
        const std::size_t key = static_cast<std::size_t>(t - 1) * n_ + u;
        if (picked_[key]) continue;
        if (!have || counts_[key] > best_count) {
          best_count = counts_[key];
          best_u = u;
          best_t = t;
          have = true;
        }
      }
    }
    if (!have) throw std::logic_error("no feasible pair left");
    apply_pick(best_u, best_t);
    return {best_u, best_t};
  }

  void run_all() {
    while (!done()) pick_next();
  }

  const SeedSchedule& schedule() const { return schedule_; }
  std::size_t covered_count() const { return covered_count_; }
  const std::vector<std::uint32_t>& counts() const { return counts_; }

  std::vector<std::uint32_t> recompute_counts() const {
    std::vector<std::uint32_t> fresh(counts_.size(), 0);
    for (std::size_t i = 0; i < sets_->size(); ++i) {
      if (covered_[i]) continue;
      for (std::uint32_t t = 0; t < T_; ++t)
        for (NodeId u : (*sets_)[i].per_round.at(t))
          ++fresh[static_cast<std::size_t>(t) * n_ + u];
    }
    return fresh;
  }

 private:
  void apply_pick(NodeId u, std::uint32_t t) {
    const std::size_t key = static_cast<std::size_t>(t - 1) * n_ + u;
    picked_[key] = 1;
    ++picked_in_round_[t];
    ++picks_;
    schedule_.add(u, t);
    for (std::size_t i : inverted_[key]) {
      if (covered_[i]) continue;
      covered_[i] = 1;
      ++covered_count_;
      for (std::uint32_t tt = 0; tt < T_; ++tt)
        for (NodeId v : (*sets_)[i].per_round.at(tt))
          --counts_[static_cast<std::size_t>(tt) * n_ + v];
    }
  }

  const std::vector<MultiRoundRRSet>* sets_;
  NodeId n_;
  std::uint32_t T_, k_;
  SeedSchedule schedule_;
  std::vector<std::uint32_t> counts_;
  std::vector<std::vector<std::uint32_t>> inverted_;
  std::vector<char> covered_, picked_;
  std::vector<std::uint32_t> picked_in_round_;
  std::size_t picks_ = 0, covered_count_ = 0;
};

inline CrSelectionResult cr_node_selection(const std::vector<MultiRoundRRSet>& sets, NodeId n,
                                           std::uint32_t T, std::uint32_t k) {
  CrMaxCover cover(sets, n, T, k);
  cover.run_all();
  return {cover.schedule(), cover.covered_count()};
}

struct WrSelectionResult {
  std::vector<NodeId> nodes;  // sorted
  std::size_t covered = 0;
  std::vector<NodeId> uncovered_roots;  // multiset for the next round's pool
};

class NodeMaxCover {
 public:
  NodeMaxCover(const std::vector<RRSet>& sets, NodeId n, std::uint32_t k)
      : sets_(&sets), n_(n), k_(k) {
    counts_.assign(n, 0);
    covered_.assign(sets.size(), 0);
    picked_.assign(n, 0);
    inverted_.resize(n);
    for (std::size_t i = 0; i < sets.size(); ++i) {
      for (NodeId u : sets[i].nodes) {
        ++counts_[u];
        inverted_[u].push_back(i);
      }
    }
  }

  bool done() const { return picks_ == k_; }

  NodeId pick_next() {
    std::uint32_t best_count = 0;
    NodeId best = kInvalidNode;
    bool have = false;
    for (NodeId u = 0; u < n_; ++u) {
      if (picked_[u]) continue;
      if (!have || counts_[u] > best_count) {
        best_count = counts_[u];
        best = u;
        have = true;
      }
    }
    if (!have) throw std::logic_error("no candidate node left");
    picked_[best] = 1;
    ++picks_;
    nodes_.push_back(best);
    for (std::size_t i : inverted_[best]) {
      if (covered_[i]) continue;
      covered_[i] = 1;
      ++covered_count_;
      for (NodeId v : (*sets_)[i].nodes) --counts_[v];
    }
    return best;
  }

  void run_all() {
    while (!done()) pick_next();
  }

  std::vector<NodeId> sorted_nodes() const {
    auto out = nodes_;
    std::sort(out.begin(), out.end());
    return out;
  }
  std::size_t covered_count() const { return covered_count_; }
  const std::vector<std::uint32_t>& counts() const { return counts_; }

  std::vector<std::uint32_t> recompute_counts() const {
    std::vector<std::uint32_t> fresh(n_, 0);
    for (std::size_t i = 0; i < sets_->size(); ++i) {
      if (covered_[i]) continue;
      for (NodeId u : (*sets_)[i].nodes) ++fresh[u];
    }
    return fresh;
  }

  std::vector<NodeId> uncovered_roots() const {
    std::vector<NodeId> roots;
    for (std::size_t i = 0; i < covered_.size(); ++i)
      if (!covered_[i]) roots.push_back((*sets_)[i].root);
    return roots;
  }

 private:
  const std::vector<RRSet>* sets_;
  NodeId n_;
  std::uint32_t k_;
  std::vector<std::uint32_t> counts_;
  std::vector<std::vector<std::uint32_t>> inverted_;
  std::vector<char> covered_, picked_;
  std::vector<NodeId> nodes_;
  std::uint32_t picks_ = 0;
  std::size_t covered_count_ = 0;
};

inline WrSelectionResult wr_node_selection(const std::vector<RRSet>& sets, NodeId n,
                                           std::uint32_t k) {
  NodeMaxCover cover(sets, n, k);
  cover.run_all();
  return {cover.sorted_nodes(), cover.covered_count(), cover.uncovered_roots()};
}

// ---------------------------------------------------------------------------
// Two-phase IMM drivers.

enum class WrRootStrategy {
  RemainingRoots,     // roots of the previous round's uncovered sets
  RejectionSampling,  // uniform roots filtered through the conditional check
};

struct ImmOptions {
  int jobs = 1;
  std::size_t max_rr_bytes = std::size_t{4} << 30;  // abort rather than thrash
  WrRootStrategy wr_roots = WrRootStrategy::RemainingRoots;
  bool reuse_rr = false;  // AdaIMM: keep prior-round sets rooted outside A
};

struct ImmRoundStats {
  double lb = 1.0;
  std::uint64_t theta = 0;
  std::size_t phase1_sets = 0;
  std::size_t final_sets = 0;
  double coverage_fraction = 0.0;
  bool root_fallback = false;  // RemainingRoots pool was empty
};

struct CrImmResult {
  SeedSchedule schedule;
  ImmParams params;
  ImmRoundStats stats;
};

namespace detail {

inline std::uint32_t halving_iterations(double n_effective) {
  if (n_effective < 4.0) return 0;
  return static_cast<std::uint32_t>(std::floor(std::log2(n_effective))) - 1;
}

inline std::uint64_t ceil_div_positive(double num, double den) {
  const double v = std::ceil(num / den);
  return v < 1.0 ? 1 : static_cast<std::uint64_t>(v);
}

}  // namespace detail

// Non-adaptive cross-round IMM: multi-round RR sets from uniform roots, a
// halving loop to lower-bound OPT, then theta = lambda*/LB sets and one
// budgeted max-cover pass. RR sets accumulate across iterations.
inline CrImmResult cr_naimm(const Graph& g, std::uint32_t T, std::uint32_t k, double eps,
                            double ell, std::uint64_t seed, const ImmOptions& opts = {}) {
  CrImmResult result;
  result.params = compute_params(g.n(), k, T, eps, ell, ImmVariant::Cross);
  const ImmParams& p = result.params;
  const double n = static_cast<double>(g.n());

  std::vector<MultiRoundRRSet> sets;
  std::size_t bytes = 0;
  std::uint64_t next_stream = 0;
  auto grow_to = [&](std::uint64_t target) {
    if (target <= sets.size()) return;
    const std::size_t begin = sets.size();
    sets.resize(target);
    parallel_chunks(target - begin, opts.jobs, 64, [&](std::size_t, std::size_t b, std::size_t e) {
      RRGenerator gen(g);
      for (std::size_t i = b; i < e; ++i) {
        Rng sub = Rng(seed).substream(next_stream + i);
        MultiRoundRRSet& set = sets[begin + i];
        set.root = sub.below(g.n());
        set.per_round.resize(T);
        for (std::uint32_t t = 0; t < T; ++t) gen.generate(set.root, sub, set.per_round[t]);
      }
    });
    next_stream += target - begin;
    for (std::size_t i = begin; i < sets.size(); ++i)
      bytes += sets[i].entry_count() * sizeof(NodeId) + 64;
    if (bytes > opts.max_rr_bytes)
      throw ResourceBudgetError("RR collection exceeds the configured memory budget");
  };

  double lb = 1.0;
  const std::uint32_t imax = detail::halving_iterations(n);
  for (std::uint32_t i = 1; i <= imax; ++i) {
    const double x = n / std::exp2(static_cast<double>(i));
    grow_to(detail::ceil_div_positive(p.lambda_prime, x));
    auto sel = cr_node_selection(sets, g.n(), T, k);
    const double estimate = n * static_cast<double>(sel.covered) / static_cast<double>(sets.size());
    if (estimate >= (1.0 + p.eps_prime) * x) {
      lb = estimate / (1.0 + p.eps_prime);
      break;
    }
  }
  result.stats.lb = lb;
  result.stats.phase1_sets = sets.size();

  const std::uint64_t theta = detail::ceil_div_positive(p.lambda_star, lb);
  result.stats.theta = theta;
  grow_to(theta + 1);  // generation loop runs while |M| <= theta
  result.stats.final_sets = sets.size();

  auto sel = cr_node_selection(sets, g.n(), T, k);
  result.schedule = std::move(sel.schedule);
  result.stats.coverage_fraction = static_cast<double>(sel.covered) / static_cast<double>(sets.size());
  return result;
}

struct WrImmResult {
  SeedSchedule schedule;
  ImmParams params;
  std::vector<ImmRoundStats> rounds;
};

// Non-adaptive within-round IMM: one IMM pass per round. Round t samples
// roots from the remaining roots of round t-1 (heuristic), or from uniform
// roots filtered by the conditional rejection test.
inline WrImmResult wr_naimm(const Graph& g, std::uint32_t T, std::uint32_t k, double eps,
                            double ell, std::uint64_t seed, const ImmOptions& opts = {}) {
  WrImmResult result;
  result.schedule = SeedSchedule(T);
  result.params = compute_params(g.n(), k, T, eps, ell, ImmVariant::Within);
  const ImmParams& p = result.params;
  const double n = static_cast<double>(g.n());

  RootPool pool = RootPool::uniform(g.n());
  std::uint64_t next_stream = 0;
  for (std::uint32_t t = 1; t <= T; ++t) {
    ImmRoundStats stats;
    if (pool.empty()) {
      // every previous-round RR set was covered; degenerate case
      stats.root_fallback = true;
      pool = RootPool::uniform(g.n());
    }
    ConditionalRRSampler rejection(g, result.schedule.prefix(t - 1), t);
    const bool reject_mode = opts.wr_roots == WrRootStrategy::RejectionSampling && t > 1;

    std::vector<RRSet> sets;
    std::size_t bytes = 0;
    auto grow_to = [&](std::uint64_t target) {
      if (target <= sets.size()) return;
      const std::size_t begin = sets.size();
      sets.resize(target);
      parallel_chunks(target - begin, opts.jobs, 64,
                      [&](std::size_t, std::size_t b, std::size_t e) {
                        RRGenerator gen(g);
                        ConditionalRRSampler sampler = rejection;
                        for (std::size_t i = b; i < e; ++i) {
                          Rng sub = Rng(seed).substream(next_stream + i);
                          RRSet& set = sets[begin + i];
                          if (!reject_mode) {
                            set.root = pool.sample(sub);
                            gen.generate(set.root, sub, set.nodes);
                          } else {
                            bool accepted = false;
                            for (std::uint32_t attempt = 0; attempt < 100000; ++attempt) {
                              NodeId root = sub.below(g.n());
                              if (auto rr = sampler.sample(root, sub)) {
                                set = std::move(*rr);
                                accepted = true;
                                break;
                              }
                            }
                            if (!accepted)
                              throw ResourceBudgetError(
                                  "conditional RR acceptance rate is too low");
                          }
                        }
                      });
      next_stream += target - begin;
      for (std::size_t i = begin; i < sets.size(); ++i)
        bytes += sets[i].nodes.size() * sizeof(NodeId) + 48;
      if (bytes > opts.max_rr_bytes)
        throw ResourceBudgetError("RR collection exceeds the configured memory budget");
    };

    double lb = 1.0;
    const std::uint32_t jmax = detail::halving_iterations(n);
    for (std::uint32_t j = 1; j <= jmax; ++j) {
      const double x = n / std::exp2(static_cast<double>(j));
      grow_to(detail::ceil_div_positive(p.lambda_prime, x));
      auto sel = wr_node_selection(sets, g.n(), k);
      const double estimate =
          n * static_cast<double>(sel.covered) / static_cast<double>(sets.size());
      if (estimate >= (1.0 + p.eps_prime) * x) {
        lb = estimate / (1.0 + p.eps_prime);
        break;
      }
    }
    stats.lb = lb;
    stats.phase1_sets = sets.size();
    const std::uint64_t theta = detail::ceil_div_positive(p.lambda_star, lb);
    stats.theta = theta;
    grow_to(theta + 1);
    stats.final_sets = sets.size();

    NodeMaxCover cover(sets, g.n(), k);
    cover.run_all();
    result.schedule.set_round(t, cover.sorted_nodes());
    stats.coverage_fraction =
        static_cast<double>(cover.covered_count()) / static_cast<double>(sets.size());
    result.rounds.push_back(stats);
    pool = RootPool::remaining(cover.uncovered_roots());
  }
  return result;
}

struct AdaImmResult {
  std::vector<NodeId> seeds;  // sorted
  ImmParams params;
  ImmRoundStats stats;
};

// Carry-over state for the optional incremental reuse between rounds.
struct AdaImmState {
  std::vector<RRSet> sets;
};

// One adaptive round: single-round IMM over RR sets rooted in V \ A, with
// all spread estimates scaled by n_a = n - |A|.
inline AdaImmResult ada_imm_round(const Graph& g, const std::vector<NodeId>& activated,
                                  std::uint32_t T, std::uint32_t k, double eps, double ell,
                                  std::uint64_t seed, const ImmOptions& opts = {},
                                  AdaImmState* state = nullptr) {
  AdaImmResult result;
  result.params = compute_params(g.n(), k, T, eps, ell, ImmVariant::Adaptive);
  const ImmParams& p = result.params;

  std::vector<char> active_mask(g.n(), 0);
  std::size_t active_count = 0;
  for (NodeId v : activated) {
    if (v >= g.n()) throw std::out_of_range("activated id out of range");
    if (!active_mask[v]) {
      active_mask[v] = 1;
      ++active_count;
    }
  }
  if (active_count >= g.n()) {
    // nothing left to influence: lowest-id budget fill, gain zero
    for (NodeId v = 0; v < k; ++v) result.seeds.push_back(v);
    return result;
  }
  const double n_a = static_cast<double>(g.n() - active_count);

  RootPool pool = RootPool::uniform_minus(g.n(), activated);
  std::vector<RRSet> sets;
  if (opts.reuse_rr && state) {
    for (auto& set : state->sets)
      if (!active_mask[set.root]) sets.push_back(std::move(set));
    state->sets.clear();
  }

  std::size_t bytes = 0;
  std::uint64_t next_stream = 0;
  auto grow_to = [&](std::uint64_t target) {
    if (target <= sets.size()) return;
    const std::size_t begin = sets.size();
    sets.resize(target);
    parallel_chunks(target - begin, opts.jobs, 64, [&](std::size_t, std::size_t b, std::size_t e) {
      RRGenerator gen(g);
      for (std::size_t i = b; i < e; ++i) {
        Rng sub = Rng(seed).substream(next_stream + i);
        RRSet& set = sets[begin + i];
        set.root = pool.sample(sub);
        gen.generate(set.root, sub, set.nodes);
      }
    });
    next_stream += target - begin;
    for (std::size_t i = begin; i < sets.size(); ++i)
      bytes += sets[i].nodes.size() * sizeof(NodeId) + 48;
    if (bytes > opts.max_rr_bytes)
      throw ResourceBudgetError("RR collection exceeds the configured memory budget");
  };

  double lb = 1.0;
  const std::uint32_t jmax = detail::halving_iterations(n_a);
  for (std::uint32_t j = 1; j <= jmax; ++j) {
    const double x = n_a / std::exp2(static_cast<double>(j));
    grow_to(detail::ceil_div_positive(p.lambda_prime, x));
    auto sel = wr_node_selection(sets, g.n(), k);
    const double estimate =
        n_a * static_cast<double>(sel.covered) / static_cast<double>(sets.size());
    if (estimate >= (1.0 + p.eps_prime) * x) {
      lb = estimate / (1.0 + p.eps_prime);
      break;
    }
  }
  result.stats.lb = lb;
  result.stats.phase1_sets = sets.size();
  const std::uint64_t theta = detail::ceil_div_positive(p.lambda_star, lb);
  result.stats.theta = theta;
  grow_to(theta + 1);
  result.stats.final_sets = sets.size();

  NodeMaxCover cover(sets, g.n(), k);
  cover.run_all();
  result.seeds = cover.sorted_nodes();
  result.stats.coverage_fraction =
      static_cast<double>(cover.covered_count()) / static_cast<double>(sets.size());
  if (state) state->sets = std::move(sets);
  return result;
}

}  // namespace mrim
