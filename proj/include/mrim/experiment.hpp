#pragma once

#include <chrono>
#include <cstdio>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mrim/adaptive.hpp"
#include "mrim/greedy.hpp"
#include "mrim/imm.hpp"

#include "json.hpp"

namespace mrim {

enum class Algorithm { SG, SG_R, CR_GREEDY, WR_GREEDY, CR_IMM, WR_IMM, ADA_GREEDY, ADA_IMM };

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::SG: return "sg";
    case Algorithm::SG_R: return "sg-r";
    case Algorithm::CR_GREEDY: return "cr-greedy";
    case Algorithm::WR_GREEDY: return "wr-greedy";
    case Algorithm::CR_IMM: return "cr-imm";
    case Algorithm::WR_IMM: return "wr-imm";
    case Algorithm::ADA_GREEDY: return "ada-greedy";
    case Algorithm::ADA_IMM: return "ada-imm";
  }
  return "?";
}

inline Algorithm parse_algorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::SG, Algorithm::SG_R, Algorithm::CR_GREEDY, Algorithm::WR_GREEDY,
                      Algorithm::CR_IMM, Algorithm::WR_IMM, Algorithm::ADA_GREEDY,
                      Algorithm::ADA_IMM})
    if (name == algorithm_name(a)) return a;
  throw std::invalid_argument("unknown algorithm: " + name);
}

inline bool is_adaptive(Algorithm a) {
  return a == Algorithm::ADA_GREEDY || a == Algorithm::ADA_IMM;
}

// SG baseline: single-round greedy for T*k seeds; the first k picked become
// S_1, the next k become S_2, and so on.
inline SeedSchedule baseline_sg(const Graph& g, std::uint32_t T, std::uint32_t k,
                                const NodeSetValueFn& evaluate, std::uint64_t seed, int jobs = 1) {
  if (static_cast<std::uint64_t>(T) * k > g.n())
    throw std::invalid_argument("SG needs T*k distinct nodes");
  auto picks = mc_greedy_weighted(g, T * k, evaluate, seed, nullptr, true, jobs);
  SeedSchedule schedule(T);
  for (std::uint32_t t = 1; t <= T; ++t)
    schedule.set_round(t, {picks.begin() + (t - 1) * k, picks.begin() + t * k});
  return schedule;
}

inline SeedSchedule baseline_sg(const Graph& g, std::uint32_t T, std::uint32_t k, std::uint64_t r,
                                Rng rng, int jobs = 1) {
  return baseline_sg(g, T, k, make_mc_weighted_evaluator(g, {}, r), rng.seed(), jobs);
}

// SG-R baseline: one greedy seed set of size k, reused in every round.
inline SeedSchedule baseline_sg_r(const Graph& g, std::uint32_t T, std::uint32_t k,
                                  const NodeSetValueFn& evaluate, std::uint64_t seed,
                                  int jobs = 1) {
  auto picks = mc_greedy_weighted(g, k, evaluate, seed, nullptr, true, jobs);
  SeedSchedule schedule(T);
  for (std::uint32_t t = 1; t <= T; ++t) schedule.set_round(t, picks);
  return schedule;
}

inline SeedSchedule baseline_sg_r(const Graph& g, std::uint32_t T, std::uint32_t k, std::uint64_t r,
                                  Rng rng, int jobs = 1) {
  return baseline_sg_r(g, T, k, make_mc_weighted_evaluator(g, {}, r), rng.seed(), jobs);
}

inline SpreadEstimate stats_summary(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("stats_summary needs at least one sample");
  Welford w;
  for (double x : samples) w.add(x);
  return SpreadEstimate::from(w);
}

// Cumulative per-round spreads rho(S_1..S_t) for t=1..T, all rounds sharing
// the same trial draws, which makes the per-round means non-decreasing.
inline std::vector<SpreadEstimate> evaluate_schedule_rounds(const Graph& g,
                                                            const SeedSchedule& sched,
                                                            std::uint64_t trials,
                                                            std::uint64_t seed, int jobs = 1) {
  const std::uint32_t T = sched.rounds();
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  const std::size_t chunks = static_cast<std::size_t>(std::min<std::uint64_t>(
      detail::kMcChunks, std::max<std::uint64_t>(1, trials / detail::kMinDrawsPerChunk + 1)));
  std::vector<std::vector<Welford>> acc(chunks, std::vector<Welford>(T));
  parallel_chunks(static_cast<std::size_t>(trials), jobs, chunks,
                  [&](std::size_t chunk, std::size_t begin, std::size_t end) {
                    DiffusionScratch scratch(g);
                    for (std::size_t j = begin; j < end; ++j) {
                      const std::uint64_t draw_key = derive_seed(seed, j);
                      scratch.begin_union();
                      for (std::uint32_t t = 1; t <= T; ++t) {
                        scratch.run_round(sched.round(t), CoinHash{derive_seed(draw_key, t)});
                        acc[chunk][t - 1].add(static_cast<double>(scratch.union_size()));
                      }
                    }
                  });
  std::vector<SpreadEstimate> out(T);
  for (std::uint32_t t = 0; t < T; ++t) {
    Welford total;
    for (std::size_t c = 0; c < chunks; ++c) total.merge(acc[c][t]);
    out[t] = SpreadEstimate::from(total);
  }
  return out;
}

struct PolicyEvaluation {
  std::vector<SpreadEstimate> per_round;  // cumulative |A_t|
  double mean_trial_seconds = 0.0;
};

// Adaptive evaluation: the policy is re-run against every sampled
// realization, as the feedback loop requires.
inline PolicyEvaluation evaluate_policy_rounds(const Graph& g, std::uint32_t T, std::uint32_t k,
                                               const Policy& policy, std::uint64_t trials,
                                               std::uint64_t env_seed, int jobs = 1,
                                               bool measure_time = true) {
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  const std::size_t chunks = std::min<std::size_t>(64, static_cast<std::size_t>(trials));
  std::vector<std::vector<Welford>> acc(chunks, std::vector<Welford>(T));
  std::vector<double> seconds(chunks, 0.0);
  parallel_chunks(static_cast<std::size_t>(trials), jobs, chunks,
                  [&](std::size_t chunk, std::size_t begin, std::size_t end) {
                    for (std::size_t i = begin; i < end; ++i) {
                      const auto start = std::chrono::steady_clock::now();
                      Environment env = Environment::sampled(g, T, derive_seed(env_seed, i));
                      auto run = run_policy(env, policy, T, k);
                      const auto stop = std::chrono::steady_clock::now();
                      seconds[chunk] += std::chrono::duration<double>(stop - start).count();
                      std::size_t cumulative = 0;
                      for (std::uint32_t t = 1; t <= T; ++t) {
                        cumulative += run.trace.history[t - 1].newly_activated.size();
                        acc[chunk][t - 1].add(static_cast<double>(cumulative));
                      }
                    }
                  });
  PolicyEvaluation out;
  out.per_round.resize(T);
  double total_seconds = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) total_seconds += seconds[c];
  out.mean_trial_seconds = measure_time ? total_seconds / static_cast<double>(trials) : 0.0;
  for (std::uint32_t t = 0; t < T; ++t) {
    Welford total;
    for (std::size_t c = 0; c < chunks; ++c) total.merge(acc[c][t]);
    out.per_round[t] = SpreadEstimate::from(total);
  }
  return out;
}

struct ExperimentConfig {
  std::vector<Algorithm> algorithms{Algorithm::SG,      Algorithm::SG_R,   Algorithm::CR_GREEDY,
                                    Algorithm::WR_GREEDY, Algorithm::CR_IMM, Algorithm::WR_IMM,
                                    Algorithm::ADA_GREEDY, Algorithm::ADA_IMM};
  std::uint32_t T = 5;
  std::uint32_t k = 10;
  std::uint64_t eval_trials = 10000;    // non-adaptive spread evaluation
  std::uint64_t adaptive_trials = 100;  // adaptive policy evaluation
  std::uint64_t r = 10000;              // simulations per greedy estimate
  double eps = 0.5;
  double ell = 1.0;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool measure_time = true;  // off: seconds column written as 0 (byte-stable outputs)

  void validate() const {
    if (T == 0 || k == 0) throw std::invalid_argument("T and k must be >= 1");
    if (algorithms.empty()) throw std::invalid_argument("no algorithms selected");
  }
};

struct ResultRow {
  std::string algorithm;
  std::uint32_t T = 0;
  std::uint32_t k = 0;
  std::uint32_t round = 0;
  double mean = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double seconds = 0.0;
  std::uint64_t seed = 0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::map<std::string, SeedSchedule> schedules;  // non-adaptive algorithms
  std::map<std::string, double> select_seconds;
};

// Runs each configured algorithm, then evaluates cumulative per-round spread
// (shared evaluation draws across algorithms). Fully reproducible from the
// master seed; wall-clock seconds are the only non-deterministic field and
// can be disabled.
inline ExperimentResult run_experiment(const Graph& g, const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult result;
  const std::uint64_t eval_seed = derive_seed(cfg.seed, 0xe7a1);

  for (std::size_t idx = 0; idx < cfg.algorithms.size(); ++idx) {
    const Algorithm algo = cfg.algorithms[idx];
    const std::string name = algorithm_name(algo);
    // per-algorithm selection stream, independent of list order
    const std::uint64_t select_seed =
        derive_seed(cfg.seed, 0x5e1ec7 + static_cast<std::uint64_t>(algo));

    std::vector<SpreadEstimate> rounds;
    double seconds = 0.0;
    const auto start = std::chrono::steady_clock::now();
    if (!is_adaptive(algo)) {
      SeedSchedule schedule;
      switch (algo) {
        case Algorithm::SG:
          schedule = baseline_sg(g, cfg.T, cfg.k, cfg.r, Rng(select_seed), cfg.jobs);
          break;
        case Algorithm::SG_R:
          schedule = baseline_sg_r(g, cfg.T, cfg.k, cfg.r, Rng(select_seed), cfg.jobs);
          break;
        case Algorithm::CR_GREEDY: {
          GreedyConfig gc{cfg.k, cfg.T, cfg.r, select_seed, true, cfg.jobs};
          schedule = cr_greedy(g, gc).schedule;
          break;
        }
        case Algorithm::WR_GREEDY: {
          GreedyConfig gc{cfg.k, cfg.T, cfg.r, select_seed, true, cfg.jobs};
          schedule = wr_greedy(g, gc).schedule;
          break;
        }
        case Algorithm::CR_IMM: {
          ImmOptions opts;
          opts.jobs = cfg.jobs;
          schedule = cr_naimm(g, cfg.T, cfg.k, cfg.eps, cfg.ell, select_seed, opts).schedule;
          break;
        }
        case Algorithm::WR_IMM: {
          ImmOptions opts;
          opts.jobs = cfg.jobs;
          schedule = wr_naimm(g, cfg.T, cfg.k, cfg.eps, cfg.ell, select_seed, opts).schedule;
          break;
        }
        default: break;
      }
      seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      rounds = evaluate_schedule_rounds(g, schedule, cfg.eval_trials, eval_seed, cfg.jobs);
      result.schedules.emplace(name, std::move(schedule));
    } else {
      Policy policy = algo == Algorithm::ADA_GREEDY
                          ? ada_greedy_policy(g, cfg.k, cfg.r, select_seed, 1)
                          : ada_imm_policy(g, cfg.k, cfg.eps, cfg.ell, cfg.T, select_seed);
      auto eval = evaluate_policy_rounds(g, cfg.T, cfg.k, policy, cfg.adaptive_trials, eval_seed,
                                         cfg.jobs, cfg.measure_time);
      rounds = std::move(eval.per_round);
      seconds = eval.mean_trial_seconds;  // adaptive: mean seconds per trial run
    }
    if (!cfg.measure_time) seconds = 0.0;
    result.select_seconds[name] = seconds;

    for (std::uint32_t t = 1; t <= cfg.T; ++t) {
      const auto& est = rounds[t - 1];
      result.rows.push_back(ResultRow{name, cfg.T, cfg.k, t, est.mean, est.ci_lo, est.ci_hi,
                                      seconds, cfg.seed});
    }
  }
  return result;
}

inline void write_csv(std::ostream& out, std::span<const ResultRow> rows) {
  out << "algorithm,T,k,round,mean,ci_lo,ci_hi,seconds,seed\n";
  char buf[256];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%s,%u,%u,%u,%.6f,%.6f,%.6f,%.6f,%llu\n",
                  row.algorithm.c_str(), row.T, row.k, row.round, row.mean, row.ci_lo, row.ci_hi,
                  row.seconds, static_cast<unsigned long long>(row.seed));
    out << buf;
  }
}

inline nlohmann::json rows_to_json(std::span<const ResultRow> rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : rows) {
    arr.push_back({{"algorithm", row.algorithm},
                   {"T", row.T},
                   {"k", row.k},
                   {"round", row.round},
                   {"mean", row.mean},
                   {"ci_lo", row.ci_lo},
                   {"ci_hi", row.ci_hi},
                   {"seconds", row.seconds},
                   {"seed", row.seed}});
  }
  return arr;
}

inline void write_json(std::ostream& out, std::span<const ResultRow> rows) {
  out << rows_to_json(rows).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Bench presets: desk-scale analogues of the evaluation protocol. Real
// datasets are not bundled; presets generate documented synthetic stand-ins,
// and callers may substitute an external edge list.

// Ordering preset: 2000-node scale-free WC graph, T=5, k=10, baselines vs
// the scalable MRIM algorithms.
inline Graph ordering_preset_graph(std::uint64_t seed) {
  return Graph::power_law(2000, 2.5, WeightScheme::weighted_cascade(), derive_seed(seed, 0x0a1));
}

inline ExperimentConfig ordering_preset_config(std::uint64_t seed, int jobs) {
  ExperimentConfig cfg;
  cfg.algorithms = {Algorithm::SG, Algorithm::SG_R, Algorithm::WR_IMM, Algorithm::CR_IMM,
                    Algorithm::ADA_IMM};
  cfg.T = 5;
  cfg.k = 10;
  cfg.eval_trials = 10000;
  cfg.adaptive_trials = 100;
  cfg.r = 300;  // baseline selection estimates; evaluation stays at 10000
  cfg.eps = 0.5;
  cfg.ell = 1.0;
  cfg.seed = seed;
  cfg.jobs = jobs;
  return cfg;
}

struct ParityReport {
  std::vector<ResultRow> rows;
  double greedy_seconds = 0.0;
  double imm_seconds = 0.0;
  double greedy_mean = 0.0;  // spread at round T
  double imm_mean = 0.0;
  double gap_fraction = 0.0;      // |imm - greedy| / greedy
  double seconds_fraction = 0.0;  // imm / greedy
};

// Parity preset: WR-IMM against WR-Greedy(r=1000) on a 1000-node scale-free
// WC graph, T=3, k=5; reports the spread gap and the wall-clock ratio.
inline ParityReport run_parity_bench(std::uint64_t seed, int jobs, bool measure_time = true) {
  Graph g = Graph::power_law(1000, 2.5, WeightScheme::weighted_cascade(), derive_seed(seed, 0x9a2));
  const std::uint32_t T = 3, k = 5;
  ParityReport report;

  auto t0 = std::chrono::steady_clock::now();
  GreedyConfig gc{k, T, 1000, derive_seed(seed, 0x91), true, jobs};
  SeedSchedule greedy_schedule = wr_greedy(g, gc).schedule;
  auto t1 = std::chrono::steady_clock::now();
  ImmOptions opts;
  opts.jobs = jobs;
  SeedSchedule imm_schedule =
      wr_naimm(g, T, k, 0.5, 1.0, derive_seed(seed, 0x92), opts).schedule;
  auto t2 = std::chrono::steady_clock::now();
  report.greedy_seconds = std::chrono::duration<double>(t1 - t0).count();
  report.imm_seconds = std::chrono::duration<double>(t2 - t1).count();

  const std::uint64_t eval_seed = derive_seed(seed, 0xe7a1);
  auto greedy_rounds = evaluate_schedule_rounds(g, greedy_schedule, 10000, eval_seed, jobs);
  auto imm_rounds = evaluate_schedule_rounds(g, imm_schedule, 10000, eval_seed, jobs);
  for (std::uint32_t t = 1; t <= T; ++t) {
    const auto& ge = greedy_rounds[t - 1];
    const auto& ie = imm_rounds[t - 1];
    const double gs = measure_time ? report.greedy_seconds : 0.0;
    const double is = measure_time ? report.imm_seconds : 0.0;
    report.rows.push_back(ResultRow{"wr-greedy", T, k, t, ge.mean, ge.ci_lo, ge.ci_hi, gs, seed});
    report.rows.push_back(ResultRow{"wr-imm", T, k, t, ie.mean, ie.ci_lo, ie.ci_hi, is, seed});
  }
  report.greedy_mean = greedy_rounds[T - 1].mean;
  report.imm_mean = imm_rounds[T - 1].mean;
  report.gap_fraction = std::abs(report.imm_mean - report.greedy_mean) / report.greedy_mean;
  report.seconds_fraction = report.imm_seconds / report.greedy_seconds;
  return report;
}

// Degree-of-adaptiveness preset: AdaIMM on a 500-node graph with a fixed
// total budget T*k = 8 split four ways.
inline std::vector<ResultRow> run_adaptiveness_bench(std::uint64_t seed, int jobs,
                                                     std::uint64_t trials = 100,
                                                     bool measure_time = true) {
  Graph g = Graph::power_law(500, 2.5, WeightScheme::weighted_cascade(), derive_seed(seed, 0xada));
  std::vector<ResultRow> rows;
  const std::pair<std::uint32_t, std::uint32_t> sweep[] = {{1, 8}, {2, 4}, {4, 2}, {8, 1}};
  for (auto [T, k] : sweep) {
    Policy policy = ada_imm_policy(g, k, 0.5, 1.0, T, derive_seed(seed, 0x5e1ec7));
    auto eval = evaluate_policy_rounds(g, T, k, policy, trials, derive_seed(seed, 0xe7a1), jobs,
                                       measure_time);
    for (std::uint32_t t = 1; t <= T; ++t) {
      const auto& est = eval.per_round[t - 1];
      rows.push_back(ResultRow{"ada-imm", T, k, t, est.mean, est.ci_lo, est.ci_hi,
                               eval.mean_trial_seconds, seed});
    }
  }
  return rows;
}

}  // namespace mrim
