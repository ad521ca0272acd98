// mrim command-line interface: graph generation, spread estimation, seed
// selection, adaptive runs, benchmark presets, and exact-enumeration
// utilities.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mrim/adaptive.hpp"
#include "mrim/bruteforce.hpp"
#include "mrim/experiment.hpp"

namespace {

using namespace mrim;

struct GraphArgs {
  std::string path;
  std::string scheme = "file";
  double p = 0.1;
  std::uint64_t seed = 0;
};

void add_graph_options(CLI::App* cmd, GraphArgs& args, bool required = true) {
  auto* opt = cmd->add_option("--graph", args.path, "edge-list file ('u v [p]', optional '# n m' header)");
  if (required) opt->required();
  cmd->add_option("--scheme", args.scheme, "edge weights: file|const|wc|tri")
      ->check(CLI::IsMember({"file", "const", "wc", "tri"}));
  cmd->add_option("--p", args.p, "probability for --scheme const");
}

WeightScheme scheme_from(const std::string& name, double p, std::uint64_t seed) {
  if (name == "file") return WeightScheme::from_file();
  if (name == "const") return WeightScheme::constant(p);
  if (name == "wc") return WeightScheme::weighted_cascade();
  if (name == "tri") return WeightScheme::trivalency(seed);
  throw std::invalid_argument("unknown scheme: " + name);
}

Graph load_graph(const GraphArgs& args, std::uint64_t master_seed) {
  return Graph::load_edge_list(args.path, scheme_from(args.scheme, args.p, master_seed));
}

SeedSchedule load_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mrim::ParseError("cannot open schedule file: " + path);
  return SeedSchedule::parse(in);
}

// Writes to the path or stdout when the path is empty.
void with_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  fn(out);
}

void write_rows(const std::string& path, const std::string& format,
                std::span<const ResultRow> rows) {
  with_output(path, [&](std::ostream& out) {
    if (format == "json")
      write_json(out, rows);
    else
      write_csv(out, rows);
  });
}

int run(int argc, char** argv) {
  CLI::App app{"multi-round influence maximization toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // --seed/--jobs may appear after the subcommand

  std::uint64_t seed = 0;
  int jobs = 1;
  app.add_option("--seed", seed, "master seed (all randomness derives from it)")
      ->capture_default_str();
  app.add_option("--jobs", jobs, "worker threads")->capture_default_str();

  std::string out_path;
  std::string out_format = "csv";
  std::string timing = "wall";

  // gen-graph
  auto* gen = app.add_subcommand("gen-graph", "generate a synthetic graph");
  std::string kind = "power_law";
  std::uint32_t nodes = 1000;
  double avg_deg = 4.0, exponent = 2.5;
  std::string gen_scheme = "wc";
  double gen_p = 0.1;
  gen->add_option("--kind", kind, "erdos_renyi|power_law")
      ->check(CLI::IsMember({"erdos_renyi", "power_law"}));
  gen->add_option("-n,--nodes", nodes, "node count")->capture_default_str();
  gen->add_option("--avg-deg", avg_deg, "mean out-degree (erdos_renyi)")->capture_default_str();
  gen->add_option("--exponent", exponent, "degree exponent (power_law)")->capture_default_str();
  gen->add_option("--gen-scheme", gen_scheme, "edge weights: const|wc|tri")
      ->check(CLI::IsMember({"const", "wc", "tri"}));
  gen->add_option("--p", gen_p, "probability for const weights");
  gen->add_option("-o,--output", out_path, "output edge-list file (default stdout)");

  // spread
  auto* spread = app.add_subcommand("spread", "estimate rho of a schedule by simulation");
  GraphArgs spread_graph;
  add_graph_options(spread, spread_graph);
  std::string schedule_path;
  std::uint64_t r = 10000;
  bool per_round = false;
  spread->add_option("--schedule", schedule_path, "schedule file ('round node' lines)")->required();
  spread->add_option("-r", r, "simulation count")->capture_default_str();
  spread->add_flag("--per-round", per_round, "emit cumulative per-round rows");
  spread->add_option("--out", out_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  spread->add_option("-o,--output", out_path, "output file (default stdout)");

  // select
  auto* select = app.add_subcommand("select", "run a seed-selection algorithm");
  GraphArgs select_graph;
  add_graph_options(select, select_graph);
  std::string algo = "wr-imm";
  std::uint32_t T = 5, k = 10;
  std::uint64_t select_r = 10000;
  double eps = 0.5, ell = 1.0;
  std::string trace_path;
  select->add_option("--algo", algo,
                     "sg|sg-r|cr-greedy|wr-greedy|cr-imm|wr-imm|ada-greedy|ada-imm")
      ->required();
  select->add_option("-T", T, "rounds")->capture_default_str();
  select->add_option("-k", k, "seeds per round")->capture_default_str();
  select->add_option("-r", select_r, "simulations per greedy estimate")->capture_default_str();
  select->add_option("--eps", eps, "IMM accuracy parameter")->capture_default_str();
  select->add_option("--ell", ell, "IMM confidence parameter")->capture_default_str();
  select->add_option("-o,--output", out_path, "schedule output file (default stdout)");
  select->add_option("--trace", trace_path, "adaptive trace output (JSON lines)");

  // adaptive
  auto* adaptive = app.add_subcommand("adaptive", "evaluate an adaptive policy over trials");
  GraphArgs adaptive_graph;
  add_graph_options(adaptive, adaptive_graph);
  std::string ada_algo = "ada-imm";
  std::uint32_t ada_T = 5, ada_k = 10;
  std::uint64_t trials = 100, ada_r = 10000;
  double ada_eps = 0.5, ada_ell = 1.0;
  adaptive->add_option("--algo", ada_algo, "ada-greedy|ada-imm")
      ->check(CLI::IsMember({"ada-greedy", "ada-imm"}));
  adaptive->add_option("-T", ada_T, "rounds")->capture_default_str();
  adaptive->add_option("-k", ada_k, "seeds per round")->capture_default_str();
  adaptive->add_option("--trials", trials, "evaluation trials")->capture_default_str();
  adaptive->add_option("-r", ada_r, "simulations per greedy estimate")->capture_default_str();
  adaptive->add_option("--eps", ada_eps, "IMM accuracy parameter")->capture_default_str();
  adaptive->add_option("--ell", ada_ell, "IMM confidence parameter")->capture_default_str();
  adaptive->add_option("--out", out_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  adaptive->add_option("-o,--output", out_path, "output file (default stdout)");
  adaptive->add_option("--timing", timing, "wall|none")->check(CLI::IsMember({"wall", "none"}));

  // bench
  auto* bench = app.add_subcommand("bench", "preset experiment suites");
  GraphArgs bench_graph;
  add_graph_options(bench, bench_graph, /*required=*/false);
  std::string preset = "smoke";
  std::string algos_csv;
  std::uint32_t bench_T = 5, bench_k = 10;
  std::uint64_t bench_r = 300, eval_trials = 10000, adaptive_trials = 100;
  double bench_eps = 0.5, bench_ell = 1.0;
  bench->add_option("--preset", preset, "ordering|parity|adaptiveness|smoke|custom")
      ->check(CLI::IsMember({"ordering", "parity", "adaptiveness", "smoke", "custom"}));
  bench->add_option("--algos", algos_csv, "comma-separated algorithms (custom preset)");
  bench->add_option("-T", bench_T, "rounds (custom)")->capture_default_str();
  bench->add_option("-k", bench_k, "seeds per round (custom)")->capture_default_str();
  bench->add_option("-r", bench_r, "simulations per greedy estimate")->capture_default_str();
  bench->add_option("--trials", eval_trials, "non-adaptive evaluation trials")
      ->capture_default_str();
  bench->add_option("--adaptive-trials", adaptive_trials, "adaptive evaluation trials")
      ->capture_default_str();
  bench->add_option("--eps", bench_eps, "IMM accuracy parameter")->capture_default_str();
  bench->add_option("--ell", bench_ell, "IMM confidence parameter")->capture_default_str();
  bench->add_option("--out", out_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  bench->add_option("-o,--output", out_path, "output file (default stdout)");
  bench->add_option("--timing", timing, "wall|none (none gives byte-stable outputs)")
      ->check(CLI::IsMember({"wall", "none"}));

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exact enumeration utilities (tiny instances)");
  GraphArgs oracle_graph;
  add_graph_options(oracle, oracle_graph);
  std::string oracle_schedule;
  bool want_opt = false, want_ada_opt = false;
  std::uint32_t oracle_T = 2, oracle_k = 1;
  oracle->add_option("--schedule", oracle_schedule, "schedule file: print exact rho");
  oracle->add_flag("--opt", want_opt, "brute-force optimal non-adaptive schedule");
  oracle->add_flag("--ada-opt", want_ada_opt, "optimal adaptive policy value (DP)");
  oracle->add_option("-T", oracle_T, "rounds")->capture_default_str();
  oracle->add_option("-k", oracle_k, "seeds per round")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage error
  }
  const bool measure_time = timing == "wall";

  if (gen->parsed()) {
    WeightScheme ws = scheme_from(gen_scheme, gen_p, seed);
    Graph g = kind == "erdos_renyi" ? Graph::erdos_renyi(nodes, avg_deg, ws, seed)
                                    : Graph::power_law(nodes, exponent, ws, seed);
    with_output(out_path, [&](std::ostream& out) { g.serialize(out); });
    std::cerr << "generated " << kind << " graph: n=" << g.n() << " m=" << g.m() << "\n";
    return 0;
  }

  if (spread->parsed()) {
    Graph g = load_graph(spread_graph, seed);
    SeedSchedule schedule = load_schedule(schedule_path);
    if (per_round) {
      auto rounds = evaluate_schedule_rounds(g, schedule, r, derive_seed(seed, 0xe7a1), jobs);
      std::vector<ResultRow> rows;
      for (std::uint32_t t = 1; t <= schedule.rounds(); ++t) {
        const auto& est = rounds[t - 1];
        rows.push_back(ResultRow{"schedule", schedule.rounds(),
                                 static_cast<std::uint32_t>(schedule.max_round_size()), t, est.mean,
                                 est.ci_lo, est.ci_hi, 0.0, seed});
      }
      write_rows(out_path, out_format, rows);
    } else {
      auto est = spread_mc(g, schedule, r, Rng(derive_seed(seed, 0xe7a1)), jobs);
      nlohmann::json j{{"mean", est.mean},
                       {"stderr", est.stderr_mean},
                       {"ci_lo", est.ci_lo},
                       {"ci_hi", est.ci_hi},
                       {"r", est.r}};
      with_output(out_path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
    }
    return 0;
  }

  if (select->parsed()) {
    Graph g = load_graph(select_graph, seed);
    const Algorithm a = parse_algorithm(algo);
    const std::uint64_t select_seed = derive_seed(seed, 0x5e1ec7 + static_cast<std::uint64_t>(a));
    SeedSchedule schedule;
    std::optional<AdaptiveState> trace;
    switch (a) {
      case Algorithm::SG:
        schedule = baseline_sg(g, T, k, select_r, Rng(select_seed), jobs);
        break;
      case Algorithm::SG_R:
        schedule = baseline_sg_r(g, T, k, select_r, Rng(select_seed), jobs);
        break;
      case Algorithm::CR_GREEDY: {
        GreedyConfig gc{k, T, select_r, select_seed, true, jobs};
        schedule = cr_greedy(g, gc).schedule;
        break;
      }
      case Algorithm::WR_GREEDY: {
        GreedyConfig gc{k, T, select_r, select_seed, true, jobs};
        schedule = wr_greedy(g, gc).schedule;
        break;
      }
      case Algorithm::CR_IMM: {
        ImmOptions opts;
        opts.jobs = jobs;
        schedule = cr_naimm(g, T, k, eps, ell, select_seed, opts).schedule;
        break;
      }
      case Algorithm::WR_IMM: {
        ImmOptions opts;
        opts.jobs = jobs;
        schedule = wr_naimm(g, T, k, eps, ell, select_seed, opts).schedule;
        break;
      }
      case Algorithm::ADA_GREEDY:
      case Algorithm::ADA_IMM: {
        // one adaptive episode against a sampled environment
        Policy policy = a == Algorithm::ADA_GREEDY
                            ? ada_greedy_policy(g, k, select_r, select_seed, jobs)
                            : ada_imm_policy(g, k, eps, ell, T, select_seed);
        Environment env = Environment::sampled(g, T, derive_seed(seed, 0xe2f));
        auto run = run_policy(env, policy, T, k);
        schedule = run.schedule;
        trace = std::move(run.trace);
        break;
      }
    }
    with_output(out_path, [&](std::ostream& out) { schedule.serialize(out); });
    if (!trace_path.empty()) {
      if (!trace) throw std::invalid_argument("--trace requires an adaptive algorithm");
      std::ofstream out(trace_path);
      if (!out) throw std::runtime_error("cannot write trace file: " + trace_path);
      write_trace_jsonl(out, *trace);
    }
    return 0;
  }

  if (adaptive->parsed()) {
    Graph g = load_graph(adaptive_graph, seed);
    const Algorithm a = parse_algorithm(ada_algo);
    const std::uint64_t select_seed = derive_seed(seed, 0x5e1ec7 + static_cast<std::uint64_t>(a));
    Policy policy = a == Algorithm::ADA_GREEDY
                        ? ada_greedy_policy(g, ada_k, ada_r, select_seed, 1)
                        : ada_imm_policy(g, ada_k, ada_eps, ada_ell, ada_T, select_seed);
    auto eval = evaluate_policy_rounds(g, ada_T, ada_k, policy, trials,
                                       derive_seed(seed, 0xe7a1), jobs, measure_time);
    std::vector<ResultRow> rows;
    for (std::uint32_t t = 1; t <= ada_T; ++t) {
      const auto& est = eval.per_round[t - 1];
      rows.push_back(ResultRow{ada_algo, ada_T, ada_k, t, est.mean, est.ci_lo, est.ci_hi,
                               eval.mean_trial_seconds, seed});
    }
    write_rows(out_path, out_format, rows);
    const auto& last = eval.per_round[ada_T - 1];
    std::cerr << ada_algo << " value: " << last.mean << " [" << last.ci_lo << ", " << last.ci_hi
              << "] over " << trials << " trials\n";
    return 0;
  }

  if (bench->parsed()) {
    if (preset == "ordering") {
      Graph g = ordering_preset_graph(seed);
      ExperimentConfig cfg = ordering_preset_config(seed, jobs);
      cfg.measure_time = measure_time;
      auto result = run_experiment(g, cfg);
      write_rows(out_path, out_format, result.rows);
      return 0;
    }
    if (preset == "parity") {
      auto report = run_parity_bench(seed, jobs, measure_time);
      write_rows(out_path, out_format, report.rows);
      std::cerr << "spread gap: " << report.gap_fraction * 100.0
                << "%, wall-clock ratio: " << report.seconds_fraction << "\n";
      return 0;
    }
    if (preset == "adaptiveness") {
      auto rows = run_adaptiveness_bench(seed, jobs, adaptive_trials, measure_time);
      write_rows(out_path, out_format, rows);
      return 0;
    }

    Graph g;
    ExperimentConfig cfg;
    if (preset == "smoke") {
      g = Graph::erdos_renyi(200, 4.0, WeightScheme::constant(0.05), derive_seed(seed, 0x51));
      cfg.T = 3;
      cfg.k = 2;
      cfg.r = 200;
      cfg.eval_trials = 1000;
      cfg.adaptive_trials = 30;
    } else {  // custom
      if (bench_graph.path.empty())
        throw std::invalid_argument("custom preset requires --graph");
      g = load_graph(bench_graph, seed);
      cfg.T = bench_T;
      cfg.k = bench_k;
      cfg.eval_trials = eval_trials;
      cfg.adaptive_trials = adaptive_trials;
      if (!algos_csv.empty()) {
        cfg.algorithms.clear();
        std::istringstream ss(algos_csv);
        std::string token;
        while (std::getline(ss, token, ',')) cfg.algorithms.push_back(parse_algorithm(token));
      }
    }
    cfg.r = bench_r;
    cfg.eps = bench_eps;
    cfg.ell = bench_ell;
    cfg.seed = seed;
    cfg.jobs = jobs;
    cfg.measure_time = measure_time;
    auto result = run_experiment(g, cfg);
    write_rows(out_path, out_format, result.rows);
    return 0;
  }

  if (oracle->parsed()) {
    Graph g = load_graph(oracle_graph, seed);
    nlohmann::json j;
    if (!oracle_schedule.empty()) {
      SeedSchedule schedule = load_schedule(oracle_schedule);
      j["spread_exact"] = spread_exact(g, schedule);
    }
    if (want_opt) {
      auto opt = opt_schedule_exact(g, oracle_T, oracle_k);
      j["opt_value"] = opt.value;
      nlohmann::json sched = nlohmann::json::array();
      for (auto [v, t] : opt.schedule.pairs()) sched.push_back({{"round", t}, {"node", v}});
      j["opt_schedule"] = sched;
    }
    if (want_ada_opt) j["adaptive_opt_value"] = adaptive_opt_exact(g, oracle_T, oracle_k);
    if (j.empty()) throw std::invalid_argument("oracle needs --schedule, --opt, or --ada-opt");
    std::cout << j.dump(2) << '\n';
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const mrim::EnumerationCapError& e) {
    std::cerr << "error (resource cap): " << e.what() << "\n";
    return 3;
  } catch (const mrim::ResourceBudgetError& e) {
    std::cerr << "error (resource cap): " << e.what() << "\n";
    return 3;
  } catch (const mrim::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
