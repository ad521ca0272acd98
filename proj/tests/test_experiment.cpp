#include "mrim/experiment.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mrim/bruteforce.hpp"
#include "test_support.hpp"

namespace mrim {
namespace {

using testing::hub_plus_isolated;
using testing::make_schedule;
using testing::no_edges;
using testing::random_graph_m;

TEST(BaselineSg, HubChunksGreedyPicksInOrder) {
  Graph g = hub_plus_isolated();
  auto schedule = baseline_sg(g, 2, 1, make_exact_weighted_evaluator(g, {}), 1);
  EXPECT_EQ(schedule, make_schedule({{0}, {4}}));
  EXPECT_DOUBLE_EQ(spread_exact(g, schedule), 5.0);
}

TEST(BaselineSg, ZeroProbabilityPicksDistinctNodes) {
  Graph g = no_edges(6);
  auto schedule = baseline_sg(g, 2, 2, make_exact_weighted_evaluator(g, {}), 1);
  EXPECT_DOUBLE_EQ(spread_exact(g, schedule), 4.0);
}

TEST(BaselineSg, BudgetBeyondNodesRejected) {
  Graph g = no_edges(3);
  EXPECT_THROW(baseline_sg(g, 2, 2, make_exact_weighted_evaluator(g, {}), 1),
               std::invalid_argument);
}

TEST(BaselineSgR, ReusesTheSameSeedsEveryRound) {
  Graph g = hub_plus_isolated();
  auto schedule = baseline_sg_r(g, 2, 1, make_exact_weighted_evaluator(g, {}), 1);
  EXPECT_EQ(schedule, make_schedule({{0}, {0}}));
  EXPECT_DOUBLE_EQ(spread_exact(g, schedule), 4.0);  // weaker than SG's 5 here
}

TEST(BaselineSgR, ZeroProbabilitySpreadIsK) {
  Graph g = no_edges(5);
  auto schedule = baseline_sg_r(g, 3, 2, make_exact_weighted_evaluator(g, {}), 1);
  EXPECT_DOUBLE_EQ(spread_exact(g, schedule), 2.0);
}

TEST(Baselines, SingleRoundReductionsAgreeWithWrGreedy) {
  Graph g = random_graph_m(8, 12, 0.1, 0.9, 5);
  auto sg = baseline_sg(g, 1, 2, make_exact_weighted_evaluator(g, {}), 3);
  auto sg_r = baseline_sg_r(g, 1, 2, make_exact_weighted_evaluator(g, {}), 3);
  GreedyConfig cfg{2, 1, 1, 3, true, 1};
  auto wr = wr_greedy(g, cfg, make_exact_schedule_evaluator(g));
  EXPECT_EQ(sg, wr.schedule);
  EXPECT_EQ(sg_r, wr.schedule);
}

TEST(StatsSummary, HandArithmetic) {
  const double samples[] = {1.0, 2.0, 3.0};
  auto est = stats_summary(samples);
  EXPECT_DOUBLE_EQ(est.mean, 2.0);
  EXPECT_NEAR(est.stderr_mean, 1.0 / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(est.ci_hi - est.mean, 1.96 / std::sqrt(3.0), 1e-12);
}

TEST(StatsSummary, ConstantSamplesHaveZeroStderr) {
  const double samples[] = {4.0, 4.0, 4.0, 4.0};
  auto est = stats_summary(samples);
  EXPECT_DOUBLE_EQ(est.stderr_mean, 0.0);
}

TEST(StatsSummary, SingleSampleCiUndefined) {
  const double samples[] = {4.0};
  auto est = stats_summary(samples);
  EXPECT_FALSE(est.ci_defined());
}

TEST(EvaluateScheduleRounds, CumulativeMeansNonDecreasing) {
  Graph g = random_graph_m(20, 50, 0.1, 0.6, 9);
  SeedSchedule s = make_schedule({{0, 3}, {5}, {2, 7}});
  auto rounds = evaluate_schedule_rounds(g, s, 2000, 11);
  ASSERT_EQ(rounds.size(), 3u);
  EXPECT_LE(rounds[0].mean, rounds[1].mean + 1e-12);
  EXPECT_LE(rounds[1].mean, rounds[2].mean + 1e-12);
}

TEST(EvaluateScheduleRounds, MatchesExactOraclePerRound) {
  Graph g = random_graph_m(5, 5, 0.2, 0.8, 13);
  SeedSchedule s = make_schedule({{0, 2}, {1}});
  auto rounds = evaluate_schedule_rounds(g, s, 50000, 17);
  for (std::uint32_t t = 1; t <= 2; ++t) {
    const double exact = spread_exact(g, s.prefix(t));
    EXPECT_NEAR(rounds[t - 1].mean, exact, 3.0 * rounds[t - 1].stderr_mean + 1e-9) << "round " << t;
  }
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.T = 2;
  cfg.k = 1;
  cfg.r = 200;
  cfg.eval_trials = 500;
  cfg.adaptive_trials = 50;
  cfg.eps = 0.4;
  cfg.seed = 99;
  cfg.measure_time = false;
  return cfg;
}

TEST(RunExperiment, AllAlgorithmsProduceMonotoneRows) {
  Graph g = random_graph_m(25, 60, 0.1, 0.5, 21);
  ExperimentConfig cfg = small_config();
  auto result = run_experiment(g, cfg);
  EXPECT_EQ(result.rows.size(), cfg.algorithms.size() * cfg.T);
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& row = result.rows[i];
    if (row.round > 1) {
      const auto& prev = result.rows[i - 1];
      ASSERT_EQ(prev.algorithm, row.algorithm);
      EXPECT_LE(prev.mean, row.mean + 1e-12);
    }
  }
  EXPECT_EQ(result.schedules.size(), 6u);  // non-adaptive algorithms
}

TEST(RunExperiment, CsvIsByteReproducible) {
  Graph g = random_graph_m(25, 60, 0.1, 0.5, 21);
  ExperimentConfig cfg = small_config();
  std::ostringstream a, b;
  write_csv(a, run_experiment(g, cfg).rows);
  write_csv(b, run_experiment(g, cfg).rows);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_TRUE(a.str().starts_with("algorithm,T,k,round,mean,ci_lo,ci_hi,seconds,seed\n"));
}

TEST(RunExperiment, JsonRowsMatchCsvRows) {
  Graph g = random_graph_m(15, 30, 0.1, 0.5, 23);
  ExperimentConfig cfg = small_config();
  cfg.algorithms = {Algorithm::SG, Algorithm::WR_IMM};
  auto result = run_experiment(g, cfg);
  auto json = rows_to_json(result.rows);
  ASSERT_EQ(json.size(), result.rows.size());
  EXPECT_EQ(json[0]["algorithm"], result.rows[0].algorithm);
  EXPECT_EQ(json[0]["round"], 1u);
}

TEST(AlgorithmNames, RoundTrip) {
  for (Algorithm a : {Algorithm::SG, Algorithm::SG_R, Algorithm::CR_GREEDY, Algorithm::WR_GREEDY,
                      Algorithm::CR_IMM, Algorithm::WR_IMM, Algorithm::ADA_GREEDY,
                      Algorithm::ADA_IMM})
    EXPECT_EQ(parse_algorithm(algorithm_name(a)), a);
  EXPECT_THROW(parse_algorithm("bogus"), std::invalid_argument);
}

}  // namespace
}  // namespace mrim
