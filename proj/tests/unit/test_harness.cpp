#include <gtest/gtest.h>

#include <atomic>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "tdcarp/harness.hpp"

using namespace tdcarp;

namespace {

ExperimentConfig fixture_config(int reps, int generations) {
  ExperimentConfig cfg;
  for (const char* name : {"micro-A.td", "micro-B.td"}) cfg.instances.push_back(InstanceSpec{fixtures::data_path(name), {}, {}});
  cfg.repetitions = reps;
  cfg.stop.generations = generations;
  cfg.params.gnum = generations;
  cfg.workers = 4;
  return cfg;
}

/// U of `a` by direct pair counting.
double direct_u(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0.0;
  for (double x : a) {
    for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  }
  return u;
}

std::set<std::string> keys_of(const nlohmann::json& j) {
  std::set<std::string> out;
  for (auto it = j.begin(); it != j.end(); ++it) out.insert(it.key());
  return out;
}

std::set<std::string> as_set(const nlohmann::json& arr) { return {arr.begin(), arr.end()}; }

}  // namespace

TEST(Pdr, Formula) {
  EXPECT_EQ(pdr(339.0, 339.0), 0.0);
  EXPECT_NEAR(pdr(345.0, 339.0), 1.7699115, 1e-6);
  EXPECT_EQ(pdr(20.0, 10.0), 100.0);
  EXPECT_THROW(pdr(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(pdr(1.0, -2.0), std::invalid_argument);
}

TEST(RankSum, IdenticalSamplesAreEquivalent) {
  const std::vector<double> a = {3, 1, 4, 1, 5, 9, 2, 6};
  EXPECT_EQ(rank_sum_test(a, a).outcome, Comparison::Equivalent);
  const std::vector<double> same(6, 2.0);
  EXPECT_EQ(rank_sum_test(same, same).outcome, Comparison::Equivalent);
}

TEST(RankSum, FullSeparation) {
  std::vector<double> a, b;
  for (int i = 1; i <= 20; ++i) {
    a.push_back(i);
    b.push_back(100 + i);
  }
  EXPECT_EQ(rank_sum_test(a, b).outcome, Comparison::Better);
  EXPECT_EQ(rank_sum_test(b, a).outcome, Comparison::Worse);
}

TEST(RankSum, KnownStatistic) {
  const std::vector<double> a = {12.1, 14.3, 15.0, 15.0, 16.2, 18.9, 19.4, 21.0};
  const std::vector<double> b = {15.0, 17.7, 20.1, 22.4, 23.8, 24.0, 25.5, 26.3, 27.0};
  const RankSumResult r = rank_sum_test(a, b);
  EXPECT_EQ(direct_u(a, b), 9.0);
  EXPECT_EQ(r.u_a, direct_u(a, b));
  EXPECT_EQ(r.u_b, direct_u(b, a));
  EXPECT_EQ(r.u_a + r.u_b, static_cast<double>(a.size() * b.size()));
  // Normal approximation with tie correction, no continuity correction.
  EXPECT_NEAR(r.p_value, 0.0092017, 1e-3);
  EXPECT_EQ(r.outcome, Comparison::Better);
}

TEST(RankSum, Symmetry) {
  Rng rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(12), b(15);
    const double shift = trial % 3 == 0 ? 0.0 : 1.0;
    for (double& x : a) x = std::round(n(rng) * 4) / 4;
    for (double& x : b) x = std::round((n(rng) + shift) * 4) / 4;
    const RankSumResult ab = rank_sum_test(a, b), ba = rank_sum_test(b, a);
    EXPECT_NEAR(ab.p_value, ba.p_value, 1e-12);
    EXPECT_EQ(ab.u_a, ba.u_b);
    if (ab.outcome == Comparison::Equivalent) EXPECT_EQ(ba.outcome, Comparison::Equivalent);
    if (ab.outcome == Comparison::Better) EXPECT_EQ(ba.outcome, Comparison::Worse);
    if (ab.outcome == Comparison::Worse) EXPECT_EQ(ba.outcome, Comparison::Better);
  }
}

TEST(RankSum, RejectsTinySamples) {
  EXPECT_THROW(rank_sum_test({1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST(Summary, MeanStdMedian) {
  EXPECT_EQ(mean({1, 2, 3, 4}), 2.5);
  EXPECT_NEAR(sample_std({2, 4, 4, 4, 5, 5, 7, 9}), 2.1380899, 1e-6);
  EXPECT_EQ(sample_std({5}), 0.0);
  EXPECT_EQ(median({5, 1, 3}), 3.0);
  EXPECT_EQ(median({4, 1, 3, 2}), 2.5);
}

TEST(Config, ParsesKeys) {
  std::istringstream in(
      "# comment\ninstance = a.td\ninstance = b.td\nreps = 5\nseed = 9\ngenerations = 30\nwallclock = 2.5\n"
      "psize = 12\nosnum = 40\npls = 0.2\nlambda = inf\npf = 0.3\ninit = baseline\noperators = traditional\n"
      "stage2 = false\nworkers = 3\nout = results\nreference.a = 316\n");
  const ExperimentConfig cfg = parse_config(in);
  ASSERT_EQ(cfg.instances.size(), 2u);
  EXPECT_EQ(cfg.instances[1].path, "b.td");
  EXPECT_EQ(cfg.repetitions, 5);
  EXPECT_EQ(cfg.base_seed, 9u);
  EXPECT_EQ(cfg.stop.generations, 30);
  EXPECT_EQ(cfg.params.gnum, 30);
  EXPECT_EQ(cfg.stop.wallclock_seconds, 2.5);
  EXPECT_EQ(cfg.params.psize, 12);
  EXPECT_EQ(cfg.params.osnum, 40);
  EXPECT_EQ(cfg.params.pls, 0.2);
  EXPECT_TRUE(std::isinf(cfg.params.lambda));
  EXPECT_EQ(cfg.params.pf, 0.3);
  EXPECT_EQ(cfg.params.init, InitMode::Baseline);
  EXPECT_EQ(cfg.params.operators, OperatorMode::Traditional);
  EXPECT_FALSE(cfg.optimize_departures);
  EXPECT_EQ(cfg.workers, 3);
  EXPECT_EQ(cfg.output_dir, "results");
  EXPECT_EQ(cfg.references.at("a"), 316.0);
}

TEST(Config, Errors) {
  std::istringstream unknown("colour = red\n");
  EXPECT_THROW(parse_config(unknown), ParseError);
  std::istringstream bad("reps = many\n");
  EXPECT_THROW(parse_config(bad), ParseError);
  std::istringstream no_eq("reps 5\n");
  EXPECT_THROW(parse_config(no_eq), ParseError);
  ExperimentConfig cfg = fixture_config(0, 1);
  EXPECT_THROW(validate(cfg), std::invalid_argument);
}

TEST(RunExperiment, SingleRepetition) {
  const ExperimentReport report = run_experiment(fixture_config(1, 5));
  ASSERT_EQ(report.rows.size(), 2u);
  for (const InstanceRow& row : report.rows) {
    EXPECT_EQ(row.runs, 1);
    EXPECT_EQ(row.ave, row.best);
    EXPECT_EQ(row.std, 0.0);
  }
}

TEST(RunExperiment, DeterministicAcrossPoolSizes) {
  ExperimentConfig cfg = fixture_config(3, 5);
  const ExperimentReport a = run_experiment(cfg);
  cfg.workers = 1;
  const ExperimentReport b = run_experiment(cfg);
  ASSERT_EQ(a.runs.size(), b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    EXPECT_EQ(a.runs[i].instance, b.runs[i].instance);
    EXPECT_EQ(a.runs[i].seed, b.runs[i].seed);
    EXPECT_EQ(a.runs[i].tc, b.runs[i].tc);
  }
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].ave, b.rows[i].ave);
    EXPECT_GE(a.rows[i].std, 0.0);
    EXPECT_LE(a.rows[i].best, a.rows[i].ave);
  }
  EXPECT_EQ(a.runs[0].seed, cfg.base_seed);
  EXPECT_EQ(a.runs[2].seed, cfg.base_seed + 2);
}

TEST(RunExperiment, LoadFailureGivesErrorRow) {
  ExperimentConfig cfg = fixture_config(1, 2);
  cfg.instances.insert(cfg.instances.begin(), InstanceSpec{"/nonexistent.td", {}, "missing"});
  const ExperimentReport report = run_experiment(cfg);
  ASSERT_EQ(report.rows.size(), 3u);
  EXPECT_FALSE(report.rows[0].error.empty());
  EXPECT_TRUE(report.rows[1].error.empty());
}

TEST(Aggregate, RecomputesFromRuns) {
  ExperimentConfig cfg = fixture_config(4, 3);
  cfg.references["micro-A"] = 40.0;
  const ExperimentReport report = run_experiment(cfg);
  const std::vector<InstanceRow> rows = aggregate(report.runs, cfg.references);
  ASSERT_EQ(rows.size(), report.rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].ave, report.rows[i].ave);
    EXPECT_EQ(rows[i].std, report.rows[i].std);
    EXPECT_EQ(rows[i].best, report.rows[i].best);
  }
  ASSERT_TRUE(rows[0].ave_pdr.has_value());
  EXPECT_NEAR(*rows[0].ave_pdr, pdr(rows[0].ave, 40.0), 1e-12);
  EXPECT_FALSE(rows[1].ave_pdr.has_value());
  ASSERT_TRUE(report.ave_pdr.has_value());
  EXPECT_EQ(*report.ave_pdr, *rows[0].ave_pdr);
}

TEST(Compare, WinDrawLossAndBestCounts) {
  ExperimentReport good, bad;
  for (int i = 0; i < 10; ++i) {
    good.runs.push_back(RunRecord{"x", i, 0, true, 10.0 + i * 0.1});
    bad.runs.push_back(RunRecord{"x", i, 0, true, 20.0 + i * 0.1});
    good.runs.push_back(RunRecord{"y", i, 0, true, 5.0 + (i % 3)});
    bad.runs.push_back(RunRecord{"y", i, 0, true, 5.0 + ((i + 1) % 3)});
  }
  good.rows = aggregate(good.runs, {});
  bad.rows = aggregate(bad.runs, {});
  const WinDrawLoss wdl = compare(good, bad);
  EXPECT_EQ(wdl.win, 1);
  EXPECT_EQ(wdl.draw, 1);
  EXPECT_EQ(wdl.loss, 0);
  EXPECT_EQ(wdl.per_instance.at("x"), Comparison::Better);
  const std::vector<int> best = count_best({&good, &bad});
  EXPECT_EQ(best, (std::vector<int>{2, 1}));
}

TEST(Output, JsonAndCsvFollowGoldenSchema) {
  std::ifstream schema_file(fixtures::data_path("report_schema.json"));
  const nlohmann::json schema = nlohmann::json::parse(schema_file);
  ExperimentConfig cfg = fixture_config(5, 50);
  const ExperimentReport report = run_experiment(cfg);
  std::ostringstream json_out, csv_out;
  write_report_json(json_out, report);
  write_report_csv(csv_out, report);
  const nlohmann::json j = nlohmann::json::parse(json_out.str());
  EXPECT_EQ(keys_of(j), as_set(schema["top"]));
  ASSERT_EQ(j["rows"].size(), 2u);
  for (const auto& row : j["rows"]) EXPECT_EQ(keys_of(row), as_set(schema["row"]));
  ASSERT_EQ(j["runs"].size(), 10u);
  for (const auto& run : j["runs"]) EXPECT_EQ(keys_of(run), as_set(schema["run"]));
  const std::string csv = csv_out.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), schema["report_csv_header"].get<std::string>());
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(AblationTiming, CounterInequalityAndRatioColumn) {
  ExperimentConfig cfg;
  GeneratorSpec gen;
  gen.synthetic.n_vertices = 30;
  gen.synthetic.n_edges = 50;
  gen.synthetic.n_required = 35;
  gen.type = InstanceType::TwoSegment;
  cfg.instances.push_back(InstanceSpec{{}, gen, "syn"});
  cfg.repetitions = 1;
  cfg.stop.generations = 3;
  cfg.params.gnum = 3;
  cfg.params.pls = 1.0;
  const std::vector<TimingRow> rows = ablation_timing(cfg);
  ASSERT_EQ(rows.size(), 1u);
  const int sw = static_cast<int>(MoveKind::Swap);
  EXPECT_LE(rows[0].kg_evaluations[sw], rows[0].traditional_evaluations[sw]);
  EXPECT_EQ(rows[0].count_ratio(MoveKind::Swap),
            static_cast<double>(rows[0].traditional_evaluations[sw]) / rows[0].kg_evaluations[sw]);
  EXPECT_EQ(rows[0].time_ratio(MoveKind::Swap), rows[0].traditional_seconds[sw] / rows[0].kg_seconds[sw]);
  std::ostringstream csv;
  write_timing_csv(csv, rows);
  EXPECT_NE(csv.str().find("ratio"), std::string::npos);
}

TEST(AblationInit, PairedSeeds) {
  ExperimentConfig cfg = fixture_config(6, 0);
  const std::vector<InitAblationRow> rows = ablation_init(cfg);
  ASSERT_EQ(rows.size(), 2u);
  for (const InitAblationRow& row : rows) {
    EXPECT_EQ(row.kgis_best.size(), 6u);
    EXPECT_EQ(row.baseline_best.size(), 6u);
    EXPECT_EQ(row.kgis_mean, mean(row.kgis_best));
  }
}

TEST(RuntimeToTarget, Cases) {
  ExperimentConfig cfg = fixture_config(1, 50);
  cfg.instances.resize(1);
  // Unbounded target: met by the initial population.
  auto rows = runtime_to_target(cfg, {{"micro-A", kInfinity}});
  ASSERT_EQ(rows.size(), 1u);
  ASSERT_TRUE(rows[0].seconds[0].has_value());
  EXPECT_EQ(rows[0].generations[0], 0);

  // Target equal to the best initial individual.
  Instance inst = fixtures::load("micro-A.td");
  const auto sp = all_pairs_shortest_paths(inst);
  MemeticParams params;
  params.gnum = 0;
  Rng rng(cfg.base_seed);
  const double init_best = kgma_run(inst, sp, params, rng, StopRule{}).init_best_tc;
  rows = runtime_to_target(cfg, {{"micro-A", init_best}});
  EXPECT_EQ(rows[0].generations[0], 0);
  EXPECT_TRUE(rows[0].seconds[0].has_value());

  // Below the exact optimum: runs out the cap.
  rows = runtime_to_target(cfg, {{"micro-A", 1.0}});
  EXPECT_FALSE(rows[0].seconds[0].has_value());
  EXPECT_EQ(rows[0].generations[0], kTargetGenerationCap);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 7, [&](int i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  parallel_for(0, 3, [](int) { FAIL(); });
}
