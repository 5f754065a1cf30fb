#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tdcarp/departure.hpp"
#include "tdcarp/memetic.hpp"

namespace tdcarp {

/// (c1 - c2) / c2 * 100. Throws std::invalid_argument for c2 <= 0.
double pdr(double c1, double c2);

enum class Comparison { Better, Equivalent, Worse };

const char* to_string(Comparison c);

struct RankSumResult {
  /// Mann-Whitney U of the first sample (pairs where a beats b count 1,
  /// ties 0.5, with "beats" meaning larger).
  double u_a = 0.0;
  double u_b = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  /// Lower values are better.
  Comparison outcome = Comparison::Equivalent;
};

/// Two-sided Wilcoxon rank-sum test with normal approximation and tie
/// correction. Throws std::invalid_argument when a sample has fewer than 2
/// values.
RankSumResult rank_sum_test(const std::vector<double>& a, const std::vector<double>& b, double alpha = 0.05);

double mean(const std::vector<double>& v);
/// Sample standard deviation; 0 for fewer than two values.
double sample_std(const std::vector<double>& v);
double median(std::vector<double> v);

// ---------------------------------------------------------------------------

/// Recipe for a generated instance.
struct GeneratorSpec {
  /// Classic DAT base; empty selects a synthetic base.
  std::string base_path;
  SyntheticBaseSpec synthetic;
  std::uint64_t base_seed = 1;
  InstanceType type = InstanceType::ThreeSegment;
  double slope_abs = 1.0;
  IntervalPolicy policy;
  std::uint64_t seed = 1;
};

struct InstanceSpec {
  /// Extended-DAT file; ignored when `generator` is set.
  std::string path;
  std::optional<GeneratorSpec> generator;
  /// Report label; defaults to the instance name.
  std::string label;
};

Instance load_instance(const InstanceSpec& spec);

struct ExperimentConfig {
  std::vector<InstanceSpec> instances;
  MemeticParams params;
  StopRule stop;
  int repetitions = 20;
  std::uint64_t base_seed = 1;
  bool optimize_departures = true;
  DepartureOptions departure;
  /// 0 selects the hardware concurrency.
  int workers = 0;
  std::string output_dir;
  /// Reference costs for PDR by instance label.
  std::map<std::string, double> references;
};

/// Throws std::invalid_argument on bad values.
void validate(const ExperimentConfig& cfg);

/// Reads `key = value` lines (`#` comments). Keys: instance, reps, seed,
/// generations, wallclock, target, psize, osnum, pls, lambda, pf, init,
/// operators, stage2, workers, out, reference.<label>. Repeated `instance`
/// keys accumulate. Throws ParseError.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

struct RunRecord {
  std::string instance;
  int repetition = 0;
  std::uint64_t seed = 0;
  bool feasible = false;
  double tc = 0.0;
  double stage1_tc = 0.0;
  double init_best_tc = 0.0;
  int routes = 0;
  int generations = 0;
  double seconds = 0.0;
  bool reached_target = false;
  OperatorStats stats;
};

struct InstanceRow {
  std::string instance;
  int runs = 0;
  int feasible_runs = 0;
  double ave = 0.0;
  double std = 0.0;
  double best = 0.0;
  double time = 0.0;
  std::optional<double> reference;
  std::optional<double> ave_pdr;
  std::string error;
};

struct ExperimentReport {
  std::vector<InstanceRow> rows;
  std::vector<RunRecord> runs;
  /// Mean of the per-instance Ave PDR where a reference exists.
  std::optional<double> ave_pdr;
};

/// Repetition i of every instance uses seed base_seed + i. Runs are spread
/// over a worker pool; the report does not depend on the pool size.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Rows recomputed from raw runs (instance order of first appearance).
std::vector<InstanceRow> aggregate(const std::vector<RunRecord>& runs, const std::map<std::string, double>& references);

struct WinDrawLoss {
  int win = 0;
  int draw = 0;
  int loss = 0;
  std::map<std::string, Comparison> per_instance;
};

/// Per-instance rank-sum comparison of `a` against `b` (tc of feasible runs).
WinDrawLoss compare(const ExperimentReport& a, const ExperimentReport& b, double alpha = 0.05);

/// Instances on which each report attains the lowest Best among `reports`.
std::vector<int> count_best(const std::vector<const ExperimentReport*>& reports);

struct TimingRow {
  std::string instance;
  std::array<double, 3> kg_seconds{};
  std::array<double, 3> traditional_seconds{};
  std::array<std::uint64_t, 3> kg_evaluations{};
  std::array<std::uint64_t, 3> traditional_evaluations{};
  std::array<std::uint64_t, 3> kg_pruned{};
  std::array<std::uint64_t, 3> kg_enumerated{};

  double time_ratio(MoveKind k) const;
  double count_ratio(MoveKind k) const;
};

/// Runs the memetic engine with knowledge-guided and with traditional
/// operators on the same seeds and totals time and evaluations per operator.
std::vector<TimingRow> ablation_timing(const ExperimentConfig& cfg);

struct InitAblationRow {
  std::string instance;
  std::vector<double> kgis_best;
  std::vector<double> baseline_best;
  double kgis_mean = 0.0;
  double baseline_mean = 0.0;
};

/// Best cost of the initial population, paired seeds, both constructions.
std::vector<InitAblationRow> ablation_init(const ExperimentConfig& cfg);

struct TargetRow {
  std::string instance;
  double target = 0.0;
  /// Seconds per run; empty for runs that missed the target.
  std::vector<std::optional<double>> seconds;
  std::vector<int> generations;
};

inline constexpr int kTargetGenerationCap = 600;

/// Each run stops at the instance's target or at 600 generations.
std::vector<TargetRow> runtime_to_target(const ExperimentConfig& cfg, const std::map<std::string, double>& targets);

// Output.
void write_report_json(std::ostream& out, const ExperimentReport& report);
void write_report_csv(std::ostream& out, const ExperimentReport& report);
void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& runs);
void write_timing_json(std::ostream& out, const std::vector<TimingRow>& rows);
void write_timing_csv(std::ostream& out, const std::vector<TimingRow>& rows);
void write_init_csv(std::ostream& out, const std::vector<InitAblationRow>& rows);
void write_target_csv(std::ostream& out, const std::vector<TargetRow>& rows);

/// Runs fn(0) .. fn(count - 1) on up to `workers` threads.
void parallel_for(int count, int workers, const std::function<void(int)>& fn);

}  // namespace tdcarp
