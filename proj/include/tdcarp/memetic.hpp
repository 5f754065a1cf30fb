#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "tdcarp/init.hpp"
#include "tdcarp/localsearch.hpp"

namespace tdcarp {

struct MemeticParams {
  int psize = 10;
  int osnum = 60;
  int gnum = 50;
  double pls = 0.1;
  double lambda = 1.0;
  double pf = 0.45;
  std::uint64_t seed = 1;
  InitMode init = InitMode::Kgis;
  OperatorMode operators = OperatorMode::KnowledgeGuided;
  int init_retries = 50;
  /// Routes merged by each Merge-Split call.
  int merge_routes = 2;
};

/// Throws std::invalid_argument when a field is out of range.
void validate(const MemeticParams& params);

struct Individual {
  Solution solution;
  SolutionEvaluation eval;

  bool feasible() const { return eval.feasible(); }
};

Individual make_individual(const Instance& inst, const ShortestPathMatrix& sp, Solution sol);

/// Route picks and cut points of one crossover; cuts index into the
/// chosen routes (0 .. length).
struct SbxChoice {
  int route_a = 0;
  int route_b = 0;
  int cut_a = 0;
  int cut_b = 0;
};

/// Replaces a route of `a` by prefix(a route) + suffix(b route), removes
/// duplicated tasks where removal saves most, and reinserts missing tasks at
/// their cheapest capacity- and horizon-feasible position (new route if none).
Solution sbx_crossover(const Solution& a, const Solution& b, const Instance& inst, const ShortestPathMatrix& sp,
                       Rng& rng);
Solution sbx_crossover(const Solution& a, const Solution& b, const Instance& inst, const ShortestPathMatrix& sp,
                       const SbxChoice& choice);

/// Stochastic ranking bubble sort: adjacent individuals are compared by tc
/// when both are feasible or with probability pf, otherwise by violation.
void stochastic_rank(std::vector<Individual>& pop, double pf, Rng& rng);

struct StopRule {
  int generations = 50;
  double wallclock_seconds = std::numeric_limits<double>::infinity();
  /// Stop once the best feasible tc is at or below this.
  double target_cost = -std::numeric_limits<double>::infinity();
};

struct TraceRow {
  int generation = 0;
  double best_tc = 0.0;
  double mean_tc = 0.0;
  int feasible_count = 0;
  double seconds = 0.0;
  std::uint64_t moves_enumerated = 0;
  std::uint64_t pruned_by_criterion1 = 0;
  std::uint64_t criterion2_evaluations = 0;
  std::uint64_t full_route_evaluations = 0;
  std::uint64_t improvements = 0;
};

struct KgmaResult {
  bool found_feasible = false;
  Individual best;
  double init_best_tc = 0.0;
  int generations = 0;
  double seconds = 0.0;
  bool reached_target = false;
  std::vector<TraceRow> trace;
  OperatorStats stats;
  int duplicate_warnings = 0;
};

/// Stage-one routing search. Rows of the trace are cumulative; row 0 is
/// the initial population.
KgmaResult kgma_run(const Instance& inst, const ShortestPathMatrix& sp, const MemeticParams& params, Rng& rng,
                    const StopRule& stop);

/// Trace as CSV with a header line.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

}  // namespace tdcarp
