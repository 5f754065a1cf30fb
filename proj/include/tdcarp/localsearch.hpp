#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "tdcarp/evaluation.hpp"
#include "tdcarp/move.hpp"

namespace tdcarp {

using Rng = std::mt19937_64;

/// A move counts as improving only below this (guards round-off in deltas).
inline constexpr double kImprovementEps = 1e-9;

struct SearchCounters {
  std::uint64_t moves_enumerated = 0;
  std::uint64_t pruned_by_criterion1 = 0;
  std::uint64_t criterion2_evaluations = 0;
  std::uint64_t full_route_evaluations = 0;
  /// Task service times recomputed while classifying moves.
  std::uint64_t tasks_recomputed = 0;
  std::uint64_t improvements = 0;

  SearchCounters& operator+=(const SearchCounters& o);
};

enum class OperatorMode { KnowledgeGuided, Traditional };

const char* to_string(OperatorMode mode);

/// Counters and wall-clock per small-step operator kind (SI, DI, SW).
struct OperatorStats {
  std::array<SearchCounters, 3> counters{};
  std::array<double, 3> seconds{};

  SearchCounters& operator[](MoveKind k) { return counters[static_cast<int>(k)]; }
  const SearchCounters& operator[](MoveKind k) const { return counters[static_cast<int>(k)]; }
  OperatorStats& operator+=(const OperatorStats& o);
};

/// Visits every move of `kind` in a fixed order. Insertions try both
/// orientations of the moved task(s) and a new-route destination; swaps try
/// preserved orientations and a variant with both tasks flipped. The
/// preserved swap of two single-task routes is skipped as a no-op.
void for_each_move(const Instance& inst, const Solution& sol, MoveKind kind,
                   const std::function<void(const Move&)>& fn);
std::vector<Move> enumerate_moves(const Instance& inst, const Solution& sol, MoveKind kind);

/// New solution with the move applied; emptied routes are dropped and a new
/// route is appended with departure 0. Throws InvalidRouteError.
Solution apply_move(const Instance& inst, const Solution& sol, const Move& move);

/// Time gaps of the moved tasks before the move and at their tentative
/// begin times after it.
struct GapChange {
  double before = 0.0;
  double after = 0.0;
};
GapChange relevant_gaps(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol,
                        const SolutionState& state, const Move& move);

/// True when after - lambda * before > 0 (move pruned as failed).
/// An infinite lambda disables pruning.
bool criterion1_failed(const GapChange& gaps, double lambda);
bool criterion1_failed(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol,
                       const SolutionState& state, const Move& move, double lambda);

struct Criterion2Result {
  bool successful = false;
  MoveDelta delta;
};
Criterion2Result criterion2_successful(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol,
                                       const SolutionState& state, const Move& move);

struct OperatorResult {
  Solution solution;
  /// TC change relative to the input (0 when no successful move exists).
  double delta = 0.0;
  bool improved = false;
  Move move;
};

/// Best successful neighbor with Criterion 1 pruning and Criterion 2 deltas.
OperatorResult kg_operator(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol, MoveKind kind,
                           double lambda, SearchCounters& counters);

/// Best successful neighbor with full re-evaluation of the involved routes.
OperatorResult traditional_operator(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol,
                                    MoveKind kind, SearchCounters& counters);

/// Applies SI, DI and SW to the same input and keeps the cheapest result
/// (ties resolved in SI, DI, SW order).
OperatorResult kgslss(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol, double lambda,
                      OperatorStats& stats, OperatorMode mode = OperatorMode::KnowledgeGuided);

// ---------------------------------------------------------------------------

enum class ScanRule { MaxReturn = 1, MinReturn, MaxYield, MinYield, HalfFull };

/// Path scanning over `pool` with travel-cost nearest selection; ties go
/// to `rule`. Returns the concatenated route sequences (a giant tour).
std::vector<Visit> path_scanning(const Instance& inst, const ShortestPathMatrix& sp,
                                 const std::vector<TaskId>& pool, ScanRule rule);

/// Optimal split of an ordered giant tour into capacity- and
/// horizon-feasible routes departing at 0.
std::vector<Route> split_tour(const Instance& inst, const ShortestPathMatrix& sp, const std::vector<Visit>& tour);

/// Re-plans the tasks of `p` random routes; returns the better of input and
/// result (capacity excess first, then TC).
Solution merge_split(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol, int p, Rng& rng);

}  // namespace tdcarp
