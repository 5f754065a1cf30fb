#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tdcarp/localsearch.hpp"

namespace tdcarp {

struct OracleBudget {
  int max_tasks = 7;
  int grid_steps = 100000;
  /// Fix every departure at 0 instead of scanning the grid.
  bool zero_departures = false;
};

class OracleRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExactResult {
  double tc = 0.0;
  /// Routes carry their grid-optimal departure times.
  Solution solution;
  std::vector<double> departures;
  /// Upper bound on tc minus the true optimum caused by the departure grid.
  double grid_error_bound = 0.0;
};

/// Enumerates every partition of the tasks into routes, every order and
/// orientation, and a grid of departure times per route. Works on its own
/// Floyd-Warshall distances and forward simulation.
/// Throws OracleRefusal beyond budget.max_tasks and InstanceError when no
/// feasible plan exists.
ExactResult exact_solve(const Instance& inst, const OracleBudget& budget = {});

/// Dense relaxation over travel cost and travel time separately.
ShortestPathMatrix floyd_warshall(const Instance& inst);

/// Classic CARP plan cost: serving cost min_sc per task plus deadheading
/// cost, ignoring time entirely.
double classic_carp_cost(const Instance& inst, const Solution& sol);

struct GridMinimum {
  double t = 0.0;
  double value = 0.0;
};

/// Minimum of f over steps + 1 equally spaced points of [lo, hi].
GridMinimum grid_scan(const std::function<double(double)>& f, double lo, double hi, int steps);

struct NeighborEntry {
  Move move;
  /// TC(neighbor) - TC(sol) by full evaluation.
  double delta = 0.0;
  /// The neighbor adds no capacity excess or horizon lateness.
  bool admissible = true;
  bool successful = false;
};

struct NeighborhoodScan {
  std::vector<NeighborEntry> entries;
  /// Index of the first entry with the lowest successful delta.
  std::optional<std::size_t> best;
};

/// Applies every move of `kind`, re-evaluates the whole neighbor and
/// classifies it by the sign of the true TC change.
NeighborhoodScan exhaustive_neighborhood(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol,
                                         MoveKind kind);

}  // namespace tdcarp
