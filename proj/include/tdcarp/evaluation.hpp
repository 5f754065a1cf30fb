#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdcarp/instance.hpp"
#include "tdcarp/move.hpp"
#include "tdcarp/solution.hpp"

namespace tdcarp {

class InvalidRouteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CoverageError : public std::runtime_error {
 public:
  CoverageError(TaskId task, const std::string& what)
      : std::runtime_error(what), task_(task) {}
  TaskId task() const { return task_; }

 private:
  TaskId task_;
};

/// Vehicle state after serving a prefix of a route.
struct RouteCursor {
  VertexId vertex = kDepot;
  double time = 0.0;     // ready to leave `vertex`
  double service = 0.0;  // accumulated service cost
  double travel = 0.0;   // accumulated deadheading cost
  double load = 0.0;
};

/// Deadhead to the visit, serve it, and return its service beginning time.
inline double advance(const Instance& inst, const ShortestPathMatrix& sp, RouteCursor& cur, Visit v) {
  const Arc& arc = inst.served_arc(v);
  const double begin = cur.time + sp.time(cur.vertex, arc.tail);
  const double sc = eval_service_cost(*arc.cost_fn, begin);
  cur.travel += sp.cost(cur.vertex, arc.tail);
  cur.service += sc;
  cur.load += arc.demand;
  cur.time = begin + (inst.service_duration == ServiceDuration::Static ? arc.service_time : sc);
  cur.vertex = arc.head;
  return begin;
}

/// Time and cost of the final deadheading link back to the depot.
inline double return_time(const ShortestPathMatrix& sp, const RouteCursor& cur) {
  return cur.time + sp.time(cur.vertex, kDepot);
}
inline double closing_cost(const ShortestPathMatrix& sp, const RouteCursor& cur) {
  return cur.service + cur.travel + sp.cost(cur.vertex, kDepot);
}

struct RouteEvaluation {
  double total_cost = 0.0;
  double service_cost = 0.0;
  double travel_cost = 0.0;
  double load = 0.0;
  double return_time = 0.0;
  std::vector<double> begin_times;
  std::vector<double> gaps;
  std::vector<double> service_costs;
  bool feasible_capacity = true;
  bool feasible_horizon = true;
};

struct SolutionEvaluation {
  double tc = 0.0;
  /// Total capacity excess across routes.
  double violation = 0.0;
  /// All routes horizon-feasible.
  bool horizon_ok = true;
  std::vector<RouteEvaluation> per_route;

  bool feasible() const { return violation == 0.0 && horizon_ok; }
};

/// Throws InvalidRouteError for unknown tasks, repeated tasks, or a reversed
/// visit of a task without an inverse arc.
RouteEvaluation evaluate_route(const Instance& inst, const ShortestPathMatrix& sp, const Route& route);

/// Throws CoverageError when a task is missing or served twice.
SolutionEvaluation evaluate_solution(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol);

struct FeasibilityReport {
  bool feasible = true;
  std::vector<std::string> diagnostics;
};

FeasibilityReport is_feasible(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol);

/// Amount by which a route exceeds the capacity, or 0.
inline double capacity_excess(const Instance& inst, double load) {
  return load > inst.capacity ? load - inst.capacity : 0.0;
}
/// Amount by which a route returns after the horizon, or 0.
inline double horizon_lateness(const Instance& inst, double departure, double ret) {
  double late = ret > inst.planning_horizon ? ret - inst.planning_horizon : 0.0;
  if (departure < 0.0) late += -departure;
  return late;
}

// ---------------------------------------------------------------------------
// Incremental evaluation.

/// Per-position cursors of one route; states[i] is the vehicle state after
/// the first i visits (states[0] = depot at departure).
struct RouteState {
  std::vector<RouteCursor> states;
  std::vector<double> begin;
  std::vector<double> gaps;
  double total_cost = 0.0;
  double return_time = 0.0;

  double load() const { return states.back().load; }
  double service_cost() const { return states.back().service; }
};

RouteState build_route_state(const Instance& inst, const ShortestPathMatrix& sp, const Route& route);

/// Cached evaluation of every route of a solution.
struct SolutionState {
  std::vector<RouteState> routes;
  double tc = 0.0;
};

SolutionState build_solution_state(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol);

/// One involved route after a move: old_visits[0, from) followed by `tail`.
/// route == kNewRoute denotes a fresh route departing at time 0.
struct RouteChange {
  int route = kNewRoute;
  int from = 0;
  std::vector<Visit> tail;
};

/// Materializes the changed suffixes of the (at most two) involved routes.
/// Throws InvalidRouteError on out-of-range positions or impossible flips.
int describe_changes(const Solution& sol, const Move& move, RouteChange (&changes)[2]);

struct MoveDelta {
  double delta_sc = 0.0;
  double delta_dc = 0.0;
  /// No involved route gains capacity excess or horizon lateness.
  bool admissible = true;
  /// Tasks whose begin time was recomputed (the suffix work done).
  int recomputed = 0;

  double total() const { return delta_sc + delta_dc; }
};

/// Exact change of service and deadheading cost, recomputing each involved
/// route only from its first modified position.
MoveDelta delta_evaluate(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol,
                         const SolutionState& state, const Move& move);
MoveDelta delta_evaluate(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol,
                         const Move& move);

/// Delta of replacing route `route` (or a new route) by prefix + tail.
MoveDelta delta_of_change(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol,
                          const SolutionState& state, const RouteChange& change);

}  // namespace tdcarp
