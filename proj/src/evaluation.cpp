#include "tdcarp/evaluation.hpp"

#include <algorithm>

namespace tdcarp {

namespace {

void check_visit(const Instance& inst, Visit v) {
  if (v.task < 0 || v.task >= inst.task_count()) {
    throw InvalidRouteError("unknown task " + std::to_string(v.task + 1));
  }
  if (v.reversed && !inst.can_reverse(v.task)) {
    throw InvalidRouteError("task " + std::to_string(v.task + 1) + " has no inverse arc to serve reversed");
  }
}

}  // namespace

RouteEvaluation evaluate_route(const Instance& inst, const ShortestPathMatrix& sp, const Route& route) {
  RouteEvaluation ev;
  std::vector<bool> seen(inst.task_count(), false);
  RouteCursor cur;
  cur.time = route.departure;
  ev.begin_times.reserve(route.visits.size());
  ev.gaps.reserve(route.visits.size());
  ev.service_costs.reserve(route.visits.size());
  for (Visit v : route.visits) {
    check_visit(inst, v);
    if (seen[v.task]) throw InvalidRouteError("task " + std::to_string(v.task + 1) + " repeated in a route");
    seen[v.task] = true;
    const double before = cur.service;
    const double begin = advance(inst, sp, cur, v);
    ev.begin_times.push_back(begin);
    ev.gaps.push_back(time_gap(*inst.served_arc(v).cost_fn, begin));
    ev.service_costs.push_back(cur.service - before);
  }
  ev.service_cost = cur.service;
  ev.travel_cost = cur.travel + sp.cost(cur.vertex, kDepot);
  ev.total_cost = ev.service_cost + ev.travel_cost;
  ev.load = cur.load;
  ev.return_time = return_time(sp, cur);
  ev.feasible_capacity = ev.load <= inst.capacity;
  ev.feasible_horizon = route.departure >= 0.0 && ev.return_time <= inst.planning_horizon;
  return ev;
}

namespace {

void check_coverage(const Instance& inst, const Solution& sol) {
  std::vector<int> count(inst.task_count(), 0);
  for (const Route& r : sol.routes) {
    for (Visit v : r.visits) {
      if (v.task < 0 || v.task >= inst.task_count()) {
        throw CoverageError(v.task, "unknown task " + std::to_string(v.task + 1));
      }
      if (++count[v.task] > 1) {
        throw CoverageError(v.task, "task " + std::to_string(v.task + 1) + " is served more than once");
      }
    }
  }
  for (TaskId t = 0; t < inst.task_count(); ++t) {
    if (count[t] == 0) throw CoverageError(t, "task " + std::to_string(t + 1) + " is not served");
  }
}

}  // namespace

SolutionEvaluation evaluate_solution(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol) {
  check_coverage(inst, sol);
  SolutionEvaluation ev;
  ev.per_route.reserve(sol.routes.size());
  for (const Route& r : sol.routes) {
    ev.per_route.push_back(evaluate_route(inst, sp, r));
    const RouteEvaluation& re = ev.per_route.back();
    ev.tc += re.total_cost;
    ev.violation += capacity_excess(inst, re.load);
    ev.horizon_ok = ev.horizon_ok && re.feasible_horizon;
  }
  return ev;
}

FeasibilityReport is_feasible(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol) {
  FeasibilityReport report;
  auto flag = [&](std::string msg) {
    report.feasible = false;
    report.diagnostics.push_back(std::move(msg));
  };
  std::vector<int> count(inst.task_count(), 0);
  for (const Route& r : sol.routes) {
    for (Visit v : r.visits) {
      if (v.task >= 0 && v.task < inst.task_count()) ++count[v.task];
    }
  }
  for (TaskId t = 0; t < inst.task_count(); ++t) {
    if (count[t] == 0) flag("coverage: task " + std::to_string(t + 1) + " is not served");
    if (count[t] > 1) flag("coverage: task " + std::to_string(t + 1) + " is served more than once");
  }
  for (std::size_t k = 0; k < sol.routes.size(); ++k) {
    const std::string where = "route " + std::to_string(k + 1);
    RouteEvaluation ev;
    try {
      ev = evaluate_route(inst, sp, sol.routes[k]);
    } catch (const InvalidRouteError& e) {
      flag(where + ": " + e.what());
      continue;
    }
    if (!ev.feasible_capacity) {
      flag("capacity: " + where + " load " + format_real(ev.load) + " exceeds " + format_real(inst.capacity));
    }
    if (!ev.feasible_horizon) {
      flag("horizon: " + where + " returns at " + format_real(ev.return_time) + " beyond " +
           format_real(inst.planning_horizon));
    }
  }
  if (inst.fleet_bound) {
    int used = 0;
    for (const Route& r : sol.routes) used += r.visits.empty() ? 0 : 1;
    if (used > *inst.fleet_bound) flag("fleet: " + std::to_string(used) + " routes exceed the fleet bound");
  }
  return report;
}

// ---------------------------------------------------------------------------

RouteState build_route_state(const Instance& inst, const ShortestPathMatrix& sp, const Route& route) {
  RouteState rs;
  const std::size_t n = route.visits.size();
  rs.states.resize(n + 1);
  rs.begin.resize(n);
  rs.gaps.resize(n);
  RouteCursor cur;
  cur.time = route.departure;
  rs.states[0] = cur;
  for (std::size_t i = 0; i < n; ++i) {
    const Visit v = route.visits[i];
    rs.begin[i] = advance(inst, sp, cur, v);
    rs.gaps[i] = time_gap(*inst.served_arc(v).cost_fn, rs.begin[i]);
    rs.states[i + 1] = cur;
  }
  rs.total_cost = closing_cost(sp, cur);
  rs.return_time = return_time(sp, cur);
  return rs;
}

SolutionState build_solution_state(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol) {
  SolutionState st;
  st.routes.reserve(sol.routes.size());
  for (const Route& r : sol.routes) {
    st.routes.push_back(build_route_state(inst, sp, r));
    st.tc += st.routes.back().total_cost;
  }
  return st;
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw InvalidRouteError(what);
}

}  // namespace

int describe_changes(const Solution& sol, const Move& m, RouteChange (&changes)[2]) {
  const int n_routes = static_cast<int>(sol.routes.size());
  require(m.src_route >= 0 && m.src_route < n_routes, "move source route out of range");
  const auto& src = sol.routes[m.src_route].visits;
  const int src_len = static_cast<int>(src.size());
  require(m.src_pos >= 0 && m.src_pos < src_len, "move source position out of range");

  if (m.kind == MoveKind::Swap) {
    require(m.dst_route >= 0 && m.dst_route < n_routes, "swap partner route out of range");
    const auto& dst = sol.routes[m.dst_route].visits;
    require(m.dst_pos >= 0 && m.dst_pos < static_cast<int>(dst.size()), "swap partner position out of range");
    const Visit a = Visit{src[m.src_pos].task, m.rev_a};
    const Visit b = Visit{dst[m.dst_pos].task, m.rev_b};
    if (m.src_route != m.dst_route) {
      changes[0] = {m.src_route, m.src_pos, {}};
      changes[0].tail.reserve(src_len - m.src_pos);
      changes[0].tail.push_back(b);
      changes[0].tail.insert(changes[0].tail.end(), src.begin() + m.src_pos + 1, src.end());
      changes[1] = {m.dst_route, m.dst_pos, {}};
      changes[1].tail.reserve(dst.size() - m.dst_pos);
      changes[1].tail.push_back(a);
      changes[1].tail.insert(changes[1].tail.end(), dst.begin() + m.dst_pos + 1, dst.end());
      return 2;
    }
    require(m.src_pos != m.dst_pos, "swap of a task with itself");
    const int lo = std::min(m.src_pos, m.dst_pos);
    changes[0] = {m.src_route, lo, std::vector<Visit>(src.begin() + lo, src.end())};
    changes[0].tail[m.src_pos - lo] = b;
    changes[0].tail[m.dst_pos - lo] = a;
    return 1;
  }

  const int width = m.kind == MoveKind::DoubleInsertion ? 2 : 1;
  require(m.src_pos + width <= src_len, "double insertion needs two consecutive tasks");
  Visit moved[2];
  moved[0] = Visit{src[m.src_pos].task, m.rev_a};
  if (width == 2) moved[1] = Visit{src[m.src_pos + 1].task, m.rev_b};

  if (m.dst_route == kNewRoute) {
    changes[0] = {m.src_route, m.src_pos, std::vector<Visit>(src.begin() + m.src_pos + width, src.end())};
    changes[1] = {kNewRoute, 0, std::vector<Visit>(moved, moved + width)};
    return 2;
  }
  require(m.dst_route >= 0 && m.dst_route < n_routes, "move destination route out of range");
  if (m.dst_route != m.src_route) {
    const auto& dst = sol.routes[m.dst_route].visits;
    require(m.dst_pos >= 0 && m.dst_pos <= static_cast<int>(dst.size()), "insertion position out of range");
    changes[0] = {m.src_route, m.src_pos, std::vector<Visit>(src.begin() + m.src_pos + width, src.end())};
    changes[1] = {m.dst_route, m.dst_pos, {}};
    changes[1].tail.reserve(dst.size() - m.dst_pos + width);
    changes[1].tail.insert(changes[1].tail.end(), moved, moved + width);
    changes[1].tail.insert(changes[1].tail.end(), dst.begin() + m.dst_pos, dst.end());
    return 2;
  }
  require(m.dst_pos >= 0 && m.dst_pos <= src_len - width, "insertion position out of range");
  const int lo = std::min(m.src_pos, m.dst_pos);
  std::vector<Visit> rest;
  rest.reserve(src_len - lo);
  for (int i = lo; i < src_len; ++i) {
    if (i < m.src_pos || i >= m.src_pos + width) rest.push_back(src[i]);
  }
  rest.insert(rest.begin() + (m.dst_pos - lo), moved, moved + width);
  changes[0] = {m.src_route, lo, std::move(rest)};
  return 1;
}

MoveDelta delta_of_change(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol,
                          const SolutionState& state, const RouteChange& change) {
  MoveDelta d;
  RouteCursor cur;
  double old_sc = 0.0, old_dc = 0.0, old_excess = 0.0, old_late = 0.0;
  double departure = 0.0;
  if (change.route != kNewRoute) {
    const RouteState& rs = state.routes[change.route];
    departure = sol.routes[change.route].departure;
    cur = rs.states[change.from];
    old_sc = rs.service_cost();
    old_dc = rs.total_cost - old_sc;
    old_excess = capacity_excess(inst, rs.load());
    old_late = horizon_lateness(inst, departure, rs.return_time);
  }
  for (Visit v : change.tail) {
    if (v.reversed && !inst.can_reverse(v.task)) {
      throw InvalidRouteError("task " + std::to_string(v.task + 1) + " has no inverse arc to serve reversed");
    }
    advance(inst, sp, cur, v);
  }
  d.recomputed = static_cast<int>(change.tail.size());
  const double new_sc = cur.service;
  const double new_dc = cur.travel + sp.cost(cur.vertex, kDepot);
  d.delta_sc = new_sc - old_sc;
  d.delta_dc = new_dc - old_dc;
  const double new_excess = capacity_excess(inst, cur.load);
  const double new_late = horizon_lateness(inst, departure, return_time(sp, cur));
  d.admissible = new_excess <= old_excess && new_late <= old_late;
  return d;
}

MoveDelta delta_evaluate(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol,
                         const SolutionState& state, const Move& move) {
  RouteChange changes[2];
  const int n = describe_changes(sol, move, changes);
  MoveDelta total;
  for (int i = 0; i < n; ++i) {
    const MoveDelta d = delta_of_change(inst, sp, sol, state, changes[i]);
    total.delta_sc += d.delta_sc;
    total.delta_dc += d.delta_dc;
    total.admissible = total.admissible && d.admissible;
    total.recomputed += d.recomputed;
  }
  return total;
}

MoveDelta delta_evaluate(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol,
                         const Move& move) {
  return delta_evaluate(inst, sp, sol, build_solution_state(inst, sp, sol), move);
}

}  // namespace tdcarp
