#include "tdcarp/oracle.hpp"

#include <algorithm>
#include <numeric>

namespace tdcarp {

ShortestPathMatrix floyd_warshall(const Instance& inst) {
  const int n = inst.n_vertices;
  std::vector<double> c(static_cast<std::size_t>(n) * n, kInfinity);
  std::vector<double> t(c);
  std::vector<ArcId> pred(c.size(), -1);
  auto at = [n](int i, int j) { return static_cast<std::size_t>(i) * n + j; };
  for (int v = 0; v < n; ++v) c[at(v, v)] = t[at(v, v)] = 0.0;
  for (const Arc& a : inst.arcs) {
    if (a.travel_cost < c[at(a.tail, a.head)]) {
      c[at(a.tail, a.head)] = a.travel_cost;
      pred[at(a.tail, a.head)] = a.id;
    }
    t[at(a.tail, a.head)] = std::min(t[at(a.tail, a.head)], a.travel_time);
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (c[at(i, k)] + c[at(k, j)] < c[at(i, j)]) {
          c[at(i, j)] = c[at(i, k)] + c[at(k, j)];
          pred[at(i, j)] = pred[at(k, j)];
        }
        t[at(i, j)] = std::min(t[at(i, j)], t[at(i, k)] + t[at(k, j)]);
      }
    }
  }
  ShortestPathMatrix sp(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) sp.set(i, j, c[at(i, j)], t[at(i, j)], pred[at(i, j)]);
  }
  return sp;
}

double classic_carp_cost(const Instance& inst, const Solution& sol) {
  const ShortestPathMatrix sp = floyd_warshall(inst);
  double total = 0.0;
  for (const Route& r : sol.routes) {
    if (r.visits.empty()) continue;
    VertexId at = kDepot;
    for (Visit v : r.visits) {
      const Arc& arc = inst.served_arc(v);
      total += sp.cost(at, arc.tail) + arc.cost_fn->min_sc;
      at = arc.head;
    }
    total += sp.cost(at, kDepot);
  }
  return total;
}

GridMinimum grid_scan(const std::function<double(double)>& f, double lo, double hi, int steps) {
  GridMinimum best{lo, f(lo)};
  if (hi <= lo || steps < 1) return best;
  for (int k = 1; k <= steps; ++k) {
    const double t = lo + (hi - lo) * static_cast<double>(k) / steps;
    const double v = f(t);
    if (v < best.value) best = {t, v};
  }
  return best;
}

namespace {

/// Plain forward simulation of one route.
struct Simulation {
  double cost = 0.0;
  double ret = 0.0;
};

Simulation simulate(const Instance& inst, const ShortestPathMatrix& sp, const std::vector<Visit>& seq, double t0) {
  Simulation s;
  double t = t0;
  VertexId at = kDepot;
  for (Visit v : seq) {
    const Arc& arc = inst.served_arc(v);
    s.cost += sp.cost(at, arc.tail);
    const double begin = t + sp.time(at, arc.tail);
    const double sc = eval_service_cost(*arc.cost_fn, begin);
    s.cost += sc;
    t = begin + (inst.service_duration == ServiceDuration::Static ? arc.service_time : sc);
    at = arc.head;
  }
  s.cost += sp.cost(at, kDepot);
  s.ret = t + sp.time(at, kDepot);
  return s;
}

struct BestRoute {
  double cost = kInfinity;
  std::vector<Visit> seq;
  double departure = 0.0;
};

BestRoute best_route_for(const Instance& inst, const ShortestPathMatrix& sp, const std::vector<TaskId>& tasks,
                         int grid_steps, bool zero_departures) {
  const double pt = inst.planning_horizon;
  const double step = pt / grid_steps;
  struct Candidate {
    double bound;
    std::vector<Visit> seq;
  };
  std::vector<Candidate> candidates;
  std::vector<TaskId> order = tasks;
  std::sort(order.begin(), order.end());
  const int k = static_cast<int>(order.size());
  do {
    for (int mask = 0; mask < (1 << k); ++mask) {
      bool valid = true;
      std::vector<Visit> seq;
      for (int i = 0; i < k; ++i) {
        const bool rev = (mask >> i) & 1;
        if (rev && !inst.can_reverse(order[i])) valid = false;
        seq.push_back({order[i], rev});
      }
      if (!valid) continue;
      double bound = 0.0;
      VertexId at = kDepot;
      for (Visit v : seq) {
        const Arc& arc = inst.served_arc(v);
        bound += sp.cost(at, arc.tail) + arc.cost_fn->min_sc;
        at = arc.head;
      }
      bound += sp.cost(at, kDepot);
      candidates.push_back({bound, std::move(seq)});
    }
  } while (std::next_permutation(order.begin(), order.end()));
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.bound < b.bound; });

  BestRoute best;
  for (const Candidate& cand : candidates) {
    if (cand.bound >= best.cost) break;
    for (int g = 0; g <= (zero_departures ? 0 : grid_steps); ++g) {
      const double t0 = g * step;
      const Simulation s = simulate(inst, sp, cand.seq, t0);
      // In static mode later departures only return later.
      if (s.ret > pt) {
        if (inst.service_duration == ServiceDuration::Static) break;
        continue;
      }
      if (s.cost < best.cost) {
        best.cost = s.cost;
        best.seq = cand.seq;
        best.departure = t0;
      }
    }
  }
  return best;
}

}  // namespace

ExactResult exact_solve(const Instance& inst, const OracleBudget& budget) {
  const int n = inst.task_count();
  if (n > budget.max_tasks) {
    throw OracleRefusal("exact oracle limited to " + std::to_string(budget.max_tasks) + " tasks, instance has " +
                        std::to_string(n));
  }
  if (budget.grid_steps < 1) throw OracleRefusal("grid_steps must be positive");
  const ShortestPathMatrix sp = floyd_warshall(inst);
  const int full = (1 << n) - 1;

  std::vector<BestRoute> route(full + 1);
  for (int mask = 1; mask <= full; ++mask) {
    std::vector<TaskId> tasks;
    double load = 0.0;
    for (int t = 0; t < n; ++t) {
      if ((mask >> t) & 1) {
        tasks.push_back(t);
        load += inst.demand(t);
      }
    }
    if (load > inst.capacity) continue;
    route[mask] = best_route_for(inst, sp, tasks, budget.grid_steps, budget.zero_departures);
  }

  // best[r][mask]: cheapest cover of `mask` by r routes.
  const int max_routes = inst.fleet_bound ? std::min(*inst.fleet_bound, n) : n;
  std::vector<std::vector<double>> best(max_routes + 1, std::vector<double>(full + 1, kInfinity));
  std::vector<std::vector<int>> choice(max_routes + 1, std::vector<int>(full + 1, 0));
  best[0][0] = 0.0;
  for (int r = 1; r <= max_routes; ++r) {
    for (int mask = 1; mask <= full; ++mask) {
      const int low = mask & -mask;
      for (int sub = mask; sub > 0; sub = (sub - 1) & mask) {
        if (!(sub & low) || route[sub].cost == kInfinity) continue;
        const double c = route[sub].cost + best[r - 1][mask ^ sub];
        if (c < best[r][mask]) {
          best[r][mask] = c;
          choice[r][mask] = sub;
        }
      }
    }
  }
  int routes_used = 0;
  for (int r = 1; r <= max_routes; ++r) {
    if (best[r][full] < (routes_used ? best[routes_used][full] : kInfinity)) routes_used = r;
  }
  if (n > 0 && routes_used == 0) throw InstanceError("no feasible plan exists");

  ExactResult out;
  out.tc = n == 0 ? 0.0 : best[routes_used][full];
  for (int r = routes_used, mask = full; r > 0; --r) {
    const int sub = choice[r][mask];
    out.solution.routes.push_back(Route{route[sub].seq, route[sub].departure});
    out.departures.push_back(route[sub].departure);
    mask ^= sub;
  }
  out.grid_error_bound =
      budget.zero_departures ? 0.0 : n * inst.global_slope_abs * inst.planning_horizon / budget.grid_steps;
  return out;
}

NeighborhoodScan exhaustive_neighborhood(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol,
                                         MoveKind kind) {
  const SolutionEvaluation base = evaluate_solution(inst, sp, sol);
  auto lateness = [&](const Solution& s, const SolutionEvaluation& e) {
    double late = 0.0;
    for (std::size_t r = 0; r < s.routes.size(); ++r) {
      late += horizon_lateness(inst, s.routes[r].departure, e.per_route[r].return_time);
    }
    return late;
  };
  const double base_late = lateness(sol, base);

  NeighborhoodScan scan;
  for (const Move& m : enumerate_moves(inst, sol, kind)) {
    const Solution next = apply_move(inst, sol, m);
    const SolutionEvaluation e = evaluate_solution(inst, sp, next);
    NeighborEntry entry;
    entry.move = m;
    entry.delta = e.tc - base.tc;
    entry.admissible = e.violation <= base.violation && lateness(next, e) <= base_late;
    entry.successful = entry.admissible && entry.delta < -kImprovementEps;
    if (entry.successful && (!scan.best || entry.delta < scan.entries[*scan.best].delta)) {
      scan.best = scan.entries.size();
    }
    scan.entries.push_back(entry);
  }
  return scan;
}

}  // namespace tdcarp
