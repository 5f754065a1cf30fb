#include <algorithm>
#include <numeric>

#include "tdcarp/localsearch.hpp"

namespace tdcarp {

namespace {

double yield(const Instance& inst, Visit v) {
  const Arc& arc = inst.served_arc(v);
  const double sc = arc.cost_fn->min_sc;
  return sc > 0.0 ? arc.demand / sc : kInfinity;
}

/// True when candidate `a` beats `b` under the tie rule.
bool rule_prefers(const Instance& inst, const ShortestPathMatrix& sp, ScanRule rule, double load, Visit a, Visit b) {
  if (rule == ScanRule::HalfFull) rule = load < inst.capacity / 2.0 ? ScanRule::MaxReturn : ScanRule::MinReturn;
  switch (rule) {
    case ScanRule::MaxReturn:
      return sp.cost(inst.served_arc(a).head, kDepot) > sp.cost(inst.served_arc(b).head, kDepot);
    case ScanRule::MinReturn:
      return sp.cost(inst.served_arc(a).head, kDepot) < sp.cost(inst.served_arc(b).head, kDepot);
    case ScanRule::MaxYield:
      return yield(inst, a) > yield(inst, b);
    case ScanRule::MinYield:
      return yield(inst, a) < yield(inst, b);
    case ScanRule::HalfFull:
      break;
  }
  return false;
}

struct Scored {
  double tc = 0.0;
  double violation = 0.0;

  bool operator<(const Scored& o) const {
    if (violation != o.violation) return violation < o.violation;
    return tc < o.tc;
  }
};

Scored score(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol) {
  Scored s;
  for (const Route& r : sol.routes) {
    RouteCursor cur;
    cur.time = r.departure;
    for (Visit v : r.visits) advance(inst, sp, cur, v);
    s.tc += closing_cost(sp, cur);
    s.violation += capacity_excess(inst, cur.load);
  }
  return s;
}

}  // namespace

std::vector<Visit> path_scanning(const Instance& inst, const ShortestPathMatrix& sp, const std::vector<TaskId>& pool,
                                 ScanRule rule) {
  std::vector<TaskId> open = pool;
  std::vector<Visit> tour;
  tour.reserve(pool.size());
  while (!open.empty()) {
    VertexId at = kDepot;
    double load = 0.0;
    while (true) {
      int pick = -1;
      Visit best{};
      double best_dist = kInfinity;
      for (int i = 0; i < static_cast<int>(open.size()); ++i) {
        const TaskId t = open[i];
        if (load + inst.demand(t) > inst.capacity) continue;
        for (int o = 0; o < (inst.can_reverse(t) ? 2 : 1); ++o) {
          const Visit v{t, o == 1};
          const double d = sp.cost(at, inst.served_arc(v).tail);
          if (pick < 0 || d < best_dist || (d == best_dist && rule_prefers(inst, sp, rule, load, v, best))) {
            pick = i;
            best = v;
            best_dist = d;
          }
        }
      }
      if (pick < 0) break;
      tour.push_back(best);
      load += inst.demand(best.task);
      at = inst.served_arc(best).head;
      open.erase(open.begin() + pick);
    }
    if (load == 0.0) {
      // A task heavier than the vehicle still has to go somewhere.
      tour.push_back(Visit{open.front(), false});
      open.erase(open.begin());
    }
  }
  return tour;
}

std::vector<Route> split_tour(const Instance& inst, const ShortestPathMatrix& sp, const std::vector<Visit>& tour) {
  const int n = static_cast<int>(tour.size());
  std::vector<double> best(n + 1, kInfinity);
  std::vector<int> from(n + 1, -1);
  best[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    if (best[i] == kInfinity) continue;
    RouteCursor cur;
    for (int j = i; j < n; ++j) {
      advance(inst, sp, cur, tour[j]);
      const bool single = j == i;
      if (!single && (cur.load > inst.capacity || return_time(sp, cur) > inst.planning_horizon)) break;
      const double cost = best[i] + closing_cost(sp, cur);
      if (cost < best[j + 1]) {
        best[j + 1] = cost;
        from[j + 1] = i;
      }
    }
  }
  std::vector<Route> routes;
  for (int j = n; j > 0; j = from[j]) {
    Route r;
    r.visits.assign(tour.begin() + from[j], tour.begin() + j);
    routes.push_back(std::move(r));
  }
  std::reverse(routes.begin(), routes.end());
  return routes;
}

Solution merge_split(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol, int p, Rng& rng) {
  const int n_routes = static_cast<int>(sol.routes.size());
  if (p <= 0 || p > n_routes) return sol;

  std::vector<int> ids(n_routes);
  std::iota(ids.begin(), ids.end(), 0);
  std::vector<int> chosen;
  std::sample(ids.begin(), ids.end(), std::back_inserter(chosen), p, rng);

  std::vector<TaskId> pool;
  Solution kept;
  std::vector<bool> selected(n_routes, false);
  for (int r : chosen) {
    selected[r] = true;
    for (Visit v : sol.routes[r].visits) pool.push_back(v.task);
  }
  for (int r = 0; r < n_routes; ++r) {
    if (!selected[r]) kept.routes.push_back(sol.routes[r]);
  }

  Solution best = sol;
  Scored best_score = score(inst, sp, sol);
  for (ScanRule rule : {ScanRule::MaxReturn, ScanRule::MinReturn, ScanRule::MaxYield, ScanRule::MinYield,
                        ScanRule::HalfFull}) {
    Solution cand = kept;
    for (Route& r : split_tour(inst, sp, path_scanning(inst, sp, pool, rule))) cand.routes.push_back(std::move(r));
    const Scored s = score(inst, sp, cand);
    if (s < best_score) {
      best_score = s;
      best = std::move(cand);
    }
  }
  return best;
}

}  // namespace tdcarp
