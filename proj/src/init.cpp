#include "tdcarp/init.hpp"

#include <cmath>
#include <set>

namespace tdcarp {

const char* to_string(InitMode mode) { return mode == InitMode::Kgis ? "kgis" : "baseline"; }

namespace {

/// Scores within this distance count as equal.
constexpr double kTieEps = 1e-9;

Solution construct(const Instance& inst, const ShortestPathMatrix& sp, double weight, Rng& rng) {
  const int n = inst.task_count();
  std::vector<bool> served(n, false);
  int remaining = n;
  Solution sol;
  std::vector<Visit> ties;

  while (remaining > 0) {
    Route route;
    RouteCursor cur;
    while (true) {
      ties.clear();
      double best = kInfinity;
      for (TaskId t = 0; t < n; ++t) {
        if (served[t] || cur.load + inst.demand(t) > inst.capacity) continue;
        // The better orientation stands for the task.
        Visit pick{};
        double pick_score = kInfinity;
        for (int o = 0; o < (inst.can_reverse(t) ? 2 : 1); ++o) {
          const Visit v{t, o == 1};
          RouteCursor next = cur;
          const double begin = advance(inst, sp, next, v);
          if (begin > inst.planning_horizon || return_time(sp, next) > inst.planning_horizon) continue;
          const Arc& arc = inst.served_arc(v);
          double score = sp.cost(cur.vertex, arc.tail);
          if (weight > 0.0) score += weight * time_gap(*arc.cost_fn, begin);
          if (score < pick_score) {
            pick_score = score;
            pick = v;
          }
        }
        if (pick_score == kInfinity) continue;
        if (pick_score < best - kTieEps) {
          best = pick_score;
          ties.clear();
        }
        if (pick_score <= best + kTieEps) ties.push_back(pick);
      }
      if (ties.empty()) break;
      const Visit chosen = ties[std::uniform_int_distribution<std::size_t>(0, ties.size() - 1)(rng)];
      advance(inst, sp, cur, chosen);
      route.visits.push_back(chosen);
      served[chosen.task] = true;
      --remaining;
    }
    if (route.visits.empty()) {
      for (TaskId t = 0; t < n; ++t) {
        if (!served[t]) {
          throw InstanceError("task " + std::to_string(t + 1) +
                              " cannot be served by an empty route within capacity and horizon");
        }
      }
    }
    sol.routes.push_back(std::move(route));
  }
  return sol;
}

}  // namespace

Solution kgis_individual(const Instance& inst, const ShortestPathMatrix& sp, double slope_abs, Rng& rng) {
  return construct(inst, sp, slope_abs, rng);
}

Solution baseline_individual(const Instance& inst, const ShortestPathMatrix& sp, Rng& rng) {
  return construct(inst, sp, 0.0, rng);
}

Population kgis_population(const Instance& inst, const ShortestPathMatrix& sp, const InitConfig& cfg, Rng& rng) {
  if (cfg.psize < 1) throw std::invalid_argument("psize must be at least 1");
  Population pop;
  std::set<std::vector<std::vector<Visit>>> seen;
  auto build = [&] {
    return cfg.mode == InitMode::Kgis ? kgis_individual(inst, sp, inst.global_slope_abs, rng)
                                      : baseline_individual(inst, sp, rng);
  };
  while (static_cast<int>(pop.individuals.size()) < cfg.psize) {
    Solution sol = build();
    for (int attempt = 0; attempt < cfg.max_retries && seen.contains(plan_key(sol)); ++attempt) sol = build();
    if (!seen.insert(plan_key(sol)).second) ++pop.duplicate_warnings;
    pop.individuals.push_back(std::move(sol));
  }
  return pop;
}

}  // namespace tdcarp
