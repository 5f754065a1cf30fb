#include "tdcarp/memetic.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <set>
#include <stdexcept>

namespace tdcarp {

void validate(const MemeticParams& p) {
  if (p.psize < 2) throw std::invalid_argument("psize must be at least 2");
  if (p.osnum < 1) throw std::invalid_argument("osnum must be at least 1");
  if (p.gnum < 0) throw std::invalid_argument("gnum must be nonnegative");
  if (p.pls < 0.0 || p.pls > 1.0) throw std::invalid_argument("pls must lie in [0, 1]");
  if (p.pf < 0.0 || p.pf > 1.0) throw std::invalid_argument("pf must lie in [0, 1]");
  if (!(p.lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  if (p.merge_routes < 1) throw std::invalid_argument("merge_routes must be at least 1");
}

Individual make_individual(const Instance& inst, const ShortestPathMatrix& sp, Solution sol) {
  Individual ind;
  ind.eval = evaluate_solution(inst, sp, sol);
  ind.solution = std::move(sol);
  return ind;
}

namespace {

struct RouteTotals {
  double cost = 0.0;
  double load = 0.0;
  double ret = 0.0;
};

RouteTotals route_totals(const Instance& inst, const ShortestPathMatrix& sp, const std::vector<Visit>& visits,
                         double departure) {
  RouteCursor cur;
  cur.time = departure;
  for (Visit v : visits) advance(inst, sp, cur, v);
  return {closing_cost(sp, cur), cur.load, return_time(sp, cur)};
}

struct Slot {
  int route = -1;
  int pos = -1;
};

void remove_duplicates(const Instance& inst, const ShortestPathMatrix& sp, Solution& child) {
  std::vector<std::vector<Slot>> where(inst.task_count());
  for (int r = 0; r < static_cast<int>(child.routes.size()); ++r) {
    const auto& visits = child.routes[r].visits;
    for (int i = 0; i < static_cast<int>(visits.size()); ++i) where[visits[i].task].push_back({r, i});
  }
  std::vector<Slot> drop;
  for (const auto& slots : where) {
    if (slots.size() < 2) continue;
    // Keep the occurrence whose removal saves least.
    std::vector<std::pair<double, Slot>> ranked;
    for (const Slot& s : slots) {
      const Route& route = child.routes[s.route];
      std::vector<Visit> without = route.visits;
      without.erase(without.begin() + s.pos);
      ranked.emplace_back(route_totals(inst, sp, route.visits, route.departure).cost -
                              route_totals(inst, sp, without, route.departure).cost,
                          s);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    for (std::size_t k = 0; k + 1 < ranked.size(); ++k) drop.push_back(ranked[k].second);
  }
  std::sort(drop.begin(), drop.end(), [](const Slot& x, const Slot& y) {
    return x.route != y.route ? x.route < y.route : x.pos > y.pos;
  });
  for (const Slot& s : drop) {
    auto& visits = child.routes[s.route].visits;
    visits.erase(visits.begin() + s.pos);
  }
}

void insert_cheapest(const Instance& inst, const ShortestPathMatrix& sp, Solution& child, TaskId task) {
  double best_delta = kInfinity;
  int best_route = -1;
  int best_pos = 0;
  Visit best_visit{task, false};
  const int orientations = inst.can_reverse(task) ? 2 : 1;
  for (int r = 0; r < static_cast<int>(child.routes.size()); ++r) {
    const Route& route = child.routes[r];
    const RouteState state = build_route_state(inst, sp, route);
    if (state.load() + inst.demand(task) > inst.capacity) continue;
    for (int q = 0; q <= static_cast<int>(route.visits.size()); ++q) {
      for (int o = 0; o < orientations; ++o) {
        const Visit v{task, o == 1};
        RouteCursor cur = state.states[q];
        advance(inst, sp, cur, v);
        for (std::size_t k = q; k < route.visits.size(); ++k) advance(inst, sp, cur, route.visits[k]);
        if (horizon_lateness(inst, route.departure, return_time(sp, cur)) > 0.0) continue;
        const double delta = closing_cost(sp, cur) - state.total_cost;
        if (delta < best_delta) {
          best_delta = delta;
          best_route = r;
          best_pos = q;
          best_visit = v;
        }
      }
    }
  }
  if (best_route >= 0) {
    auto& visits = child.routes[best_route].visits;
    visits.insert(visits.begin() + best_pos, best_visit);
    return;
  }
  Route fresh;
  double fresh_cost = kInfinity;
  for (int o = 0; o < orientations; ++o) {
    const Visit v{task, o == 1};
    const double c = route_totals(inst, sp, {v}, 0.0).cost;
    if (c < fresh_cost) {
      fresh_cost = c;
      fresh.visits = {v};
    }
  }
  child.routes.push_back(std::move(fresh));
}

}  // namespace

Solution sbx_crossover(const Solution& a, const Solution& b, const Instance& inst, const ShortestPathMatrix& sp,
                       const SbxChoice& choice) {
  if (choice.route_a < 0 || choice.route_a >= static_cast<int>(a.routes.size()) || choice.route_b < 0 ||
      choice.route_b >= static_cast<int>(b.routes.size())) {
    throw std::out_of_range("crossover route index out of range");
  }
  const auto& ra = a.routes[choice.route_a].visits;
  const auto& rb = b.routes[choice.route_b].visits;
  if (choice.cut_a < 0 || choice.cut_a > static_cast<int>(ra.size()) || choice.cut_b < 0 ||
      choice.cut_b > static_cast<int>(rb.size())) {
    throw std::out_of_range("crossover cut point out of range");
  }

  Solution child = a;
  auto& fresh = child.routes[choice.route_a];
  fresh.visits.assign(ra.begin(), ra.begin() + choice.cut_a);
  fresh.visits.insert(fresh.visits.end(), rb.begin() + choice.cut_b, rb.end());
  remove_duplicates(inst, sp, child);

  // Trim the recombined route until it returns within the horizon.
  while (fresh.visits.size() > 1 &&
         horizon_lateness(inst, fresh.departure, route_totals(inst, sp, fresh.visits, fresh.departure).ret) > 0.0) {
    fresh.visits.pop_back();
  }

  std::vector<bool> present(inst.task_count(), false);
  for (const Route& r : child.routes) {
    for (Visit v : r.visits) present[v.task] = true;
  }
  std::vector<TaskId> missing;
  for (Visit v : ra) {
    if (!present[v.task]) missing.push_back(v.task);
  }
  for (Visit v : rb) {
    if (!present[v.task] && std::find(missing.begin(), missing.end(), v.task) == missing.end()) {
      missing.push_back(v.task);
    }
  }
  child.drop_empty_routes();
  for (TaskId t : missing) insert_cheapest(inst, sp, child, t);
  return child;
}

Solution sbx_crossover(const Solution& a, const Solution& b, const Instance& inst, const ShortestPathMatrix& sp,
                       Rng& rng) {
  auto pick = [&rng](int hi) { return std::uniform_int_distribution<int>(0, hi)(rng); };
  SbxChoice c;
  c.route_a = pick(static_cast<int>(a.routes.size()) - 1);
  c.route_b = pick(static_cast<int>(b.routes.size()) - 1);
  c.cut_a = pick(static_cast<int>(a.routes[c.route_a].visits.size()));
  c.cut_b = pick(static_cast<int>(b.routes[c.route_b].visits.size()));
  return sbx_crossover(a, b, inst, sp, c);
}

void stochastic_rank(std::vector<Individual>& pop, double pf, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = pop.size();
  for (std::size_t sweep = 0; sweep < n; ++sweep) {
    bool swapped = false;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const Individual& x = pop[j];
      const Individual& y = pop[j + 1];
      const bool by_cost = (x.feasible() && y.feasible()) || u(rng) < pf;
      const bool out_of_order = by_cost ? x.eval.tc > y.eval.tc : x.eval.violation > y.eval.violation;
      if (out_of_order) {
        std::swap(pop[j], pop[j + 1]);
        swapped = true;
      }
    }
    if (!swapped) break;
  }
}

namespace {

bool better_feasible(const Individual& x, const Individual& y) {
  if (x.eval.tc != y.eval.tc) return x.eval.tc < y.eval.tc;
  return x.solution.routes.size() < y.solution.routes.size();
}

}  // namespace

KgmaResult kgma_run(const Instance& inst, const ShortestPathMatrix& sp, const MemeticParams& params, Rng& rng,
                    const StopRule& stop) {
  validate(params);
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  KgmaResult result;
  auto consider = [&](const Individual& ind) {
    if (!ind.feasible()) return;
    if (!result.found_feasible || better_feasible(ind, result.best)) {
      result.best = ind;
      result.found_feasible = true;
    }
  };
  auto target_hit = [&] { return result.found_feasible && result.best.eval.tc <= stop.target_cost; };
  auto record = [&](int generation, const std::vector<Individual>& pop) {
    TraceRow row;
    row.generation = generation;
    row.best_tc = result.found_feasible ? result.best.eval.tc : kInfinity;
    double sum = 0.0;
    for (const Individual& ind : pop) {
      sum += ind.eval.tc;
      row.feasible_count += ind.feasible() ? 1 : 0;
    }
    row.mean_tc = sum / static_cast<double>(pop.size());
    row.seconds = elapsed();
    for (const SearchCounters& c : result.stats.counters) {
      row.moves_enumerated += c.moves_enumerated;
      row.pruned_by_criterion1 += c.pruned_by_criterion1;
      row.criterion2_evaluations += c.criterion2_evaluations;
      row.full_route_evaluations += c.full_route_evaluations;
      row.improvements += c.improvements;
    }
    result.trace.push_back(row);
  };

  InitConfig init;
  init.psize = params.psize;
  init.max_retries = params.init_retries;
  init.mode = params.init;
  Population initial = kgis_population(inst, sp, init, rng);
  result.duplicate_warnings = initial.duplicate_warnings;

  std::vector<Individual> pop;
  pop.reserve(params.psize + params.osnum);
  for (Solution& s : initial.individuals) {
    pop.push_back(make_individual(inst, sp, std::move(s)));
    consider(pop.back());
  }
  result.init_best_tc = result.found_feasible ? result.best.eval.tc : kInfinity;
  record(0, pop);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto local_search = [&](const Solution& s) {
    return kgslss(inst, sp, s, params.lambda, result.stats, params.operators).solution;
  };

  bool out_of_time = false;
  for (int gen = 1; gen <= std::min(params.gnum, stop.generations); ++gen) {
    if (target_hit() || elapsed() >= stop.wallclock_seconds) break;
    std::set<std::vector<std::vector<Visit>>> keys;
    for (const Individual& ind : pop) keys.insert(plan_key(ind.solution));
    auto admit = [&](const Solution& s) {
      auto key = plan_key(s);
      if (keys.contains(key)) return false;
      keys.insert(std::move(key));
      pop.push_back(make_individual(inst, sp, s));
      consider(pop.back());
      return true;
    };

    const int parents = static_cast<int>(pop.size());
    for (int i = 0; i < params.osnum; ++i) {
      if (elapsed() >= stop.wallclock_seconds) {
        out_of_time = true;
        break;
      }
      const int p1 = std::uniform_int_distribution<int>(0, parents - 1)(rng);
      int p2 = std::uniform_int_distribution<int>(0, parents - 2)(rng);
      if (p2 >= p1) ++p2;
      const Solution s3 = sbx_crossover(pop[p1].solution, pop[p2].solution, inst, sp, rng);
      if (unit(rng) < params.pls) {
        Solution improved = local_search(s3);
        improved = merge_split(inst, sp, improved, params.merge_routes, rng);
        improved = local_search(improved);
        if (!admit(improved)) admit(s3);
      } else {
        admit(s3);
      }
      if (target_hit()) break;
    }
    stochastic_rank(pop, params.pf, rng);
    if (static_cast<int>(pop.size()) > params.psize) pop.resize(params.psize);
    result.generations = gen;
    record(gen, pop);
    if (out_of_time) break;
  }
  result.reached_target = target_hit();
  result.seconds = elapsed();
  return result;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "generation,best_tc,mean_tc,feasible_count,seconds,moves_enumerated,pruned_by_criterion1,"
         "criterion2_evaluations,full_route_evaluations,improvements\n";
  for (const TraceRow& r : trace) {
    out << r.generation << ',' << format_real(r.best_tc) << ',' << format_real(r.mean_tc) << ',' << r.feasible_count
        << ',' << format_real(r.seconds) << ',' << r.moves_enumerated << ',' << r.pruned_by_criterion1 << ','
        << r.criterion2_evaluations << ',' << r.full_route_evaluations << ',' << r.improvements << '\n';
  }
}

}  // namespace tdcarp
