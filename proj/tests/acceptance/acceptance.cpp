// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tdcarp/departure.hpp"
#include "tdcarp/harness.hpp"
#include "tdcarp/init.hpp"
#include "tdcarp/memetic.hpp"
#include "tdcarp/oracle.hpp"

using namespace tdcarp;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const std::string kDataDir = TDCARP_DATA_DIR;

Instance generated(std::uint64_t seed, InstanceType type, double slope, int vertices, int edges, int required) {
  SyntheticBaseSpec spec;
  spec.name = "acc" + std::to_string(seed);
  spec.n_vertices = vertices;
  spec.n_edges = edges;
  spec.n_required = required;
  return generate_td_parameters(generate_classic_base(spec, seed), type, slope, IntervalPolicy{}, seed * 13 + 5);
}

Solution random_plan(const Instance& inst, Rng& rng, int routes, double max_departure) {
  std::vector<TaskId> order(inst.task_count());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  Solution sol;
  sol.routes.resize(routes);
  std::uniform_int_distribution<int> pick(0, routes - 1);
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> dep(0.0, max_departure);
  for (TaskId t : order) sol.routes[pick(rng)].visits.push_back({t, inst.can_reverse(t) && coin(rng)});
  for (Route& r : sol.routes) r.departure = dep(rng);
  sol.drop_empty_routes();
  return sol;
}

// 1 -------------------------------------------------------------------------

Outcome classic_reduction() {
  ExperimentConfig cfg;
  GeneratorSpec gen;
  gen.base_path = kDataDir + "/gdb1.dat";
  gen.type = InstanceType::TwoSegment;
  gen.slope_abs = 1.0;
  gen.policy = flat_everywhere_policy();
  cfg.instances.push_back(InstanceSpec{{}, gen, "gdb1-flat"});
  cfg.repetitions = 20;
  cfg.params.psize = 10;
  cfg.params.pls = 0.1;
  cfg.params.gnum = 50;
  cfg.stop.generations = 50;
  const auto t0 = Clock::now();
  const ExperimentReport report = run_experiment(cfg);
  const InstanceRow& row = report.rows.at(0);
  const bool pass = row.error.empty() && row.feasible_runs == 20 && row.best == 316.0 && row.ave <= 332.0;
  return {pass, fmt("gdb1 flat 2LP, 20 seeds: Best=%g (want 316) Ave=%.2f (want <= 332) Std=%.2f, %.1fs",
                    row.best, row.ave, row.std, seconds_since(t0))};
}

// 2 and 3 -------------------------------------------------------------------

struct MoveCorpusResult {
  std::size_t moves = 0;
  std::size_t instances = 0;
  double worst_delta_error = 0.0;
  std::size_t successful = 0;
  std::size_t unsound = 0;
};

const MoveCorpusResult& move_corpus() {
  static const MoveCorpusResult result = [] {
    MoveCorpusResult out;
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
      const InstanceType type = seed % 2 == 0 ? InstanceType::TwoSegment : InstanceType::ThreeSegment;
      const double slope = 0.5 * static_cast<double>(1 + seed % 4);
      const Instance inst = generated(seed, type, slope, 12, 20, 14);
      const auto sp = all_pairs_shortest_paths(inst);
      ++out.instances;
      Rng rng(seed);
      std::vector<Solution> starts = {random_plan(inst, rng, 3, 0.0), random_plan(inst, rng, 4, 40.0),
                                      kgis_individual(inst, sp, inst.global_slope_abs, rng)};
      for (const Solution& sol : starts) {
        const double tc = evaluate_solution(inst, sp, sol).tc;
        const SolutionState state = build_solution_state(inst, sp, sol);
        for (MoveKind kind : {MoveKind::SingleInsertion, MoveKind::DoubleInsertion, MoveKind::Swap}) {
          for (const Move& m : enumerate_moves(inst, sol, kind)) {
            const double truth = evaluate_solution(inst, sp, apply_move(inst, sol, m)).tc - tc;
            const Criterion2Result c2 = criterion2_successful(inst, sp, sol, state, m);
            out.worst_delta_error = std::max(out.worst_delta_error, std::abs(c2.delta.total() - truth));
            if (c2.successful) {
              ++out.successful;
              if (!(truth < 0.0)) ++out.unsound;
            }
            ++out.moves;
          }
        }
      }
    }
    return out;
  }();
  return result;
}

Outcome delta_exactness() {
  const MoveCorpusResult& c = move_corpus();
  const bool pass = c.moves >= 10000 && c.instances >= 10 && c.worst_delta_error <= 1e-9;
  return {pass, fmt("%zu moves on %zu instances (2LP and 3LP), max |delta - full difference| = %.3g (want <= 1e-9)",
                    c.moves, c.instances, c.worst_delta_error)};
}

Outcome criterion2_soundness() {
  const MoveCorpusResult& c = move_corpus();
  const bool pass = c.moves >= 10000 && c.unsound == 0 && c.successful > 0;
  return {pass, fmt("%zu successful of %zu moves, %zu without a strict TC decrease (want 0)", c.successful, c.moves,
                    c.unsound)};
}

// 4 -------------------------------------------------------------------------

Outcome oracle_equivalence() {
  const std::vector<std::pair<std::uint64_t, double>> micro = {{201, 0.5}, {202, 2.0}, {203, 0.5}, {204, 2.0}, {205, 0.5}};
  std::ostringstream detail;
  bool pass = true;
  for (const auto& [seed, slope] : micro) {
    SyntheticBaseSpec spec;
    spec.name = "micro" + std::to_string(seed);
    spec.n_vertices = 6;
    spec.n_edges = 8;
    spec.n_required = seed % 2 == 0 ? 6 : 5;
    spec.capacity_fraction = 0.5;
    const Instance inst =
        generate_td_parameters(generate_classic_base(spec, seed), InstanceType::ThreeSegment, slope, IntervalPolicy{}, seed);
    const auto sp = all_pairs_shortest_paths(inst);
    const ExactResult exact = exact_solve(inst);
    OracleBudget at_zero;
    at_zero.zero_departures = true;
    const double exact_zero = exact_solve(inst, at_zero).tc;
    int hits = 0, stage1_hits = 0, stage2_hits = 0;
    double worst = 0.0;
    for (std::uint64_t run = 1; run <= 5; ++run) {
      Rng rng(run);
      MemeticParams params;
      const KgmaResult r = kgma_run(inst, sp, params, rng, StopRule{});
      DepartureOptions options;
      options.seed = run;
      const double total = stage2(inst, sp, r.best.solution, options).total;
      const double gap = total - exact.tc;
      if (std::abs(r.best.eval.tc - exact_zero) <= 1e-6) ++stage1_hits;
      // Best departures for this plan by dense grid, route by route.
      double plan_grid = 0.0;
      for (const Route& route : r.best.solution.routes) {
        const RouteCostFunction f = route_cost_of_t(inst, sp, route);
        auto within = [&](double t) { return f.return_time(t) > inst.planning_horizon ? kInfinity : f(t); };
        plan_grid += grid_scan(within, 0.0, f.hi(), 100000).value;
      }
      if (total <= plan_grid + exact.grid_error_bound + 1e-9) ++stage2_hits;
      worst = std::max(worst, gap);
      if (std::abs(gap) <= exact.grid_error_bound + 1e-9) ++hits;
    }
    pass = pass && hits >= 4;
    detail << "N=" << inst.task_count() << " |k|=" << slope << ": " << hits << "/5 (opt " << exact.tc
           << ", worst gap " << worst << ", bound " << exact.grid_error_bound << ", stage 1 at t=0 optimum "
           << stage1_hits << "/5, stage 2 at plan grid optimum " << stage2_hits << "/5); ";
  }
  return {pass, "want >= 4/5 per instance. " + detail.str()};
}

// 5 -------------------------------------------------------------------------

Outcome pruning_effect() {
  std::ostringstream detail;
  bool pass = true;
  for (std::uint64_t seed : {301, 302, 303}) {
    const InstanceType type = seed == 302 ? InstanceType::ThreeSegment : InstanceType::TwoSegment;
    SyntheticBaseSpec spec;
    spec.name = "egl-like" + std::to_string(seed);
    const Instance inst =
        generate_td_parameters(generate_classic_base(spec, seed), type, 1.0, IntervalPolicy{}, seed);
    const auto sp = all_pairs_shortest_paths(inst);
    Rng rng(seed);
    const Population pop = kgis_population(inst, sp, InitConfig{}, rng);
    std::vector<Solution> starts = pop.individuals;
    for (const Solution& s : pop.individuals) {
      Solution cur = s;
      OperatorStats scratch;
      for (int k = 0; k < 5; ++k) cur = kgslss(inst, sp, cur, 1.0, scratch).solution;
      starts.push_back(cur);
    }
    double min_ratio = kInfinity, kg_time = 0.0, trad_time = 0.0;
    std::uint64_t kg_evals = 0, trad_evals = 0;
    for (const Solution& sol : starts) {
      SearchCounters kg, trad;
      auto t0 = Clock::now();
      kg_operator(inst, sp, sol, MoveKind::Swap, 1.0, kg);
      kg_time += seconds_since(t0);
      t0 = Clock::now();
      traditional_operator(inst, sp, sol, MoveKind::Swap, trad);
      trad_time += seconds_since(t0);
      kg_evals += kg.criterion2_evaluations;
      trad_evals += trad.full_route_evaluations;
      const double ratio = kg.criterion2_evaluations == 0
                               ? kInfinity
                               : static_cast<double>(trad.full_route_evaluations) / kg.criterion2_evaluations;
      min_ratio = std::min(min_ratio, ratio);
    }
    const bool ok = min_ratio >= 2.0 && kg_time < trad_time;
    pass = pass && ok;
    detail << inst.name << (type == InstanceType::TwoSegment ? " 2LP" : " 3LP") << " N=" << inst.task_count() << ": "
           << starts.size() << " sweeps, count ratio min " << fmt("%.2f", min_ratio) << " total "
           << fmt("%.2f", static_cast<double>(trad_evals) / std::max<std::uint64_t>(kg_evals, 1)) << ", time ratio "
           << fmt("%.2f", trad_time / kg_time) << "; ";
  }
  return {pass, "want count ratio >= 2 every sweep and kg faster. " + detail.str()};
}

// 6 -------------------------------------------------------------------------

Outcome kgis_direction() {
  ExperimentConfig cfg;
  for (std::uint64_t seed : {401, 402, 403}) {
    GeneratorSpec gen;
    gen.synthetic.name = "gdb-like" + std::to_string(seed);
    gen.synthetic.n_vertices = 12;
    gen.synthetic.n_edges = 24;
    gen.synthetic.n_required = 22;
    gen.base_seed = seed;
    gen.seed = seed;
    gen.type = InstanceType::ThreeSegment;
    gen.slope_abs = 1.0;
    cfg.instances.push_back(InstanceSpec{{}, gen, gen.synthetic.name});
  }
  cfg.repetitions = 100;
  const std::vector<InitAblationRow> rows = ablation_init(cfg);
  std::ostringstream detail;
  bool pass = rows.size() == 3;
  for (const InitAblationRow& r : rows) {
    pass = pass && r.kgis_best.size() == 100 && r.kgis_mean <= r.baseline_mean;
    detail << r.instance << ": kgis " << fmt("%.2f", r.kgis_mean) << " vs baseline " << fmt("%.2f", r.baseline_mean)
           << "; ";
  }
  return {pass, "100 paired seeds, 3LP. " + detail.str()};
}

// 7 -------------------------------------------------------------------------

Outcome departure_search() {
  Rng rng(701);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double lo = 0.0, hi = 100.0, tol = 1e-3;
  const int steps = 100000;
  int gss_ok = 0;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    // Minimizer on a grid point; random breakpoints and slopes on each side.
    const double m = std::round(u(rng) * steps) * (hi - lo) / steps;
    std::vector<std::pair<double, double>> left, right;  // (breakpoint distance, slope)
    double d = 0.0;
    for (int k = 0; k < 4; ++k) left.push_back({d += u(rng) * 30.0, 0.05 + u(rng) * 3.0});
    d = 0.0;
    for (int k = 0; k < 4; ++k) right.push_back({d += u(rng) * 30.0, 0.05 + u(rng) * 3.0});
    auto side = [](const std::vector<std::pair<double, double>>& pieces, double dist) {
      double v = 0.0, start = 0.0;
      for (std::size_t k = 0; k < pieces.size(); ++k) {
        const double end = k + 1 < pieces.size() ? pieces[k + 1].first : kInfinity;
        if (dist <= start) break;
        v += pieces[k].second * (std::min(dist, end) - start);
        start = end;
      }
      return v;
    };
    auto f = [&](double t) { return t < m ? side(left, m - t) : side(right, t - m); };
    const double t = gss(f, lo, hi, tol);
    const GridMinimum g = grid_scan(f, lo, hi, steps);
    const double err = std::abs(t - g.t);
    worst = std::max(worst, err);
    if (err <= tol) ++gss_ok;
  }

  int ncs_ok = 0;
  NcsParams params;
  params.budget = 500;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng frng(7000 + seed);
    const double m1 = 5.0 + u(frng) * 40.0, m2 = 55.0 + u(frng) * 40.0;
    const double a1 = 0.05 + u(frng), a2 = 0.05 + u(frng);
    const bool global_right = seed % 2 == 1;
    const double h1 = global_right ? 3.0 : 0.0, h2 = global_right ? 0.0 : 3.0;
    auto c1 = [=](double x) { return a1 * (x - m1) * (x - m1) + h1; };
    auto c2 = [=](double x) { return a2 * (x - m2) * (x - m2) + h2; };
    auto f = [&](double x) { return std::min(c1(x), c2(x)); };
    Rng nrng(seed);
    const double t = ncs(f, lo, hi, params, nrng);
    const bool in_global_basin = global_right ? c2(t) <= c1(t) : c1(t) <= c2(t);
    if (in_global_basin) ++ncs_ok;
  }
  const bool pass = gss_ok == 50 && ncs_ok >= 18;
  return {pass, fmt("gss within tol %g of grid optimum on %d/50 (worst %.3g); ncs global basin on %d/20 (want >= 18)",
                    tol, gss_ok, worst, ncs_ok)};
}

// 8 -------------------------------------------------------------------------

Outcome table_one() {
  const Instance inst = parse_instance_file(std::string(TDCARP_TEST_DATA) + "/table1.td");
  const auto sp = all_pairs_shortest_paths(inst);
  const ServiceCostFunction& r = *inst.served_arc(Visit{0, false}).cost_fn;
  const ServiceCostFunction& s = *inst.served_arc(Visit{1, false}).cost_fn;
  const std::vector<double> got = {time_gap(r, 2),   eval_service_cost(r, 2),   time_gap(s, 502), eval_service_cost(s, 502),
                                   time_gap(r, 502), eval_service_cost(r, 502), time_gap(s, 2),   eval_service_cost(s, 2)};
  const std::vector<double> want = {0, 1, 0, 1, 499, 500, 499, 500};
  const Solution sol = parse_solution_string("2 : 1+\n502 : 2+\n");
  const SolutionState state = build_solution_state(inst, sp, sol);
  const bool failed = criterion1_failed(inst, sp, sol, state, Move{MoveKind::Swap, 0, 0, 1, 0, false, false}, 1.0);
  std::ostringstream cells;
  for (double v : got) cells << v << ' ';
  return {got == want && failed, "cells " + cells.str() + "(want 0 1 0 1 499 500 499 500); swap pruned by criterion 1: " +
                                     (failed ? "yes" : "no")};
}

// 9 -------------------------------------------------------------------------

Outcome statistics() {
  const std::vector<double> a = {301, 305, 307, 310, 312, 314, 318, 320, 322, 325};
  const std::vector<double> b = {309, 315, 317, 319, 321, 324, 326, 328, 330, 333};
  // Pairs with a > b: 310, 312, 314 beat one each; 318 beats three; 320 four;
  // 322 five; 325 six.
  const double hand_u = 21.0;
  const RankSumResult r = rank_sum_test(a, b);
  const double p = pdr(345.0, 339.0);
  const bool pass = r.u_a == hand_u && r.outcome == Comparison::Better && std::round(p * 100.0) / 100.0 == 1.77;
  return {pass, fmt("U=%g (hand 21), p=%.4f, outcome %s (want better); pdr(345,339)=%.4f%% (want 1.77)", r.u_a,
                    r.p_value, to_string(r.outcome), p)};
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, classic_reduction}, {2, delta_exactness},   {3, criterion2_soundness},
      {4, oracle_equivalence}, {5, pruning_effect},    {6, kgis_direction},
      {7, departure_search},   {8, table_one},         {9, statistics}};
  int failures = 0;
  for (const auto& [id, check] : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s criterion %d: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
