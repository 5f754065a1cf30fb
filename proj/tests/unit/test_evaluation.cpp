#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "tdcarp/oracle.hpp"

using namespace tdcarp;

TEST(EvaluateRoute, EmptyRoute) {
  const Instance inst = fixtures::load("micro-A.td");
  const auto sp = all_pairs_shortest_paths(inst);
  const RouteEvaluation e = evaluate_route(inst, sp, Route{});
  EXPECT_EQ(e.total_cost, 0.0);
  EXPECT_EQ(e.load, 0.0);
  EXPECT_TRUE(e.feasible_capacity && e.feasible_horizon);
}

TEST(EvaluateRoute, HandSimulatedMicroA) {
  const Instance inst = fixtures::load("micro-A.td");
  const auto sp = all_pairs_shortest_paths(inst);
  // Spreadsheet: begins 0, 2, 5; gaps 10, 0, 15; sc 13, 4, 20; return leg 3->0 costs 7.
  const RouteEvaluation e = evaluate_route(inst, sp, Route{{{0, false}, {1, false}, {2, false}}, 0.0});
  EXPECT_EQ(e.begin_times, (std::vector<double>{0, 2, 5}));
  EXPECT_EQ(e.gaps, (std::vector<double>{10, 0, 15}));
  EXPECT_EQ(e.service_costs, (std::vector<double>{13, 4, 20}));
  EXPECT_EQ(e.travel_cost, 7.0);
  EXPECT_EQ(e.total_cost, 44.0);
  EXPECT_EQ(e.return_time, 14.0);
  EXPECT_EQ(e.load, 4.0);

  const RouteEvaluation late = evaluate_route(inst, sp, Route{{{0, false}, {1, false}, {2, false}}, 10.0});
  EXPECT_EQ(late.begin_times, (std::vector<double>{10, 12, 15}));
  EXPECT_EQ(late.total_cost, 3 + 4 + 10 + 7.0);
}

TEST(EvaluateRoute, ReversedVisitUsesInverseArc) {
  const Instance inst = fixtures::load("micro-A.td");
  const auto sp = all_pairs_shortest_paths(inst);
  // 1- serves 1->0: deadhead 0->1 (3), serve at 3 (gap 7 -> 10), end at 0.
  const RouteEvaluation e = evaluate_route(inst, sp, Route{{{0, true}}, 0.0});
  EXPECT_EQ(e.begin_times, (std::vector<double>{3}));
  EXPECT_EQ(e.total_cost, 3 + 10.0);
  EXPECT_THROW(evaluate_route(inst, sp, Route{{{3, true}}, 0.0}), InvalidRouteError);
  EXPECT_THROW(evaluate_route(inst, sp, Route{{{9, false}}, 0.0}), InvalidRouteError);
}

TEST(EvaluateRoute, BeginTimesNondecreasing) {
  const Instance inst = fixtures::generated(3, false, 1.0);
  const auto sp = all_pairs_shortest_paths(inst);
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const Solution sol = fixtures::random_solution(inst, rng, 3, 100.0);
    for (const Route& r : sol.routes) {
      const auto e = evaluate_route(inst, sp, r);
      EXPECT_TRUE(std::is_sorted(e.begin_times.begin(), e.begin_times.end()));
      double sum = e.travel_cost;
      for (double sc : e.service_costs) sum += sc;
      EXPECT_NEAR(sum, e.total_cost, 1e-9);
    }
  }
}

TEST(EvaluateSolution, EmptyRoutesAndSum) {
  const Instance empty = parse_instance_string(
      "NAME e\nVERTICES 2\nCAPACITY 5\nHORIZON 10\nTYPE 2LP\nSLOPE 1\nARCS\n0 1 1 1 1\n1 0 1 1 1\nEND\n");
  const auto sp0 = all_pairs_shortest_paths(empty);
  EXPECT_EQ(evaluate_solution(empty, sp0, Solution{{Route{}, Route{}}}).tc, 0.0);

  const Instance inst = fixtures::load("micro-B.td");
  const auto sp = all_pairs_shortest_paths(inst);
  Rng rng(2);
  const Solution sol = fixtures::random_solution(inst, rng, 3);
  const auto e = evaluate_solution(inst, sp, sol);
  double sum = 0.0;
  for (const auto& r : e.per_route) sum += r.total_cost;
  EXPECT_EQ(e.tc, sum);
}

TEST(EvaluateSolution, CoverageErrorsNameTheTask) {
  const Instance inst = fixtures::load("micro-A.td");
  const auto sp = all_pairs_shortest_paths(inst);
  Solution missing = fixtures::singleton_routes(inst);
  missing.routes.pop_back();
  try {
    evaluate_solution(inst, sp, missing);
    FAIL();
  } catch (const CoverageError& e) {
    EXPECT_EQ(e.task(), 4);
  }
  Solution twice = fixtures::singleton_routes(inst);
  twice.routes[0].visits.push_back({2, true});
  try {
    evaluate_solution(inst, sp, twice);
    FAIL();
  } catch (const CoverageError& e) {
    EXPECT_EQ(e.task(), 2);
  }
}

TEST(EvaluateSolution, FlatFunctionsGiveClassicCost) {
  const auto base = generate_classic_base(SyntheticBaseSpec{}, 21);
  const Instance inst = generate_td_parameters(base, InstanceType::TwoSegment, 2.0, flat_everywhere_policy(), 1);
  const auto sp = all_pairs_shortest_paths(inst);
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    const Solution sol = fixtures::random_solution(inst, rng, 6, 50.0);
    EXPECT_NEAR(evaluate_solution(inst, sp, sol).tc, classic_carp_cost(inst, sol), 1e-9);
  }
}

TEST(EvaluateSolution, LoadIsPermutationInvariant) {
  const Instance inst = fixtures::generated(4, true, 1.0);
  const auto sp = all_pairs_shortest_paths(inst);
  Rng rng(3);
  Solution sol = fixtures::random_solution(inst, rng, 2);
  const double load = evaluate_route(inst, sp, sol.routes[0]).load;
  std::shuffle(sol.routes[0].visits.begin(), sol.routes[0].visits.end(), rng);
  EXPECT_EQ(evaluate_route(inst, sp, sol.routes[0]).load, load);
}

TEST(EvaluateSolution, DepartureShiftOnlyChangesCostAndHorizon) {
  const Instance inst = fixtures::load("micro-A.td");
  const auto sp = all_pairs_shortest_paths(inst);
  Route r{{{0, false}, {1, false}}, 0.0};
  const auto early = evaluate_route(inst, sp, r);
  r.departure = 195.0;
  const auto late = evaluate_route(inst, sp, r);
  EXPECT_EQ(early.load, late.load);
  EXPECT_TRUE(early.feasible_horizon);
  EXPECT_FALSE(late.feasible_horizon);
}

TEST(Feasibility, Diagnostics) {
  const Instance inst = fixtures::load("micro-A.td");
  const auto sp = all_pairs_shortest_paths(inst);
  // Load exactly Q = 4 is allowed.
  Solution full{{Route{{{0, false}, {1, false}, {2, false}}, 0.0}, Route{{{3, false}, {4, false}}, 0.0}}};
  EXPECT_EQ(evaluate_solution(inst, sp, full).per_route[0].load, 4.0);
  EXPECT_TRUE(is_feasible(inst, sp, full).feasible);

  Solution missing = full;
  missing.routes[1].visits.pop_back();
  auto report = is_feasible(inst, sp, missing);
  EXPECT_FALSE(report.feasible);
  ASSERT_FALSE(report.diagnostics.empty());
  EXPECT_EQ(report.diagnostics[0].rfind("coverage:", 0), 0u);

  Solution late = full;
  late.routes[1].departure = 199.0;
  report = is_feasible(inst, sp, late);
  EXPECT_FALSE(report.feasible);
  EXPECT_EQ(report.diagnostics[0].rfind("horizon:", 0), 0u);

  Solution heavy{{Route{{{0, false}, {1, false}, {2, false}, {3, false}}, 0.0}, Route{{{4, false}}, 0.0}}};
  report = is_feasible(inst, sp, heavy);
  EXPECT_FALSE(report.feasible);
  EXPECT_EQ(report.diagnostics[0].rfind("capacity:", 0), 0u);
  EXPECT_EQ(evaluate_solution(inst, sp, heavy).violation, 2.0);
}

TEST(Delta, IdentityMoveIsZero) {
  const Instance inst = fixtures::load("micro-A.td");
  const auto sp = all_pairs_shortest_paths(inst);
  const Solution sol{{Route{{{0, false}, {1, false}, {2, false}}, 0.0}, Route{{{3, false}, {4, false}}, 0.0}}};
  const Move identity{MoveKind::SingleInsertion, 0, 1, 0, 1, false, false};
  const MoveDelta d = delta_evaluate(inst, sp, sol, identity);
  EXPECT_EQ(d.delta_sc, 0.0);
  EXPECT_EQ(d.delta_dc, 0.0);
}

TEST(Delta, TableISwap) {
  const Instance inst = fixtures::load("table1.td");
  const auto sp = all_pairs_shortest_paths(inst);
  const Solution sol = parse_solution_string("2 : 1+\n502 : 2+\n");
  const Move swap{MoveKind::Swap, 0, 0, 1, 0, false, false};
  const MoveDelta d = delta_evaluate(inst, sp, sol, swap);
  EXPECT_EQ(d.delta_sc, 998.0);
  EXPECT_EQ(d.delta_dc, 0.0);
}

TEST(Delta, MatchesFullReevaluationOnRandomMoves) {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = fixtures::generated(seed, seed % 2 == 0, seed % 3 == 0 ? 2.0 : 0.5);
    const auto sp = all_pairs_shortest_paths(inst);
    Rng rng(seed);
    for (int s = 0; s < 5; ++s) {
      const Solution sol = fixtures::random_solution(inst, rng, 4, 200.0);
      const double tc = evaluate_solution(inst, sp, sol).tc;
      const SolutionState state = build_solution_state(inst, sp, sol);
      for (MoveKind kind : {MoveKind::SingleInsertion, MoveKind::DoubleInsertion, MoveKind::Swap}) {
        const auto moves = enumerate_moves(inst, sol, kind);
        std::uniform_int_distribution<std::size_t> pick(0, moves.size() - 1);
        for (int k = 0; k < 8; ++k) {
          const Move& m = moves[pick(rng)];
          const MoveDelta d = delta_evaluate(inst, sp, sol, state, m);
          const double after = evaluate_solution(inst, sp, apply_move(inst, sol, m)).tc;
          ASSERT_NEAR(d.total(), after - tc, 1e-9) << describe(m);
          ++checked;
        }
      }
    }
  }
  EXPECT_GE(checked, 1000);
}

TEST(Delta, StatelessOverloadAgrees) {
  const Instance inst = fixtures::load("micro-B.td");
  const auto sp = all_pairs_shortest_paths(inst);
  Rng rng(9);
  const Solution sol = fixtures::random_solution(inst, rng, 3);
  const SolutionState state = build_solution_state(inst, sp, sol);
  for (const Move& m : enumerate_moves(inst, sol, MoveKind::Swap)) {
    EXPECT_EQ(delta_evaluate(inst, sp, sol, m).total(), delta_evaluate(inst, sp, sol, state, m).total());
  }
}
