#pragma once

#include <algorithm>
#include <random>
#include <string>

#include "tdcarp/evaluation.hpp"
#include "tdcarp/instance.hpp"
#include "tdcarp/localsearch.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) { return std::string(TDCARP_TEST_DATA) + "/" + name; }

inline tdcarp::Instance load(const std::string& name) { return tdcarp::parse_instance_file(data_path(name)); }

/// Small generated instance; 2LP when `two_segment`.
inline tdcarp::Instance generated(std::uint64_t seed, bool two_segment, double slope, int vertices = 12,
                                  int edges = 20, int required = 14) {
  tdcarp::SyntheticBaseSpec spec;
  spec.name = "gen" + std::to_string(seed);
  spec.n_vertices = vertices;
  spec.n_edges = edges;
  spec.n_required = required;
  const auto base = tdcarp::generate_classic_base(spec, seed);
  return tdcarp::generate_td_parameters(
      base, two_segment ? tdcarp::InstanceType::TwoSegment : tdcarp::InstanceType::ThreeSegment, slope,
      tdcarp::IntervalPolicy{}, seed * 7 + 1);
}

/// Random permutation of all tasks with random orientations, cut into
/// `routes` routes (capacity ignored), departures in [0, max_departure].
inline tdcarp::Solution random_solution(const tdcarp::Instance& inst, tdcarp::Rng& rng, int routes,
                                        double max_departure = 0.0) {
  std::vector<tdcarp::TaskId> order(inst.task_count());
  for (int i = 0; i < inst.task_count(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  tdcarp::Solution sol;
  sol.routes.resize(routes);
  std::uniform_int_distribution<int> pick(0, routes - 1);
  std::bernoulli_distribution coin(0.5);
  for (tdcarp::TaskId t : order) {
    const bool rev = inst.can_reverse(t) && coin(rng);
    sol.routes[pick(rng)].visits.push_back({t, rev});
  }
  std::uniform_real_distribution<double> dep(0.0, max_departure);
  for (auto& r : sol.routes) r.departure = max_departure > 0.0 ? dep(rng) : 0.0;
  sol.drop_empty_routes();
  return sol;
}

/// One task per route in task order.
inline tdcarp::Solution singleton_routes(const tdcarp::Instance& inst) {
  tdcarp::Solution sol;
  for (int t = 0; t < inst.task_count(); ++t) sol.routes.push_back(tdcarp::Route{{{t, false}}, 0.0});
  return sol;
}

}  // namespace fixtures
