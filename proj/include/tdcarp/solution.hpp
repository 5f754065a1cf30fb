#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tdcarp/instance.hpp"

namespace tdcarp {

/// Ordered, oriented task sequence between two implicit depot visits.
struct Route {
  std::vector<Visit> visits;
  double departure = 0.0;

  bool operator==(const Route&) const = default;
};

struct Solution {
  std::vector<Route> routes;

  bool operator==(const Solution&) const = default;

  int task_count() const;
  void drop_empty_routes();
};

/// Route sequences sorted lexicographically; two plans with the same key
/// serve the same oriented sequences (departures are not part of the key).
std::vector<std::vector<Visit>> plan_key(const Solution& sol);

/// `t_k : 3+, 5-, 1+` per line; task numbers are 1-based, `-` marks the
/// reversed orientation.
void write_solution(std::ostream& out, const Solution& sol);
std::string write_solution_string(const Solution& sol);
Solution parse_solution(std::istream& in);
Solution parse_solution_string(const std::string& text);

}  // namespace tdcarp
