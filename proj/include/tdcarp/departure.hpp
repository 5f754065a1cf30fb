#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tdcarp/evaluation.hpp"
#include "tdcarp/localsearch.hpp"

namespace tdcarp {

/// Cost of one fixed task sequence as a function of its departure time.
class RouteCostFunction {
 public:
  RouteCostFunction(const Instance& inst, const ShortestPathMatrix& sp, std::vector<Visit> visits);

  double operator()(double departure) const;
  double return_time(double departure) const;

  /// Departures in [lo(), hi()] return to the depot within the horizon
  /// (checked pointwise when service durations depend on cost).
  double lo() const { return 0.0; }
  double hi() const { return hi_; }
  /// False when even departing at 0 misses the horizon.
  bool feasible() const { return hi_ >= 0.0; }

 private:
  const Instance* inst_;
  const ShortestPathMatrix* sp_;
  std::vector<Visit> visits_;
  double hi_ = 0.0;
};

RouteCostFunction route_cost_of_t(const Instance& inst, const ShortestPathMatrix& sp, const Route& route);

using UnivariateFn = std::function<double(double)>;

/// Golden section search. When both probes tie the bracket shrinks from
/// both sides, so a constant function yields the midpoint.
/// Throws std::invalid_argument for tol <= 0.
double gss(const UnivariateFn& f, double lo, double hi, double tol);

struct NcsParams {
  int pop_n = 10;
  /// Initial mutation scale; <= 0 selects (hi - lo) / 10.
  double sigma0 = 0.0;
  int epoch = 10;
  int budget = 2000;
  /// Mean of the replacement threshold trading cost against diversity.
  double diversity_tradeoff = 1.0;
  /// Sigma is divided (multiplied) by this after an epoch with success
  /// rate above (below) one fifth.
  double step_factor = 0.85;
};

/// Negatively correlated search over [lo, hi]. The first process starts at
/// lo, so the result is never worse than f(lo).
double ncs(const UnivariateFn& f, double lo, double hi, const NcsParams& params, Rng& rng);

enum class DepartureMethod { Zero, Gss, Ncs };

const char* to_string(DepartureMethod method);

struct DepartureOptions {
  /// <= 0 selects PT * 1e-6.
  double gss_tol = 0.0;
  NcsParams ncs;
  std::uint64_t seed = 1;
};

struct DepartureResult {
  std::vector<double> times;
  std::vector<double> per_route_cost;
  double total = 0.0;
  DepartureMethod method = DepartureMethod::Zero;
};

/// Per-route departure optimization: zero for 2LP, golden section search
/// for 3LP with slope <= 1 (kept only if it beats departing at 0), and
/// negatively correlated search otherwise.
DepartureResult stage2(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol,
                       const DepartureOptions& options = {});

/// `sol` with the departure times of `dep`.
Solution with_departures(Solution sol, const DepartureResult& dep);

}  // namespace tdcarp
