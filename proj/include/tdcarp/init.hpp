#pragma once

#include <vector>

#include "tdcarp/localsearch.hpp"

namespace tdcarp {

enum class InitMode { Kgis, Baseline };

const char* to_string(InitMode mode);

struct InitConfig {
  int psize = 10;
  /// Extra constructions attempted per slot before a duplicate is admitted.
  int max_retries = 50;
  InitMode mode = InitMode::Kgis;
};

/// Greedy route construction: the next task minimizes travel cost from the
/// current position plus slope_abs times its time gap at the tentative
/// begin time (routes depart at 0). Equal scores are broken at random.
/// Throws InstanceError when some task does not fit even an empty route.
Solution kgis_individual(const Instance& inst, const ShortestPathMatrix& sp, double slope_abs, Rng& rng);

/// The same construction scored by travel cost alone.
Solution baseline_individual(const Instance& inst, const ShortestPathMatrix& sp, Rng& rng);

struct Population {
  std::vector<Solution> individuals;
  /// Slots filled with a duplicate after max_retries failed attempts.
  int duplicate_warnings = 0;
};

Population kgis_population(const Instance& inst, const ShortestPathMatrix& sp, const InitConfig& cfg, Rng& rng);

}  // namespace tdcarp
