#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdcarp {

using VertexId = int;
using ArcId = int;
using TaskId = int;

inline constexpr VertexId kDepot = 0;

enum class InstanceType { TwoSegment, ThreeSegment };  // 2LP / 3LP

/// How long a vehicle spends on a task once service begins.
enum class ServiceDuration { Static, CostCoupled };

const char* to_string(InstanceType type);
const char* to_string(ServiceDuration mode);

/// Piecewise-linear service cost in the service beginning time T.
///
/// The cost equals `min_sc` on the optimal interval [bt, et] and grows with
/// slope `slope_abs` on either side. Two-segment functions have bt = 0, so for
/// T >= 0 only the flat and increasing segments are reachable.
struct ServiceCostFunction {
  InstanceType kind = InstanceType::ThreeSegment;
  double bt = 0.0;
  double et = 0.0;
  double min_sc = 0.0;
  double slope_abs = 0.0;

  bool operator==(const ServiceCostFunction&) const = default;
};

/// Distance from T to the optimal service interval; zero inside [bt, et].
double time_gap(const ServiceCostFunction& fn, double t);

/// min_sc + time_gap(fn, t) * slope_abs.
double eval_service_cost(const ServiceCostFunction& fn, double t);

struct Arc {
  ArcId id = 0;
  VertexId tail = 0;
  VertexId head = 0;
  double length = 0.0;
  double travel_time = 0.0;
  double travel_cost = 0.0;
  bool required = false;
  double demand = 0.0;
  double service_time = 0.0;
  std::optional<ServiceCostFunction> cost_fn;
  /// Opposite-direction arc serving the same task (required pairs only).
  std::optional<ArcId> inverse_id;

  bool operator==(const Arc&) const = default;
};

/// A task served in one of its orientations. `reversed` selects inv(e).
struct Visit {
  TaskId task = 0;
  bool reversed = false;

  bool operator==(const Visit&) const = default;
  auto operator<=>(const Visit&) const = default;
};

struct Instance {
  std::string name;
  int n_vertices = 0;
  std::vector<Arc> arcs;
  /// Canonical required arc of every task; the task id is the index here.
  std::vector<ArcId> tasks;
  double capacity = 0.0;
  double planning_horizon = 0.0;
  InstanceType instance_type = InstanceType::ThreeSegment;
  double global_slope_abs = 0.0;
  std::optional<int> fleet_bound;
  ServiceDuration service_duration = ServiceDuration::Static;

  bool operator==(const Instance&) const = default;

  int task_count() const { return static_cast<int>(tasks.size()); }

  bool can_reverse(TaskId task) const {
    return arcs[tasks[task]].inverse_id.has_value();
  }

  /// The arc actually traversed when serving `v`.
  const Arc& served_arc(Visit v) const {
    const Arc& canonical = arcs[tasks[v.task]];
    return v.reversed ? arcs[*canonical.inverse_id] : canonical;
  }

  double demand(TaskId task) const { return arcs[tasks[task]].demand; }
  double total_demand() const;
};

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

/// Checks every structural invariant and pairs required arcs with their
/// reverse required arcs. Rebuilds `tasks` and `inverse_id` from the arc list.
void finalize_instance(Instance& inst);

/// Validates an already finalized instance; throws InstanceError.
void validate_instance(const Instance& inst);

// ---------------------------------------------------------------------------
// Extended-DAT text format.

Instance parse_instance(std::istream& in);
Instance parse_instance_file(const std::string& path);
Instance parse_instance_string(const std::string& text);
void write_instance(std::ostream& out, const Instance& inst);
std::string write_instance_string(const Instance& inst);

/// Shortest round-trip decimal rendering used by every writer in the project.
std::string format_real(double value);

// ---------------------------------------------------------------------------
// Classic (time-independent) CARP data, undirected edges.

struct ClassicEdge {
  VertexId u = 0;
  VertexId v = 0;
  double cost = 0.0;
  double demand = 0.0;  // > 0 for required edges
};

struct ClassicInstance {
  std::string name;
  int n_vertices = 0;
  VertexId depot = 0;
  double capacity = 0.0;
  int vehicles = 0;
  std::vector<ClassicEdge> required;
  std::vector<ClassicEdge> non_required;
};

/// Reads Belenguer-style gdb/egl DAT files (NOMBRE / LISTA_ARISTAS_REQ ...).
/// Vertex labels are shifted so the depot becomes vertex 0.
ClassicInstance parse_classic_dat(std::istream& in);
ClassicInstance parse_classic_dat_file(const std::string& path);

/// Random connected classic instance of a chosen scale.
struct SyntheticBaseSpec {
  std::string name = "synthetic";
  int n_vertices = 77;
  int n_edges = 98;
  int n_required = 51;
  int min_cost = 1;
  int max_cost = 100;
  int min_demand = 1;
  int max_demand = 10;
  /// Capacity as a fraction of total demand.
  double capacity_fraction = 0.2;
};
ClassicInstance generate_classic_base(const SyntheticBaseSpec& spec, std::uint64_t seed);

enum class IntervalPolicyKind { FlatEverywhere, Random };

/// Placement of optimal service intervals. Windows are drawn on a time scale
/// derived from the base data (the expected duration of one full-vehicle
/// route), not on the full planning horizon.
struct IntervalPolicy {
  IntervalPolicyKind kind = IntervalPolicyKind::Random;
  double horizon_factor = 2.0;
  /// Interval starts (3LP) lie in [0, start_span * scale].
  double start_span = 1.0;
  double width_min = 0.05;
  double width_max = 0.3;
  /// Two-segment interval ends lie in [end_min, end_max] * scale.
  double end_min = 0.1;
  double end_max = 1.0;
};

IntervalPolicy flat_everywhere_policy();

/// Builds a CARPTDSC instance: each undirected edge becomes a pair of arcs
/// with dt = dc = len = classic cost; required pairs become one task with
/// st = min_sc = classic serving cost.
Instance generate_td_parameters(const ClassicInstance& base, InstanceType type,
                                double slope_abs, const IntervalPolicy& policy,
                                std::uint64_t seed);

// ---------------------------------------------------------------------------

/// All-pairs shortest travel cost and travel time. The two matrices are
/// computed independently (cost-shortest and time-shortest paths).
class ShortestPathMatrix {
 public:
  ShortestPathMatrix() = default;
  explicit ShortestPathMatrix(int n);

  int size() const { return n_; }
  double cost(VertexId from, VertexId to) const { return cost_[index(from, to)]; }
  double time(VertexId from, VertexId to) const { return time_[index(from, to)]; }
  /// Last arc on the stored cost-shortest path, or -1.
  ArcId predecessor(VertexId from, VertexId to) const { return pred_[index(from, to)]; }

  void set(VertexId from, VertexId to, double c, double t, ArcId pred) {
    cost_[index(from, to)] = c;
    time_[index(from, to)] = t;
    pred_[index(from, to)] = pred;
  }

  /// Vertex sequence of the stored cost-shortest path.
  std::vector<VertexId> path(const std::vector<Arc>& arcs, VertexId from, VertexId to) const;

 private:
  std::size_t index(VertexId from, VertexId to) const {
    return static_cast<std::size_t>(from) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(to);
  }

  int n_ = 0;
  std::vector<double> cost_;
  std::vector<double> time_;
  std::vector<ArcId> pred_;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Dijkstra from every vertex. Throws InstanceError when a task endpoint
/// cannot reach (or be reached from) the depot or another task.
ShortestPathMatrix all_pairs_shortest_paths(const Instance& inst);

}  // namespace tdcarp
