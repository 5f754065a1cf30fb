#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "tdcarp/instance.hpp"

namespace tdcarp {

namespace {

std::string trim(std::string s) {
  s.erase(0, s.find_first_not_of(" \t\r"));
  const auto last = s.find_last_not_of(" \t\r");
  s.erase(last == std::string::npos ? 0 : last + 1);
  return s;
}

std::string value_after_colon(const std::string& line) {
  const auto colon = line.find(':');
  return colon == std::string::npos ? std::string() : trim(line.substr(colon + 1));
}

/// "( 1, 2)   coste 13   demanda 1" -> {1, 2, 13, 1}
std::vector<double> edge_numbers(const std::string& line) {
  std::string cleaned;
  for (char c : line) {
    cleaned += (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-') ? c : ' ';
  }
  std::istringstream ss(cleaned);
  std::vector<double> out;
  for (double x; ss >> x;) out.push_back(x);
  return out;
}

}  // namespace

ClassicInstance parse_classic_dat(std::istream& in) {
  ClassicInstance out;
  enum class Section { Header, Required, NonRequired } section = Section::Header;
  int declared_required = -1;
  int declared_non_required = -1;
  int depot_label = 1;
  int line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '(') {
      const auto nums = edge_numbers(line);
      if (section == Section::Required) {
        if (nums.size() < 4) throw ParseError(line_no, "required edge needs u, v, cost, demand");
        out.required.push_back({static_cast<VertexId>(nums[0]), static_cast<VertexId>(nums[1]), nums[2], nums[3]});
      } else if (section == Section::NonRequired) {
        if (nums.size() < 3) throw ParseError(line_no, "edge needs u, v, cost");
        out.non_required.push_back({static_cast<VertexId>(nums[0]), static_cast<VertexId>(nums[1]), nums[2], 0.0});
      } else {
        throw ParseError(line_no, "edge outside an edge list");
      }
      continue;
    }
    std::string key = trim(line.substr(0, line.find(':')));
    if (key == "NOMBRE") {
      out.name = value_after_colon(line);
    } else if (key == "COMENTARIO" || key == "TIPO_COSTES_ARISTAS" || key == "COSTE_TOTAL_REQ") {
      // informational
    } else if (key == "VERTICES") {
      out.n_vertices = std::stoi(value_after_colon(line));
    } else if (key == "ARISTAS_REQ") {
      declared_required = std::stoi(value_after_colon(line));
    } else if (key == "ARISTAS_NOREQ") {
      declared_non_required = std::stoi(value_after_colon(line));
    } else if (key == "VEHICULOS") {
      out.vehicles = std::stoi(value_after_colon(line));
    } else if (key == "CAPACIDAD") {
      out.capacity = std::stod(value_after_colon(line));
    } else if (key == "LISTA_ARISTAS_REQ") {
      section = Section::Required;
    } else if (key == "LISTA_ARISTAS_NOREQ") {
      section = Section::NonRequired;
    } else if (key == "DEPOSITO") {
      depot_label = std::stoi(value_after_colon(line));
      section = Section::Header;
    } else if (key == "END" || key == "FIN") {
      break;
    } else {
      throw ParseError(line_no, "unknown field '" + key + "'");
    }
  }
  if (out.n_vertices < 1) throw ParseError(line_no, "missing VERTICES");
  if (!(out.capacity > 0)) throw ParseError(line_no, "missing CAPACIDAD");
  if (declared_required >= 0 && declared_required != static_cast<int>(out.required.size())) {
    throw ParseError(line_no, "ARISTAS_REQ does not match the required edge list");
  }
  if (declared_non_required >= 0 && declared_non_required != static_cast<int>(out.non_required.size())) {
    throw ParseError(line_no, "ARISTAS_NOREQ does not match the edge list");
  }
  if (depot_label < 1 || depot_label > out.n_vertices) throw ParseError(line_no, "depot out of range");

  // 1-based labels, depot first.
  auto relabel = [&](VertexId v) -> VertexId {
    if (v < 1 || v > out.n_vertices) throw ParseError(line_no, "edge references unknown vertex");
    if (v == depot_label) return 0;
    return v < depot_label ? v : v - 1;
  };
  for (auto& e : out.required) {
    e.u = relabel(e.u);
    e.v = relabel(e.v);
  }
  for (auto& e : out.non_required) {
    e.u = relabel(e.u);
    e.v = relabel(e.v);
  }
  out.depot = 0;
  return out;
}

ClassicInstance parse_classic_dat_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open classic DAT file " + path);
  return parse_classic_dat(in);
}

ClassicInstance generate_classic_base(const SyntheticBaseSpec& spec, std::uint64_t seed) {
  if (spec.n_vertices < 2 || spec.n_edges < spec.n_vertices - 1 || spec.n_required < 1 ||
      spec.n_required > spec.n_edges) {
    throw InstanceError("synthetic base spec is inconsistent");
  }
  const long long max_edges = static_cast<long long>(spec.n_vertices) * (spec.n_vertices - 1) / 2;
  if (spec.n_edges > max_edges) throw InstanceError("too many edges for a simple graph");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> cost_dist(spec.min_cost, spec.max_cost);
  std::uniform_int_distribution<int> demand_dist(spec.min_demand, spec.max_demand);

  // Random spanning tree over a shuffled vertex order, then extra edges
  // between nearby positions of that order so the graph stays road-like.
  std::vector<VertexId> order(spec.n_vertices);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin() + 1, order.end(), rng);
  std::vector<std::pair<VertexId, VertexId>> edges;
  std::vector<std::vector<bool>> present(spec.n_vertices, std::vector<bool>(spec.n_vertices, false));
  auto add = [&](VertexId a, VertexId b) {
    if (a == b || present[a][b]) return false;
    present[a][b] = present[b][a] = true;
    edges.emplace_back(a, b);
    return true;
  };
  for (int i = 1; i < spec.n_vertices; ++i) {
    const int back = std::min(i, 3);
    std::uniform_int_distribution<int> pick(i - back, i - 1);
    add(order[pick(rng)], order[i]);
  }
  std::uniform_int_distribution<int> any(0, spec.n_vertices - 1);
  int window = 4;
  int stalls = 0;
  while (static_cast<int>(edges.size()) < spec.n_edges) {
    const int i = any(rng);
    std::uniform_int_distribution<int> off(1, window);
    const int j = std::min(spec.n_vertices - 1, i + off(rng));
    if (!add(order[i], order[j])) {
      if (++stalls > 50 * spec.n_edges) {
        ++window;
        stalls = 0;
      }
    }
  }

  std::vector<int> idx(edges.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<bool> is_required(edges.size(), false);
  for (int k = 0; k < spec.n_required; ++k) is_required[idx[k]] = true;

  ClassicInstance out;
  out.name = spec.name;
  out.n_vertices = spec.n_vertices;
  out.depot = 0;
  double total_demand = 0.0;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    ClassicEdge e{edges[k].first, edges[k].second, static_cast<double>(cost_dist(rng)), 0.0};
    if (is_required[k]) {
      e.demand = demand_dist(rng);
      total_demand += e.demand;
      out.required.push_back(e);
    } else {
      out.non_required.push_back(e);
    }
  }
  double max_demand = 0.0;
  for (const auto& e : out.required) max_demand = std::max(max_demand, e.demand);
  out.capacity = std::max(max_demand, std::round(spec.capacity_fraction * total_demand));
  out.vehicles = static_cast<int>(std::ceil(total_demand / out.capacity));
  return out;
}

IntervalPolicy flat_everywhere_policy() {
  IntervalPolicy p;
  p.kind = IntervalPolicyKind::FlatEverywhere;
  return p;
}

Instance generate_td_parameters(const ClassicInstance& base, InstanceType type, double slope_abs,
                                const IntervalPolicy& policy, std::uint64_t seed) {
  if (slope_abs < 0.0) throw InstanceError("slope must be nonnegative");
  if (!(policy.horizon_factor > 0.0)) throw InstanceError("horizon too small to contain any interval");

  Instance inst;
  inst.name = std::string(type == InstanceType::TwoSegment ? "2lp-" : "3lp-") + base.name;
  inst.n_vertices = base.n_vertices;
  inst.capacity = base.capacity;
  inst.instance_type = type;
  inst.global_slope_abs = slope_abs;

  auto push_arc = [&](VertexId u, VertexId v, double cost, bool required, double demand) {
    Arc arc;
    arc.tail = u;
    arc.head = v;
    arc.length = arc.travel_time = arc.travel_cost = cost;
    arc.required = required;
    if (required) {
      arc.demand = demand;
      arc.service_time = cost;
    }
    inst.arcs.push_back(arc);
  };
  for (const auto& e : base.required) {
    if (!(e.demand > 0.0)) throw InstanceError("required edge without demand in base data");
    push_arc(e.u, e.v, e.cost, true, e.demand);
    push_arc(e.v, e.u, e.cost, true, e.demand);
  }
  for (const auto& e : base.non_required) {
    push_arc(e.u, e.v, e.cost, false, 0.0);
    push_arc(e.v, e.u, e.cost, false, 0.0);
  }

  double total_time = 0.0;
  double task_service = 0.0;
  double task_demand = 0.0;
  for (const Arc& arc : inst.arcs) total_time += arc.travel_time + arc.service_time;
  for (const auto& e : base.required) {
    task_service += e.cost;
    task_demand += e.demand;
  }
  inst.planning_horizon = policy.horizon_factor * total_time;
  if (!(inst.planning_horizon > 0.0)) throw InstanceError("horizon too small to contain any interval");

  // Expected duration of one full-vehicle route, used as the window scale.
  const double load_share = task_demand > 0 ? std::min(1.0, base.capacity / task_demand) : 1.0;
  const double scale = std::min(inst.planning_horizon, 2.0 * task_service * load_share);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double pt = inst.planning_horizon;
  for (std::size_t t = 0; t < base.required.size(); ++t) {
    ServiceCostFunction fn;
    fn.kind = type;
    fn.min_sc = base.required[t].cost;
    fn.slope_abs = slope_abs;
    if (policy.kind == IntervalPolicyKind::FlatEverywhere) {
      fn.bt = 0.0;
      fn.et = pt;
    } else if (type == InstanceType::TwoSegment) {
      fn.bt = 0.0;
      const double end = policy.end_min + (policy.end_max - policy.end_min) * unit(rng);
      fn.et = std::min(pt, end * scale);
    } else {
      const double start = policy.start_span * unit(rng) * scale;
      const double width = (policy.width_min + (policy.width_max - policy.width_min) * unit(rng)) * scale;
      fn.bt = std::min(pt, start);
      fn.et = std::min(pt, fn.bt + width);
    }
    inst.arcs[2 * t].cost_fn = fn;
    inst.arcs[2 * t + 1].cost_fn = fn;
  }
  finalize_instance(inst);
  return inst;
}

}  // namespace tdcarp
