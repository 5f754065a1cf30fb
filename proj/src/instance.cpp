#include "tdcarp/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <queue>
#include <sstream>
#include <utility>

namespace tdcarp {

const char* to_string(InstanceType type) {
  return type == InstanceType::TwoSegment ? "2LP" : "3LP";
}

const char* to_string(ServiceDuration mode) {
  return mode == ServiceDuration::Static ? "static" : "cost-coupled";
}

double time_gap(const ServiceCostFunction& fn, double t) {
  if (t < fn.bt) return fn.bt - t;
  if (t > fn.et) return t - fn.et;
  return 0.0;
}

double eval_service_cost(const ServiceCostFunction& fn, double t) {
  return fn.min_sc + time_gap(fn, t) * fn.slope_abs;
}

double Instance::total_demand() const {
  double total = 0.0;
  for (ArcId a : tasks) total += arcs[a].demand;
  return total;
}

ParseError::ParseError(int line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::string format_real(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("cannot format real");
  return std::string(buf, end);
}

namespace {

bool same_service(const Arc& a, const Arc& b) {
  return a.demand == b.demand && a.service_time == b.service_time && a.cost_fn == b.cost_fn;
}

}  // namespace

void finalize_instance(Instance& inst) {
  inst.tasks.clear();
  for (std::size_t i = 0; i < inst.arcs.size(); ++i) {
    inst.arcs[i].id = static_cast<ArcId>(i);
    inst.arcs[i].inverse_id.reset();
  }
  std::vector<bool> paired(inst.arcs.size(), false);
  for (std::size_t i = 0; i < inst.arcs.size(); ++i) {
    Arc& arc = inst.arcs[i];
    if (!arc.required || paired[i]) continue;
    paired[i] = true;
    for (std::size_t j = i + 1; j < inst.arcs.size(); ++j) {
      Arc& other = inst.arcs[j];
      if (!other.required || paired[j] || other.tail != arc.head || other.head != arc.tail) continue;
      if (!same_service(arc, other)) {
        throw InstanceError("required arcs " + std::to_string(i) + " and " + std::to_string(j) +
                            " are opposite directions with different service data");
      }
      paired[j] = true;
      arc.inverse_id = other.id;
      other.inverse_id = arc.id;
      break;
    }
    inst.tasks.push_back(arc.id);
  }
  validate_instance(inst);
}

void validate_instance(const Instance& inst) {
  auto fail = [](const std::string& msg) { throw InstanceError(msg); };
  if (inst.n_vertices < 1) fail("instance has no vertices");
  if (!(inst.capacity > 0.0)) fail("capacity must be positive");
  if (!(inst.planning_horizon > 0.0)) fail("planning horizon must be positive");
  if (inst.global_slope_abs < 0.0) fail("slope must be nonnegative");
  if (inst.fleet_bound && *inst.fleet_bound < 1) fail("fleet bound must be positive");
  for (const Arc& arc : inst.arcs) {
    const std::string where = "arc " + std::to_string(arc.id);
    if (arc.tail < 0 || arc.tail >= inst.n_vertices || arc.head < 0 || arc.head >= inst.n_vertices) {
      fail(where + " references an unknown vertex");
    }
    if (arc.tail == arc.head) fail(where + " is a loop");
    if (arc.length < 0 || arc.travel_time < 0 || arc.travel_cost < 0) {
      fail(where + " has a negative length, time or cost");
    }
    if (!arc.required) {
      if (arc.demand != 0.0 || arc.service_time != 0.0 || arc.cost_fn) {
        fail(where + " is a travel arc carrying service data");
      }
      continue;
    }
    if (!(arc.demand > 0.0)) fail(where + " is required but has no demand");
    if (arc.service_time < 0.0) fail(where + " has negative service time");
    if (!arc.cost_fn) fail(where + " is required but has no cost function");
    const ServiceCostFunction& fn = *arc.cost_fn;
    if (fn.bt > fn.et) fail(where + ": interval inverted");
    if (fn.bt < 0.0 || fn.et > inst.planning_horizon) fail(where + ": interval outside the horizon");
    if (fn.min_sc < 0.0) fail(where + ": negative minimum service cost");
    if (fn.kind != inst.instance_type) fail(where + ": cost function kind differs from instance type");
    if (fn.kind == InstanceType::TwoSegment && fn.bt != 0.0) {
      fail(where + ": two-segment function must start its interval at 0");
    }
    if (fn.slope_abs != inst.global_slope_abs) fail(where + ": slope differs from instance slope");
    if (arc.inverse_id) {
      const ArcId inv = *arc.inverse_id;
      if (inv < 0 || inv >= static_cast<ArcId>(inst.arcs.size()) ||
          inst.arcs[inv].inverse_id != arc.id) {
        fail(where + ": inverse is not symmetric");
      }
    }
  }
  for (ArcId a : inst.tasks) {
    if (a < 0 || a >= static_cast<ArcId>(inst.arcs.size()) || !inst.arcs[a].required) {
      fail("task list references a non-required arc");
    }
  }
}

// ---------------------------------------------------------------------------

namespace {

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

double parse_real(const std::string& tok, int line) {
  double value = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ParseError(line, "expected a real number, got '" + tok + "'");
  }
  return value;
}

int parse_int(const std::string& tok, int line) {
  int value = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw ParseError(line, "expected an integer, got '" + tok + "'");
  return value;
}

}  // namespace

Instance parse_instance(std::istream& in) {
  Instance inst;
  bool seen_vertices = false, seen_capacity = false, seen_horizon = false;
  bool seen_type = false, seen_slope = false, in_arcs = false, ended = false;
  std::vector<int> arc_lines;
  int line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const std::string line = strip_comment(raw);
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (ended) throw ParseError(line_no, "content after END");
    if (in_arcs) {
      if (tokens[0] == "END") {
        if (tokens.size() != 1) throw ParseError(line_no, "malformed END");
        ended = true;
        continue;
      }
      if (tokens.size() != 5 && tokens.size() != 11) {
        throw ParseError(line_no, "arc line needs 5 fields or 5 fields plus a REQ block");
      }
      Arc arc;
      arc.id = static_cast<ArcId>(inst.arcs.size());
      arc.tail = parse_int(tokens[0], line_no);
      arc.head = parse_int(tokens[1], line_no);
      if (arc.tail < 0 || arc.tail >= inst.n_vertices || arc.head < 0 || arc.head >= inst.n_vertices) {
        throw ParseError(line_no, "arc references unknown vertex");
      }
      if (arc.tail == arc.head) throw ParseError(line_no, "arc is a loop");
      arc.length = parse_real(tokens[2], line_no);
      arc.travel_time = parse_real(tokens[3], line_no);
      arc.travel_cost = parse_real(tokens[4], line_no);
      if (tokens.size() == 11) {
        if (tokens[5] != "REQ") throw ParseError(line_no, "expected REQ, got '" + tokens[5] + "'");
        arc.required = true;
        arc.demand = parse_real(tokens[6], line_no);
        arc.service_time = parse_real(tokens[7], line_no);
        ServiceCostFunction fn;
        fn.kind = inst.instance_type;
        fn.min_sc = parse_real(tokens[8], line_no);
        fn.bt = parse_real(tokens[9], line_no);
        fn.et = parse_real(tokens[10], line_no);
        fn.slope_abs = inst.global_slope_abs;
        if (fn.et < fn.bt) throw ParseError(line_no, "interval inverted");
        if (!(arc.demand > 0.0)) throw ParseError(line_no, "required arc needs positive demand");
        arc.cost_fn = fn;
      }
      inst.arcs.push_back(arc);
      arc_lines.push_back(line_no);
      continue;
    }
    const std::string& key = tokens[0];
    auto single = [&](const char* what) -> const std::string& {
      if (tokens.size() != 2) throw ParseError(line_no, std::string("malformed header ") + what);
      return tokens[1];
    };
    if (key == "NAME") {
      const auto pos = line.find("NAME");
      std::string rest = line.substr(pos + 4);
      rest.erase(0, rest.find_first_not_of(" \t"));
      rest.erase(rest.find_last_not_of(" \t\r") + 1);
      inst.name = rest;
    } else if (key == "VERTICES") {
      inst.n_vertices = parse_int(single("VERTICES"), line_no);
      if (inst.n_vertices < 1) throw ParseError(line_no, "VERTICES must be positive");
      seen_vertices = true;
    } else if (key == "CAPACITY") {
      inst.capacity = parse_real(single("CAPACITY"), line_no);
      seen_capacity = true;
    } else if (key == "HORIZON") {
      inst.planning_horizon = parse_real(single("HORIZON"), line_no);
      seen_horizon = true;
    } else if (key == "TYPE") {
      const std::string& v = single("TYPE");
      if (v == "2LP") {
        inst.instance_type = InstanceType::TwoSegment;
      } else if (v == "3LP") {
        inst.instance_type = InstanceType::ThreeSegment;
      } else {
        throw ParseError(line_no, "TYPE must be 2LP or 3LP");
      }
      seen_type = true;
    } else if (key == "SLOPE") {
      inst.global_slope_abs = parse_real(single("SLOPE"), line_no);
      if (inst.global_slope_abs < 0) throw ParseError(line_no, "SLOPE must be nonnegative");
      seen_slope = true;
    } else if (key == "FLEET") {
      inst.fleet_bound = parse_int(single("FLEET"), line_no);
    } else if (key == "DURATION") {
      const std::string& v = single("DURATION");
      if (v == "static") {
        inst.service_duration = ServiceDuration::Static;
      } else if (v == "cost-coupled") {
        inst.service_duration = ServiceDuration::CostCoupled;
      } else {
        throw ParseError(line_no, "DURATION must be static or cost-coupled");
      }
    } else if (key == "ARCS") {
      if (tokens.size() != 1) throw ParseError(line_no, "malformed ARCS");
      if (!(seen_vertices && seen_capacity && seen_horizon && seen_type && seen_slope)) {
        throw ParseError(line_no, "malformed header: VERTICES, CAPACITY, HORIZON, TYPE and SLOPE must precede ARCS");
      }
      in_arcs = true;
    } else {
      throw ParseError(line_no, "unknown field '" + key + "'");
    }
  }
  if (!ended) throw ParseError(line_no, "missing END");
  try {
    finalize_instance(inst);
  } catch (const InstanceError& e) {
    // Attribute arc-level failures to the arc's source line where possible.
    const std::string msg = e.what();
    if (msg.rfind("arc ", 0) == 0) {
      const int id = std::atoi(msg.c_str() + 4);
      if (id >= 0 && id < static_cast<int>(arc_lines.size())) throw ParseError(arc_lines[id], msg);
    }
    throw ParseError(line_no, msg);
  }
  return inst;
}

Instance parse_instance_string(const std::string& text) {
  std::istringstream in(text);
  return parse_instance(in);
}

Instance parse_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file " + path);
  return parse_instance(in);
}

void write_instance(std::ostream& out, const Instance& inst) {
  out << "NAME " << inst.name << '\n';
  out << "VERTICES " << inst.n_vertices << '\n';
  out << "CAPACITY " << format_real(inst.capacity) << '\n';
  out << "HORIZON " << format_real(inst.planning_horizon) << '\n';
  out << "TYPE " << to_string(inst.instance_type) << '\n';
  out << "SLOPE " << format_real(inst.global_slope_abs) << '\n';
  if (inst.fleet_bound) out << "FLEET " << *inst.fleet_bound << '\n';
  if (inst.service_duration != ServiceDuration::Static) {
    out << "DURATION " << to_string(inst.service_duration) << '\n';
  }
  out << "ARCS\n";
  for (const Arc& arc : inst.arcs) {
    out << arc.tail << ' ' << arc.head << ' ' << format_real(arc.length) << ' '
        << format_real(arc.travel_time) << ' ' << format_real(arc.travel_cost);
    if (arc.required) {
      const ServiceCostFunction& fn = *arc.cost_fn;
      out << " REQ " << format_real(arc.demand) << ' ' << format_real(arc.service_time) << ' '
          << format_real(fn.min_sc) << ' ' << format_real(fn.bt) << ' ' << format_real(fn.et);
    }
    out << '\n';
  }
  out << "END\n";
}

std::string write_instance_string(const Instance& inst) {
  std::ostringstream out;
  write_instance(out, inst);
  return out.str();
}

// ---------------------------------------------------------------------------

ShortestPathMatrix::ShortestPathMatrix(int n)
    : n_(n),
      cost_(static_cast<std::size_t>(n) * n, kInfinity),
      time_(static_cast<std::size_t>(n) * n, kInfinity),
      pred_(static_cast<std::size_t>(n) * n, -1) {
  for (int v = 0; v < n; ++v) set(v, v, 0.0, 0.0, -1);
}

std::vector<VertexId> ShortestPathMatrix::path(const std::vector<Arc>& arcs, VertexId from,
                                               VertexId to) const {
  std::vector<VertexId> out;
  if (cost(from, to) == kInfinity) return out;
  VertexId v = to;
  out.push_back(v);
  while (v != from) {
    const ArcId a = predecessor(from, v);
    v = arcs[a].tail;
    out.push_back(v);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

namespace {

void dijkstra(const Instance& inst, const std::vector<std::vector<ArcId>>& out_arcs, VertexId source,
              bool by_time, std::vector<double>& dist, std::vector<ArcId>& pred) {
  dist.assign(inst.n_vertices, kInfinity);
  pred.assign(inst.n_vertices, -1);
  using Entry = std::pair<double, VertexId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (ArcId a : out_arcs[v]) {
      const Arc& arc = inst.arcs[a];
      const double nd = d + (by_time ? arc.travel_time : arc.travel_cost);
      if (nd < dist[arc.head]) {
        dist[arc.head] = nd;
        pred[arc.head] = a;
        heap.emplace(nd, arc.head);
      }
    }
  }
}

}  // namespace

ShortestPathMatrix all_pairs_shortest_paths(const Instance& inst) {
  const int n = inst.n_vertices;
  std::vector<std::vector<ArcId>> out_arcs(n);
  for (const Arc& arc : inst.arcs) out_arcs[arc.tail].push_back(arc.id);

  ShortestPathMatrix sp(n);
  std::vector<double> cost, time;
  std::vector<ArcId> pred, unused;
  for (VertexId s = 0; s < n; ++s) {
    dijkstra(inst, out_arcs, s, false, cost, pred);
    dijkstra(inst, out_arcs, s, true, time, unused);
    for (VertexId t = 0; t < n; ++t) sp.set(s, t, cost[t], time[t], pred[t]);
  }

  std::vector<VertexId> endpoints{kDepot};
  for (ArcId a : inst.tasks) {
    const Arc& arc = inst.arcs[a];
    endpoints.push_back(arc.tail);
    endpoints.push_back(arc.head);
  }
  std::sort(endpoints.begin(), endpoints.end());
  endpoints.erase(std::unique(endpoints.begin(), endpoints.end()), endpoints.end());
  for (VertexId u : endpoints) {
    for (VertexId v : endpoints) {
      if (sp.cost(u, v) == kInfinity || sp.time(u, v) == kInfinity) {
        throw InstanceError("vertex " + std::to_string(v) + " is unreachable from vertex " +
                            std::to_string(u));
      }
    }
  }
  return sp;
}

}  // namespace tdcarp
