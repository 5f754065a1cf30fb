#include "tdcarp/localsearch.hpp"

#include <chrono>
#include <cmath>

namespace tdcarp {

SearchCounters& SearchCounters::operator+=(const SearchCounters& o) {
  moves_enumerated += o.moves_enumerated;
  pruned_by_criterion1 += o.pruned_by_criterion1;
  criterion2_evaluations += o.criterion2_evaluations;
  full_route_evaluations += o.full_route_evaluations;
  tasks_recomputed += o.tasks_recomputed;
  improvements += o.improvements;
  return *this;
}

OperatorStats& OperatorStats::operator+=(const OperatorStats& o) {
  for (int k = 0; k < 3; ++k) {
    counters[k] += o.counters[k];
    seconds[k] += o.seconds[k];
  }
  return *this;
}

const char* to_string(OperatorMode mode) {
  return mode == OperatorMode::KnowledgeGuided ? "kg" : "traditional";
}

namespace {

template <typename Fn>
void visit_moves(const Instance& inst, const Solution& sol, MoveKind kind, Fn&& fn) {
  const int n_routes = static_cast<int>(sol.routes.size());
  Move m;
  m.kind = kind;
  if (kind == MoveKind::Swap) {
    for (int r = 0; r < n_routes; ++r) {
      const auto& ra = sol.routes[r].visits;
      for (int i = 0; i < static_cast<int>(ra.size()); ++i) {
        const Visit a = ra[i];
        const bool flip_a = inst.can_reverse(a.task);
        for (int r2 = r; r2 < n_routes; ++r2) {
          const auto& rb = sol.routes[r2].visits;
          for (int j = (r2 == r ? i + 1 : 0); j < static_cast<int>(rb.size()); ++j) {
            const Visit b = rb[j];
            m.src_route = r;
            m.src_pos = i;
            m.dst_route = r2;
            m.dst_pos = j;
            m.rev_a = a.reversed;
            m.rev_b = b.reversed;
            const bool lone_pair = r2 != r && ra.size() == 1 && rb.size() == 1 &&
                                   sol.routes[r].departure == sol.routes[r2].departure;
            if (!lone_pair) fn(m);
            const bool flip_b = inst.can_reverse(b.task);
            if (flip_a || flip_b) {
              m.rev_a = flip_a ? !a.reversed : a.reversed;
              m.rev_b = flip_b ? !b.reversed : b.reversed;
              fn(m);
            }
          }
        }
      }
    }
    return;
  }

  const int width = kind == MoveKind::DoubleInsertion ? 2 : 1;
  for (int r = 0; r < n_routes; ++r) {
    const auto& src = sol.routes[r].visits;
    const int len = static_cast<int>(src.size());
    for (int i = 0; i + width <= len; ++i) {
      const Visit a = src[i];
      const Visit b = width == 2 ? src[i + 1] : Visit{};
      const int a_variants = inst.can_reverse(a.task) ? 2 : 1;
      const int b_variants = width == 2 && inst.can_reverse(b.task) ? 2 : 1;
      for (int va = 0; va < a_variants; ++va) {
        for (int vb = 0; vb < b_variants; ++vb) {
          const bool same = va == 0 && vb == 0;
          m.src_route = r;
          m.src_pos = i;
          m.rev_a = va ? !a.reversed : a.reversed;
          m.rev_b = width == 2 ? (vb ? !b.reversed : b.reversed) : false;
          for (int r2 = 0; r2 < n_routes; ++r2) {
            const int dst_len = r2 == r ? len - width : static_cast<int>(sol.routes[r2].visits.size());
            for (int q = 0; q <= dst_len; ++q) {
              if (r2 == r && q == i && same) continue;
              m.dst_route = r2;
              m.dst_pos = q;
              fn(m);
            }
          }
          if (!(len == width && same)) {
            m.dst_route = kNewRoute;
            m.dst_pos = 0;
            fn(m);
          }
        }
      }
    }
  }
}

/// Begin time of `v` when served right after the vehicle state `cur`.
double begin_after(const Instance& inst, const ShortestPathMatrix& sp, const RouteCursor& cur, Visit v) {
  return cur.time + sp.time(cur.vertex, inst.served_arc(v).tail);
}

double gap_of(const Instance& inst, Visit v, double begin) {
  return time_gap(*inst.served_arc(v).cost_fn, begin);
}

}  // namespace

void for_each_move(const Instance& inst, const Solution& sol, MoveKind kind,
                   const std::function<void(const Move&)>& fn) {
  visit_moves(inst, sol, kind, fn);
}

std::vector<Move> enumerate_moves(const Instance& inst, const Solution& sol, MoveKind kind) {
  std::vector<Move> out;
  visit_moves(inst, sol, kind, [&](const Move& m) { out.push_back(m); });
  return out;
}

Solution apply_move(const Instance& inst, const Solution& sol, const Move& move) {
  RouteChange changes[2];
  const int n = describe_changes(sol, move, changes);
  Solution out = sol;
  for (int c = 0; c < n; ++c) {
    for (Visit v : changes[c].tail) {
      if (v.reversed && !inst.can_reverse(v.task)) {
        throw InvalidRouteError("task " + std::to_string(v.task + 1) + " has no inverse arc to serve reversed");
      }
    }
    if (changes[c].route == kNewRoute) {
      out.routes.push_back(Route{changes[c].tail, 0.0});
    } else {
      auto& visits = out.routes[changes[c].route].visits;
      visits.resize(changes[c].from);
      visits.insert(visits.end(), changes[c].tail.begin(), changes[c].tail.end());
    }
  }
  out.drop_empty_routes();
  return out;
}

GapChange relevant_gaps(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol,
                        const SolutionState& state, const Move& m) {
  GapChange g;
  const auto& src = sol.routes[m.src_route].visits;
  const RouteState& src_state = state.routes[m.src_route];

  if (m.kind == MoveKind::Swap) {
    const auto& dst = sol.routes[m.dst_route].visits;
    const RouteState& dst_state = state.routes[m.dst_route];
    const Visit a{src[m.src_pos].task, m.rev_a};
    const Visit b{dst[m.dst_pos].task, m.rev_b};
    g.before = src_state.gaps[m.src_pos] + dst_state.gaps[m.dst_pos];
    if (m.src_route != m.dst_route) {
      g.after = gap_of(inst, b, begin_after(inst, sp, src_state.states[m.src_pos], b)) +
                gap_of(inst, a, begin_after(inst, sp, dst_state.states[m.dst_pos], a));
      return g;
    }
    const int lo = std::min(m.src_pos, m.dst_pos);
    const int hi = std::max(m.src_pos, m.dst_pos);
    const Visit first = m.src_pos == lo ? b : a;
    const Visit second = m.src_pos == lo ? a : b;
    RouteCursor cur = src_state.states[lo];
    g.after = gap_of(inst, first, advance(inst, sp, cur, first));
    for (int k = lo + 1; k < hi; ++k) advance(inst, sp, cur, src[k]);
    g.after += gap_of(inst, second, begin_after(inst, sp, cur, second));
    return g;
  }

  const int width = m.kind == MoveKind::DoubleInsertion ? 2 : 1;
  Visit moved[2] = {Visit{src[m.src_pos].task, m.rev_a}, {}};
  g.before = src_state.gaps[m.src_pos];
  if (width == 2) {
    moved[1] = Visit{src[m.src_pos + 1].task, m.rev_b};
    g.before += src_state.gaps[m.src_pos + 1];
  }
  RouteCursor cur;
  if (m.dst_route == kNewRoute) {
    cur = RouteCursor{};
  } else if (m.dst_route != m.src_route) {
    cur = state.routes[m.dst_route].states[m.dst_pos];
  } else if (m.dst_pos <= m.src_pos) {
    cur = src_state.states[m.dst_pos];
  } else {
    // Post-removal positions [src_pos, dst_pos) are original ones shifted by width.
    cur = src_state.states[m.src_pos];
    for (int k = m.src_pos + width; k < m.dst_pos + width; ++k) advance(inst, sp, cur, src[k]);
  }
  g.after = gap_of(inst, moved[0], advance(inst, sp, cur, moved[0]));
  if (width == 2) g.after += gap_of(inst, moved[1], begin_after(inst, sp, cur, moved[1]));
  return g;
}

bool criterion1_failed(const GapChange& gaps, double lambda) {
  if (std::isinf(lambda)) return false;
  return gaps.after - lambda * gaps.before > 0.0;
}

bool criterion1_failed(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol,
                       const SolutionState& state, const Move& move, double lambda) {
  if (std::isinf(lambda)) return false;
  return criterion1_failed(relevant_gaps(inst, sp, sol, state, move), lambda);
}

Criterion2Result criterion2_successful(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol,
                                       const SolutionState& state, const Move& move) {
  Criterion2Result out;
  if (move.kind == MoveKind::Swap && move.src_route == move.dst_route && move.src_pos == move.dst_pos) return out;
  out.delta = delta_evaluate(inst, sp, sol, state, move);
  out.successful = out.delta.admissible && out.delta.total() < -kImprovementEps;
  return out;
}

OperatorResult kg_operator(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol, MoveKind kind,
                           double lambda, SearchCounters& counters) {
  const SolutionState state = build_solution_state(inst, sp, sol);
  const bool pruning = !std::isinf(lambda);
  OperatorResult best;
  visit_moves(inst, sol, kind, [&](const Move& m) {
    ++counters.moves_enumerated;
    if (pruning && criterion1_failed(relevant_gaps(inst, sp, sol, state, m), lambda)) {
      ++counters.pruned_by_criterion1;
      return;
    }
    ++counters.criterion2_evaluations;
    const Criterion2Result c2 = criterion2_successful(inst, sp, sol, state, m);
    counters.tasks_recomputed += c2.delta.recomputed;
    if (c2.successful && c2.delta.total() < best.delta) {
      best.delta = c2.delta.total();
      best.move = m;
      best.improved = true;
    }
  });
  if (best.improved) {
    ++counters.improvements;
    best.solution = apply_move(inst, sol, best.move);
  } else {
    best.solution = sol;
  }
  return best;
}

namespace {

struct FullRouteEval {
  double cost = 0.0;
  double excess = 0.0;
  double late = 0.0;
};

FullRouteEval full_route_eval(const Instance& inst, const ShortestPathMatrix& sp, const std::vector<Visit>& visits,
                              double departure) {
  RouteCursor cur;
  cur.time = departure;
  for (Visit v : visits) advance(inst, sp, cur, v);
  return {closing_cost(sp, cur), capacity_excess(inst, cur.load),
          horizon_lateness(inst, departure, return_time(sp, cur))};
}

}  // namespace

OperatorResult traditional_operator(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol,
                                    MoveKind kind, SearchCounters& counters) {
  std::vector<FullRouteEval> old(sol.routes.size());
  for (std::size_t r = 0; r < sol.routes.size(); ++r) {
    old[r] = full_route_eval(inst, sp, sol.routes[r].visits, sol.routes[r].departure);
  }
  OperatorResult best;
  std::vector<Visit> rebuilt;
  visit_moves(inst, sol, kind, [&](const Move& m) {
    ++counters.moves_enumerated;
    ++counters.full_route_evaluations;
    RouteChange changes[2];
    const int n = describe_changes(sol, m, changes);
    double delta = 0.0;
    bool admissible = true;
    for (int c = 0; c < n; ++c) {
      const RouteChange& ch = changes[c];
      double departure = 0.0;
      FullRouteEval before;
      rebuilt.clear();
      if (ch.route != kNewRoute) {
        const Route& route = sol.routes[ch.route];
        departure = route.departure;
        before = old[ch.route];
        rebuilt.assign(route.visits.begin(), route.visits.begin() + ch.from);
      }
      rebuilt.insert(rebuilt.end(), ch.tail.begin(), ch.tail.end());
      const FullRouteEval after = full_route_eval(inst, sp, rebuilt, departure);
      counters.tasks_recomputed += rebuilt.size();
      delta += after.cost - before.cost;
      admissible = admissible && after.excess <= before.excess && after.late <= before.late;
    }
    if (admissible && delta < -kImprovementEps && delta < best.delta) {
      best.delta = delta;
      best.move = m;
      best.improved = true;
    }
  });
  if (best.improved) {
    ++counters.improvements;
    best.solution = apply_move(inst, sol, best.move);
  } else {
    best.solution = sol;
  }
  return best;
}

OperatorResult kgslss(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol, double lambda,
                      OperatorStats& stats, OperatorMode mode) {
  OperatorResult best;
  bool have = false;
  for (MoveKind kind : {MoveKind::SingleInsertion, MoveKind::DoubleInsertion, MoveKind::Swap}) {
    const auto start = std::chrono::steady_clock::now();
    OperatorResult r = mode == OperatorMode::KnowledgeGuided
                           ? kg_operator(inst, sp, sol, kind, lambda, stats[kind])
                           : traditional_operator(inst, sp, sol, kind, stats[kind]);
    stats.seconds[static_cast<int>(kind)] +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!have || r.delta < best.delta) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

}  // namespace tdcarp
