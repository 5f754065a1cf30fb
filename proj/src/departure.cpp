#include "tdcarp/departure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tdcarp {

RouteCostFunction::RouteCostFunction(const Instance& inst, const ShortestPathMatrix& sp, std::vector<Visit> visits)
    : inst_(&inst), sp_(&sp), visits_(std::move(visits)) {
  hi_ = inst.planning_horizon - return_time(0.0);
}

double RouteCostFunction::operator()(double departure) const {
  RouteCursor cur;
  cur.time = departure;
  for (Visit v : visits_) advance(*inst_, *sp_, cur, v);
  return closing_cost(*sp_, cur);
}

double RouteCostFunction::return_time(double departure) const {
  RouteCursor cur;
  cur.time = departure;
  for (Visit v : visits_) advance(*inst_, *sp_, cur, v);
  return tdcarp::return_time(*sp_, cur);
}

RouteCostFunction route_cost_of_t(const Instance& inst, const ShortestPathMatrix& sp, const Route& route) {
  return RouteCostFunction(inst, sp, route.visits);
}

double gss(const UnivariateFn& f, double lo, double hi, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("gss tolerance must be positive");
  if (hi <= lo) return lo;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else if (fc > fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    } else {
      a = c;
      b = d;
      c = b - inv_phi * (b - a);
      d = a + inv_phi * (b - a);
      fc = f(c);
      fd = f(d);
    }
  }
  return (a + b) / 2.0;
}

namespace {

double bhattacharyya(double mu1, double s1, double mu2, double s2) {
  const double v = s1 * s1 + s2 * s2;
  return 0.25 * (mu1 - mu2) * (mu1 - mu2) / v + 0.5 * std::log(v / (2.0 * s1 * s2));
}

}  // namespace

double ncs(const UnivariateFn& f, double lo, double hi, const NcsParams& p, Rng& rng) {
  if (p.pop_n < 2) throw std::invalid_argument("ncs needs at least two processes");
  if (p.budget < p.pop_n) throw std::invalid_argument("ncs budget must cover the initial population");
  if (p.epoch < 1) throw std::invalid_argument("ncs epoch must be positive");
  if (hi <= lo) return lo;

  const double width = hi - lo;
  const double sigma0 = p.sigma0 > 0.0 ? p.sigma0 : width / 10.0;
  const double sigma_floor = width * 1e-9;
  std::uniform_real_distribution<double> uniform(lo, hi);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto clamp = [&](double x) {
    // Reflect once, then clamp.
    if (x < lo) x = lo + (lo - x);
    if (x > hi) x = hi - (x - hi);
    return std::clamp(x, lo, hi);
  };

  const int n = p.pop_n;
  std::vector<double> x(n), fx(n), sigma(n, sigma0);
  std::vector<int> wins(n, 0);
  int used = 0;
  double best_x = lo;
  double best_f = kInfinity;
  auto eval = [&](double t) {
    const double v = f(t);
    ++used;
    if (v < best_f) {
      best_f = v;
      best_x = t;
    }
    return v;
  };
  for (int i = 0; i < n; ++i) {
    x[i] = i == 0 ? lo : uniform(rng);
    fx[i] = eval(x[i]);
  }

  const int iterations = (p.budget - n) / n;
  auto corr = [&](int self, double mu, double s) {
    double d = kInfinity;
    for (int j = 0; j < n; ++j) {
      if (j != self) d = std::min(d, bhattacharyya(mu, s, x[j], sigma[j]));
    }
    return d;
  };

  for (int it = 0; it < iterations; ++it) {
    const double spread = 0.1 - 0.1 * static_cast<double>(it) / std::max(1, iterations);
    const double threshold = p.diversity_tradeoff + spread * gauss(rng);
    std::vector<double> child(n), fchild(n);
    for (int i = 0; i < n; ++i) {
      child[i] = clamp(x[i] + sigma[i] * gauss(rng));
      fchild[i] = eval(child[i]);
    }
    for (int i = 0; i < n; ++i) {
      if (fchild[i] < fx[i]) {
        x[i] = child[i];
        fx[i] = fchild[i];
        ++wins[i];
        continue;
      }
      // Costs shifted by the best seen so that their ratio is meaningful.
      const double shift = best_f - 1e-12;
      const double f_parent = fx[i] - shift;
      const double f_child = fchild[i] - shift;
      const double c_parent = corr(i, x[i], sigma[i]);
      const double c_child = corr(i, child[i], sigma[i]);
      const double cost_ratio = f_child / (f_parent + f_child);
      const double corr_sum = c_parent + c_child;
      const double corr_ratio = corr_sum > 0.0 && std::isfinite(corr_sum) ? c_child / corr_sum : 0.5;
      if (corr_ratio > 0.0 && cost_ratio / corr_ratio < threshold) {
        x[i] = child[i];
        fx[i] = fchild[i];
      }
    }
    if ((it + 1) % p.epoch == 0) {
      for (int i = 0; i < n; ++i) {
        const double rate = static_cast<double>(wins[i]) / p.epoch;
        if (rate > 0.2) {
          sigma[i] /= p.step_factor;
        } else if (rate < 0.2) {
          sigma[i] *= p.step_factor;
        }
        sigma[i] = std::clamp(sigma[i], sigma_floor, width);
        wins[i] = 0;
      }
    }
  }
  return best_x;
}

const char* to_string(DepartureMethod method) {
  switch (method) {
    case DepartureMethod::Zero: return "zero";
    case DepartureMethod::Gss: return "gss";
    case DepartureMethod::Ncs: return "ncs";
  }
  return "?";
}

DepartureResult stage2(const Instance& inst, const ShortestPathMatrix& sp, const Solution& sol,
                       const DepartureOptions& options) {
  DepartureResult out;
  if (inst.instance_type == InstanceType::TwoSegment) {
    out.method = DepartureMethod::Zero;
  } else {
    out.method = inst.global_slope_abs <= 1.0 ? DepartureMethod::Gss : DepartureMethod::Ncs;
  }
  const double tol = options.gss_tol > 0.0 ? options.gss_tol : inst.planning_horizon * 1e-6;

  for (std::size_t r = 0; r < sol.routes.size(); ++r) {
    const RouteCostFunction cost = route_cost_of_t(inst, sp, sol.routes[r]);
    double t = 0.0;
    if (out.method != DepartureMethod::Zero && cost.feasible() && cost.hi() > 0.0) {
      // Departures that miss the horizon are never preferred.
      auto f = [&](double d) {
        return cost.return_time(d) > inst.planning_horizon ? kInfinity : cost(d);
      };
      if (out.method == DepartureMethod::Gss) {
        t = gss(f, 0.0, cost.hi(), tol);
      } else {
        Rng rng(options.seed + r);
        t = ncs(f, 0.0, cost.hi(), options.ncs, rng);
      }
      if (!(f(t) < f(0.0))) t = 0.0;
    }
    out.times.push_back(t);
    out.per_route_cost.push_back(cost(t));
    out.total += out.per_route_cost.back();
  }
  return out;
}

Solution with_departures(Solution sol, const DepartureResult& dep) {
  for (std::size_t r = 0; r < sol.routes.size() && r < dep.times.size(); ++r) sol.routes[r].departure = dep.times[r];
  return sol;
}

}  // namespace tdcarp
