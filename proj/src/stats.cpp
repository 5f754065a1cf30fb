#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tdcarp/harness.hpp"

namespace tdcarp {

double pdr(double c1, double c2) {
  if (!(c2 > 0.0)) throw std::invalid_argument("reference cost must be positive");
  return (c1 - c2) / c2 * 100.0;
}

const char* to_string(Comparison c) {
  switch (c) {
    case Comparison::Better: return "better";
    case Comparison::Equivalent: return "equivalent";
    case Comparison::Worse: return "worse";
  }
  return "?";
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

RankSumResult rank_sum_test(const std::vector<double>& a, const std::vector<double>& b, double alpha) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("rank-sum test needs at least two values per sample");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double n = na + nb;

  std::vector<std::pair<double, int>> pooled;
  for (double x : a) pooled.emplace_back(x, 0);
  for (double x : b) pooled.emplace_back(x, 1);
  std::sort(pooled.begin(), pooled.end());

  double rank_a = 0.0;
  double tie_term = 0.0;
  for (std::size_t i = 0; i < pooled.size();) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].first == pooled[i].first) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k) {
      if (pooled[k].second == 0) rank_a += avg_rank;
    }
    i = j;
  }

  RankSumResult out;
  out.u_a = rank_a - na * (na + 1.0) / 2.0;
  out.u_b = na * nb - out.u_a;
  const double mu = na * nb / 2.0;
  const double var = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0.0) return out;
  out.z = (out.u_a - mu) / std::sqrt(var);
  out.p_value = std::erfc(std::abs(out.z) / std::sqrt(2.0));
  if (out.p_value < alpha) {
    const double ma = median(a);
    const double mb = median(b);
    if (ma != mb) {
      out.outcome = ma < mb ? Comparison::Better : Comparison::Worse;
    } else {
      out.outcome = out.u_a < mu ? Comparison::Better : Comparison::Worse;
    }
  }
  return out;
}

}  // namespace tdcarp
