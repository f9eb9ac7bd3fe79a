#include "corrnet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "corrnet/errors.hpp"

namespace corrnet::stats {

double mean(std::span<const double> x) {
  if (x.empty()) throw ArgumentError("mean of an empty series");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

namespace {

// Constant series are detected exactly; the mean of equal values can carry
// rounding error that would otherwise leak into the deviations.
bool is_constant(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

}  // namespace

double sample_sd(std::span<const double> x) {
  if (x.size() < 2) throw ArgumentError("sample standard deviation needs at least 2 values");
  if (is_constant(x)) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("pearson: series lengths differ");
  if (x.size() < 2) throw ArgumentError("pearson: need at least 2 observations");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (is_constant(x) || is_constant(y) || sxx == 0.0 || syy == 0.0) {
    throw UndefinedStatisticError("pearson: zero variance in a series");
  }
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ArgumentError("mann_whitney_u: empty sample");
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  const std::size_t n = n1 + n2;

  struct Obs {
    double value;
    bool first;
  };
  std::vector<Obs> pooled;
  pooled.reserve(n);
  for (double v : a) pooled.push_back({v, true});
  for (double v : b) pooled.push_back({v, false});
  std::sort(pooled.begin(), pooled.end(),
            [](const Obs& l, const Obs& r) { return l.value < r.value; });

  double rank_sum_a = 0.0;
  double tie_term = 0.0;  // sum of t^3 - t over tie groups
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && pooled[j].value == pooled[i].value) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (pooled[k].first) rank_sum_a += midrank;
    }
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }

  const double dn1 = static_cast<double>(n1);
  const double dn2 = static_cast<double>(n2);
  const double dn = static_cast<double>(n);

  MwuResult result;
  result.n1 = n1;
  result.n2 = n2;
  result.u_statistic = rank_sum_a - dn1 * (dn1 + 1.0) / 2.0;

  const double mu = dn1 * dn2 / 2.0;
  double variance = dn1 * dn2 / 12.0 * (dn + 1.0);
  if (n > 1) variance -= dn1 * dn2 * tie_term / (12.0 * dn * (dn - 1.0));
  if (variance <= 0.0) {
    result.p_value = 1.0;
    return result;
  }
  const double z = std::max(0.0, std::abs(result.u_statistic - mu) - 0.5) / std::sqrt(variance);
  result.p_value = std::clamp(std::erfc(z / std::sqrt(2.0)), 0.0, 1.0);
  return result;
}

double quantile(std::span<const double> x, double q) {
  if (x.empty()) throw ArgumentError("quantile of an empty series");
  if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("quantile position outside [0, 1]");
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::pair<double, double> quartiles(std::span<const double> x) {
  if (x.size() < 4) throw ArgumentError("quartiles need at least 4 values");
  return {quantile(x, 0.25), quantile(x, 0.75)};
}

}  // namespace corrnet::stats
