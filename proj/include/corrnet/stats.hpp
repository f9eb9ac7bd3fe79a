#pragma once

#include <cstddef>
#include <span>
#include <utility>

namespace corrnet::stats {

struct MwuResult {
  double u_statistic = 0.0;  // for the first sample
  double p_value = 1.0;      // two-sided
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

/// Product-moment correlation. Throws UndefinedStatisticError when either
/// series has zero variance, ArgumentError on length mismatch or n < 2.
double pearson(std::span<const double> x, std::span<const double> y);

/// Mann-Whitney U with midranks for ties. The p-value uses the normal
/// approximation with continuity and tie correction.
MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

/// Linearly interpolated quantile at position q * (n - 1) of the sorted data.
double quantile(std::span<const double> x, double q);

/// (Q1, Q3) by the inclusive linear-interpolation method. Requires n >= 4.
std::pair<double, double> quartiles(std::span<const double> x);

double mean(std::span<const double> x);

/// Sample standard deviation (divisor n - 1). Requires n >= 2.
double sample_sd(std::span<const double> x);

}  // namespace corrnet::stats
