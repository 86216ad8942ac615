#pragma once

#include <span>
#include <string>
#include <vector>

namespace affordance::evaluation {

struct AggregateResult {
  double mean = 0.0;
  /// Half-width of the two-sided 95% Student-t interval.
  double half_width = 0.0;
  std::size_t n = 0;
  std::vector<double> values;
};

/// mean and t(0.975, n-1) * s / sqrt(n) with the n-1 sample deviation.
/// Throws AggregationError for fewer than two values.
AggregateResult aggregate_seeds(std::span<const double> values);

/// Two-sided 95% critical value of Student's t with `dof` degrees of freedom.
double t_critical_95(int dof);

/// Fractions rendered as percentages with two decimals: "86.06 ± 2.05".
std::string format_ci(double mean, double half_width);
std::string format_percent(double value);

}  // namespace affordance::evaluation
