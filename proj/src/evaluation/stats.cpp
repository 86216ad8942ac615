#include "affordance/evaluation/stats.hpp"

#include <cmath>
#include <cstdio>

#include <boost/math/distributions/students_t.hpp>

#include "affordance/errors.hpp"

namespace affordance::evaluation {

double t_critical_95(int dof) {
  if (dof < 1) throw AggregationError("t quantile needs at least one degree of freedom");
  boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(dist, 0.975);
}

AggregateResult aggregate_seeds(std::span<const double> values) {
  if (values.size() < 2)
    throw AggregationError("a confidence interval needs at least 2 values, got " + std::to_string(values.size()));
  for (double v : values)
    if (!std::isfinite(v)) throw AggregationError("cannot aggregate a non-finite value");
  AggregateResult r;
  r.n = values.size();
  r.values.assign(values.begin(), values.end());
  double sum = 0;
  for (double v : values) sum += v;
  r.mean = sum / static_cast<double>(r.n);
  double ss = 0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  const double sd = std::sqrt(ss / static_cast<double>(r.n - 1));
  r.half_width = t_critical_95(static_cast<int>(r.n) - 1) * sd / std::sqrt(static_cast<double>(r.n));
  return r;
}

std::string format_percent(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", value * 100.0);
  return buf;
}

std::string format_ci(double mean, double half_width) {
  return format_percent(mean) + " ± " + format_percent(half_width);
}

}  // namespace affordance::evaluation
