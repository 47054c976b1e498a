#include "podsim/stats/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace podsim::stats {

SummaryStats summarize(std::span<const double> values, double alpha, std::string metric) {
  if (values.size() < 2) {
    throw InsufficientData("summarize needs at least 2 values, got " +
                           std::to_string(values.size()));
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1)");
  }
  SummaryStats s;
  s.count = values.size();
  s.alpha = alpha;
  s.metric = std::move(metric);
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (const double v : values) sum += v;
  s.mean = sum / n;
  double sq = 0.0;
  for (const double v : values) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / (n - 1.0));
  const double half = normal_quantile(1.0 - alpha / 2.0) * s.stddev / std::sqrt(n);
  s.ci_low = s.mean - half;
  s.ci_high = s.mean + half;
  return s;
}

TTestDecision pooled_t_test(const SummaryStats& s1, const SummaryStats& s2, double alpha) {
  if (s1.count < 2 || s2.count < 2) {
    throw InsufficientData("pooled t test needs two samples of at least 2 values");
  }
  const double n1 = static_cast<double>(s1.count);
  const double n2 = static_cast<double>(s2.count);
  TTestDecision d;
  d.alpha = alpha;
  d.degrees_of_freedom = s1.count + s2.count - 2;
  const double pooled_var =
      ((n1 - 1.0) * s1.stddev * s1.stddev + (n2 - 1.0) * s2.stddev * s2.stddev) /
      static_cast<double>(d.degrees_of_freedom);
  const double denom = std::sqrt(pooled_var) * std::sqrt(1.0 / n1 + 1.0 / n2);
  const double diff = s1.mean - s2.mean;
  if (denom == 0.0) {
    d.t_statistic = diff == 0.0 ? 0.0
                                : std::copysign(std::numeric_limits<double>::infinity(), diff);
  } else {
    d.t_statistic = diff / denom;
  }
  d.critical_value =
      student_t_quantile(1.0 - alpha / 2.0, static_cast<double>(d.degrees_of_freedom));
  d.reject_h0 = std::abs(d.t_statistic) > d.critical_value;
  return d;
}

double normal_quantile(double p) {
  static const boost::math::normal_distribution<double> unit(0.0, 1.0);
  return boost::math::quantile(unit, p);
}

double student_t_quantile(double p, double dof) {
  const boost::math::students_t_distribution<double> dist(dof);
  return boost::math::quantile(dist, p);
}

double avg_bandwidth_per_container(double total_bandwidth_mean, int containers) {
  if (containers < 1) throw std::invalid_argument("containers must be >= 1");
  return total_bandwidth_mean / containers;
}

double predict_deploy_time(int containers, int pods, int machines, double tc_s) {
  if (containers < 1 || pods < 1 || machines < 1) {
    throw std::invalid_argument("counts must be >= 1");
  }
  if (!(tc_s > 0.0)) throw std::invalid_argument("container creation time must be > 0");
  return containers * tc_s / std::min(pods, machines);
}

double container_time_from_deploy(double deploy_time_s, int containers, int pods,
                                  int machines) {
  if (containers < 1 || pods < 1 || machines < 1) {
    throw std::invalid_argument("counts must be >= 1");
  }
  if (!(deploy_time_s > 0.0)) throw std::invalid_argument("deployment time must be > 0");
  return deploy_time_s * std::min(pods, machines) / containers;
}

double total_provisioning_time(double deploy_time_s, double download_time_s) {
  if (deploy_time_s < 0.0 || download_time_s < 0.0) {
    throw std::invalid_argument("times must be >= 0");
  }
  return deploy_time_s + download_time_s;
}

double overhead_alpha(const SummaryStats& evaluated, const SummaryStats& baseline) {
  if (evaluated.metric != baseline.metric) {
    throw UnitMismatch("cannot ratio '" + evaluated.metric + "' against '" +
                       baseline.metric + "'");
  }
  if (!(evaluated.mean > 0.0) || !(baseline.mean > 0.0)) {
    throw std::invalid_argument("overhead ratio needs positive means");
  }
  return evaluated.mean / baseline.mean;
}

double overhead_alpha_from_bandwidth(const SummaryStats& evaluated,
                                     const SummaryStats& baseline) {
  if (evaluated.metric != baseline.metric) {
    throw UnitMismatch("cannot ratio '" + evaluated.metric + "' against '" +
                       baseline.metric + "'");
  }
  if (!(evaluated.mean > 0.0) || !(baseline.mean > 0.0)) {
    throw std::invalid_argument("overhead ratio needs positive means");
  }
  // Transfer time scales with 1/bandwidth, so the time ratio flips the means.
  return baseline.mean / evaluated.mean;
}

}  // namespace podsim::stats
