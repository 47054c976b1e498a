#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

namespace podsim::stats {

struct InsufficientData : std::runtime_error {
  explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

/// Ratio of two summaries measured in different metrics.
struct UnitMismatch : std::runtime_error {
  explicit UnitMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct SummaryStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (divisor N-1)
  std::size_t count = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double alpha = 0.05;
  std::string metric;  // unit tag, e.g. "exec_time_s"
};

/// Mean, sample standard deviation and the normal-quantile confidence
/// interval mean +- z_{1-alpha/2} * stddev / sqrt(N) (the sampled mean is
/// treated as normal by the central limit theorem). Needs N >= 2.
SummaryStats summarize(std::span<const double> values, double alpha = 0.05,
                       std::string metric = {});

struct TTestDecision {
  double t_statistic = 0.0;
  std::size_t degrees_of_freedom = 0;
  double critical_value = 0.0;
  bool reject_h0 = false;
  double alpha = 0.05;
};

/// Two-sided pooled two-sample t test of H0: mu1 - mu2 = 0 under equal
/// variances: s_p^2 = ((N1-1)s1^2 + (N2-1)s2^2) / (N1+N2-2),
/// t = (mu1-mu2) / (s_p sqrt(1/N1 + 1/N2)), df = N1+N2-2.
TTestDecision pooled_t_test(const SummaryStats& s1, const SummaryStats& s2,
                            double alpha = 0.05);

/// Standard normal quantile (inverse CDF).
double normal_quantile(double p);

/// Student t quantile with `dof` degrees of freedom.
double student_t_quantile(double p, double dof);

/// Mean aggregate bandwidth divided by the number of clients.
double avg_bandwidth_per_container(double total_bandwidth_mean, int containers);

/// Deployment time of C containers in pods over n machines when one
/// container takes tc seconds: C * tc / min(pods, n).
double predict_deploy_time(int containers, int pods, int machines, double tc_s);

/// Per-container creation time from a measured deployment time; exact
/// inverse of predict_deploy_time.
double container_time_from_deploy(double deploy_time_s, int containers, int pods,
                                  int machines);

/// Total provisioning time: deployment plus image download.
double total_provisioning_time(double deploy_time_s, double download_time_s);

/// Pod-abstraction execution overhead: time of the evaluated configuration
/// over the one-container-per-pod baseline, so values above 1 mean the
/// grouping costs time. Both summaries must carry the same metric tag.
double overhead_alpha(const SummaryStats& evaluated, const SummaryStats& baseline);

/// Overhead from bandwidth summaries (higher is better): ratios the
/// equivalent transfer times, i.e. baseline bandwidth over evaluated.
double overhead_alpha_from_bandwidth(const SummaryStats& evaluated,
                                     const SummaryStats& baseline);

}  // namespace podsim::stats
