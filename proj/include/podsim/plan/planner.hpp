#pragma once

#include <optional>
#include <string>
#include <vector>

#include "podsim/stats/calibration.hpp"

namespace podsim::plan {

enum class WorkloadKind { CpuIntensive, IoIntensive, NetworkIntensive };

/// Rule1: spread n pods over the machines (rho = n/C).
/// Rule2: one container per pod (rho = 1).
enum class Rule { Rule1, Rule2 };

std::string to_string(WorkloadKind kind);
std::string to_string(Rule rule);

struct AppProfile {
  WorkloadKind kind = WorkloadKind::CpuIntensive;
  bool is_service = false;
  /// Deployment time negligible relative to execution (long-lived service,
  /// few failures). Unset: derived from the calibration when possible,
  /// otherwise taken from is_service.
  std::optional<bool> deployment_negligible;
};

struct PlanInput {
  int containers = 1;  // C
  int machines = 1;    // n
  AppProfile profile;
  double exec_time_s = 0.0;  // execution time at the rho = 1 baseline
  const stats::CalibrationTable* calibration = nullptr;
  const stats::OverheadTable* alpha = nullptr;
  /// Overhead used when no table covers the queried rho; observed magnitude
  /// for low rho is about 1.01.
  double default_alpha = 1.01;
  /// "Deployment negligible" when derived: deploy time at rho = 1 below this
  /// fraction of the execution time.
  double negligible_threshold = 0.01;
};

struct PlanRecommendation {
  double rho = 1.0;
  int pods = 1;
  int containers_per_pod = 1;
  Rule rule = Rule::Rule2;
  std::optional<double> predicted_total_s;
  std::vector<std::string> decision_trace;
};

/// Rho choice for the workload: CPU- and I/O-bound containers group into n
/// pods when C > n, otherwise one container per pod; network-bound
/// containers prefer isolation unless deployment time dominates, decided by
/// comparing Tc(1) - Tc(n/C) against n(alpha-1)/C * Te. Pure function of its
/// input. Throws stats::MissingCalibration when that comparison is needed
/// but the creation-time table cannot answer.
PlanRecommendation recommend(const PlanInput& input);

/// Total time at a given rho in the pods >= machines regime:
/// (C/n) * Tc(rho) + alpha(rho) * Te.
double predict_total(double rho, const PlanInput& input);

/// The isolation side of the comparison: true when one container per pod
/// (Rule2) wins, i.e. Tc(1) - Tc(n/C) < n(alpha-1)/C * Te.
bool isolated_pods_preferred(double tc_rho1, double tc_rho_nc, int machines, int containers,
                             double alpha, double exec_time_s);

/// Ceiling layout for Rule1: containers_per_pod = ceil(C/n), pods covering
/// all containers with slack < pods.
struct Layout {
  int pods = 1;
  int containers_per_pod = 1;
};
Layout rule1_layout(int containers, int machines);

}  // namespace podsim::plan
