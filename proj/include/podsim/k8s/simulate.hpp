#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "podsim/k8s/lifecycle.hpp"
#include "podsim/k8s/spec.hpp"
#include "podsim/petri/simulation.hpp"

namespace podsim::k8s {

struct SimOptions {
  std::uint64_t seed = 0;
  std::uint64_t max_events = 1'000'000;
  /// When set, the run stops at this simulated time instead of quiescence.
  std::optional<double> stop_time_s;
};

struct PodOutcome {
  std::string pod_id;
  std::string machine;
  std::optional<double> scheduled_at;
  std::optional<double> running_at;   // entered Running (pend == 0 gate)
  std::optional<double> all_done_at;  // every container finished for good
  std::optional<double> terminal_at;  // cleanup finished, resources released
  std::string terminal_phase;         // "Success", "Failed", or "" if not terminal
  int restarts = 0;

  /// Grace period plus per-container stops, when the pod terminated.
  std::optional<double> termination_duration_s() const {
    if (!all_done_at || !terminal_at) return std::nullopt;
    return *terminal_at - *all_done_at;
  }
};

struct SimResult {
  // deploy_time_s is the all-pods-running instant net of image pulls:
  // total_time_s = deploy_time_s + download_time_s.
  double deploy_time_s = 0.0;
  double total_time_s = 0.0;
  double download_time_s = 0.0;  // largest download delay in the run
  bool all_pods_ran = true;

  std::vector<PodOutcome> pods;
  std::vector<double> container_creation_s;  // first-creation T1 durations
  std::vector<double> pod_termination_s;     // termination durations of terminal pods
  std::map<std::string, double> downloads_by_machine;

  petri::RunStatus status = petri::RunStatus::Quiescent;
  std::uint64_t events = 0;
  std::shared_ptr<const petri::Trace> trace;
  std::map<std::string, petri::InstanceId> pod_instances;
};

/// Builds the hierarchy, runs to quiescence (or the configured stop time)
/// and extracts metrics. Propagates BudgetExceeded.
SimResult simulate(const ClusterSpec& cluster, const DeploymentSpec& deployment,
                   const SimOptions& options);

inline SimResult simulate(const ClusterSpec& cluster, const DeploymentSpec& deployment,
                          std::uint64_t seed) {
  SimOptions opts;
  opts.seed = seed;
  return simulate(cluster, deployment, opts);
}

/// Restart cycles of one container, read from the trace: each entry is the
/// stop duration (T4/T5) plus the subsequent re-creation duration (T1).
/// Throws NoRestartObserved when the container never restarted.
std::vector<double> restart_cycle_times(const SimResult& result, const std::string& pod_id,
                                        int container_index);

}  // namespace podsim::k8s
