#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "podsim/petri/distribution.hpp"

namespace podsim::k8s {

/// Pod layout (pods x containers-per-pod) does not divide the requested
/// container count.
struct NonIntegralLayout : std::runtime_error {
  explicit NonIntegralLayout(const std::string& what) : std::runtime_error(what) {}
};

/// Asked for restart-cycle timings of a container that never restarted.
struct NoRestartObserved : std::runtime_error {
  explicit NoRestartObserved(const std::string& what) : std::runtime_error(what) {}
};

struct Machine {
  std::string node_id;
  double ram_gb = 0.0;
  double cores = 0.0;  // fractional requests allowed, so capacity is real-valued
  double rtt_ms = 0.0;
  std::set<std::string> preloaded_images;
};

enum class SchedulerMode {
  RoundRobin,    // spread over feasible machines (default)
  FirstFitById,  // lowest node_id among feasible
  SeededRandom,  // uniform among feasible, from the simulation seed
};

struct ClusterSpec {
  std::vector<Machine> machines;
  double registry_bandwidth_gbps = 1.0;  // aggregate image-server bandwidth
  SchedulerMode scheduler_mode = SchedulerMode::RoundRobin;
  int creation_parallelism = 1;  // concurrent container creations per machine

  std::size_t machine_count() const { return machines.size(); }
  void validate() const;
};

enum class RestartPolicy : int { Always = 0, OnFailure = 1, Never = 2 };

struct ImageSpec {
  std::string name;
  double size_gb = 0.0;
};

struct PodSpec {
  std::string pod_id;
  int containers = 1;
  double ram_request_gb = 0.0;     // per container
  double cpu_request_cores = 0.0;  // per container
  RestartPolicy restart_policy = RestartPolicy::Never;
  ImageSpec image;

  double ram_request_total() const { return ram_request_gb * containers; }
  double cpu_request_total() const { return cpu_request_cores * containers; }
};

/// One delay model per lifecycle transition plus the termination grace
/// period. Failure (t3) defaults to never, giving failure-free runs.
struct TimingProfile {
  petri::DelayDistribution t1 = petri::DelayDistribution::constant(0.0);
  petri::DelayDistribution t2 = petri::DelayDistribution::constant(0.0);
  petri::DelayDistribution t3 = petri::DelayDistribution::never();
  petri::DelayDistribution t4_t5 = petri::DelayDistribution::constant(0.0);
  petri::DelayDistribution t6_t7 = petri::DelayDistribution::constant(0.0);
  double grace_period_s = 30.0;
};

struct DeploymentSpec {
  int total_containers = 0;    // C
  int pods = 0;                // #Pods = rho * C
  int containers_per_pod = 0;  // C / #Pods
  std::vector<PodSpec> pod_specs;
  TimingProfile timing;

  double rho() const {
    return static_cast<double>(pods) / static_cast<double>(total_containers);
  }
};

/// Splits C containers into rho*C pods of C/(rho*C) containers each, cloned
/// from the template with ids "<template id or pod>-000..". Throws
/// NonIntegralLayout when either count is non-integral.
DeploymentSpec build_deployment(int total_containers, double rho, const PodSpec& template_pod,
                                const TimingProfile& timing);

/// Same, with rho given exactly as pods-per-containers (e.g. 1/4 = 0.25).
DeploymentSpec build_deployment(int total_containers, int rho_pods, int rho_containers,
                                const PodSpec& template_pod, const TimingProfile& timing);

}  // namespace podsim::k8s
