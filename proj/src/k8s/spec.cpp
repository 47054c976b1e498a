#include "podsim/k8s/spec.hpp"

#include <cmath>
#include <cstdio>

namespace podsim::k8s {

void ClusterSpec::validate() const {
  if (machines.empty()) throw std::invalid_argument("cluster needs at least one machine");
  if (!(registry_bandwidth_gbps > 0.0)) {
    throw std::invalid_argument("registry_bandwidth_gbps must be > 0");
  }
  if (creation_parallelism < 1) {
    throw std::invalid_argument("creation_parallelism must be >= 1");
  }
  std::set<std::string> ids;
  for (const auto& m : machines) {
    if (!ids.insert(m.node_id).second) {
      throw std::invalid_argument("duplicate machine id '" + m.node_id + "'");
    }
    if (m.ram_gb < 0.0 || m.cores < 0.0 || m.rtt_ms < 0.0) {
      throw std::invalid_argument("machine '" + m.node_id + "' has negative capacity");
    }
  }
}

namespace {

DeploymentSpec layout(int total_containers, int pods, const PodSpec& template_pod,
                      const TimingProfile& timing) {
  if (total_containers < 1) throw NonIntegralLayout("container count must be >= 1");
  if (pods < 1 || pods > total_containers) {
    throw NonIntegralLayout("rho * C = " + std::to_string(pods) +
                            " pods is outside [1, C] for C = " +
                            std::to_string(total_containers));
  }
  if (total_containers % pods != 0) {
    throw NonIntegralLayout(std::to_string(pods) + " pods cannot evenly hold " +
                            std::to_string(total_containers) + " containers");
  }
  DeploymentSpec d;
  d.total_containers = total_containers;
  d.pods = pods;
  d.containers_per_pod = total_containers / pods;
  d.timing = timing;
  d.pod_specs.reserve(static_cast<std::size_t>(pods));
  const std::string base = template_pod.pod_id.empty() ? "pod" : template_pod.pod_id;
  for (int i = 0; i < pods; ++i) {
    PodSpec p = template_pod;
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "-%03d", i);
    p.pod_id = base + suffix;
    p.containers = d.containers_per_pod;
    d.pod_specs.push_back(std::move(p));
  }
  return d;
}

}  // namespace

DeploymentSpec build_deployment(int total_containers, double rho, const PodSpec& template_pod,
                                const TimingProfile& timing) {
  if (!(rho > 0.0) || rho > 1.0) {
    throw NonIntegralLayout("rho must lie in (0, 1], got " + std::to_string(rho));
  }
  const double exact = rho * total_containers;
  const double rounded = std::round(exact);
  if (std::abs(exact - rounded) > 1e-9 * std::max(1.0, std::abs(exact))) {
    throw NonIntegralLayout("rho * C = " + std::to_string(exact) + " is not integral");
  }
  return layout(total_containers, static_cast<int>(rounded), template_pod, timing);
}

DeploymentSpec build_deployment(int total_containers, int rho_pods, int rho_containers,
                                const PodSpec& template_pod, const TimingProfile& timing) {
  if (rho_pods < 1 || rho_containers < 1 || rho_pods > rho_containers) {
    throw NonIntegralLayout("rho = " + std::to_string(rho_pods) + "/" +
                            std::to_string(rho_containers) + " is outside (0, 1]");
  }
  const long long scaled = static_cast<long long>(total_containers) * rho_pods;
  if (scaled % rho_containers != 0) {
    throw NonIntegralLayout("rho * C = " + std::to_string(total_containers) + " * " +
                            std::to_string(rho_pods) + "/" + std::to_string(rho_containers) +
                            " is not integral");
  }
  return layout(total_containers, static_cast<int>(scaled / rho_containers), template_pod,
                timing);
}

}  // namespace podsim::k8s
