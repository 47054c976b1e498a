#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "podsim/k8s/spec.hpp"

namespace podsim::k8s {

/// Scenario file rejected; `field` names the offending entry.
struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string field_path, const std::string& what)
      : std::runtime_error(field_path + ": " + what), field(std::move(field_path)) {}
};

/// Parsed scenario file:
/// {cluster: {machines: [{id, ram_gb, cores, rtt_ms, preloaded: [...]}],
///            registry_bandwidth_gbps, scheduler_mode},
///  deployment: {C, rho: {pods, containers} | decimal,
///               pod: {ram_request_gb, cpu_request_cores, restart_policy,
///                     image: {name, size_gb}}},
///  timing: {t1, t2, t3, t4_t5, t6_t7: {dist, params}, grace_period_s},
///  run: {seed, replications, max_events}}.
struct Scenario {
  ClusterSpec cluster;
  DeploymentSpec deployment;
  std::uint64_t seed = 0;
  int replications = 1;
  std::uint64_t max_events = 1'000'000;
  std::optional<double> stop_time_s;
};

Scenario parse_scenario(const nlohmann::json& config);
Scenario load_scenario(std::istream& in);
Scenario load_scenario_file(const std::string& path);

petri::DelayDistribution parse_distribution(const nlohmann::json& spec,
                                            const std::string& field);
nlohmann::json distribution_to_json(const petri::DelayDistribution& dist);

}  // namespace podsim::k8s
