#include "podsim/k8s/config.hpp"

#include <fstream>

namespace podsim::k8s {

namespace {

using nlohmann::json;

const json& require(const json& parent, const std::string& key, const std::string& path) {
  const auto it = parent.find(key);
  if (it == parent.end()) throw ConfigError(path + "." + key, "missing required field");
  return *it;
}

double number_at(const json& parent, const std::string& key, const std::string& path,
                 std::optional<double> fallback = std::nullopt) {
  const auto it = parent.find(key);
  if (it == parent.end()) {
    if (fallback) return *fallback;
    throw ConfigError(path + "." + key, "missing required field");
  }
  if (!it->is_number()) throw ConfigError(path + "." + key, "expected a number");
  return it->get<double>();
}

RestartPolicy parse_restart_policy(const json& v, const std::string& path) {
  if (v.is_number_integer()) {
    const int i = v.get<int>();
    if (i < 0 || i > 2) throw ConfigError(path, "restart policy must be 0, 1 or 2");
    return static_cast<RestartPolicy>(i);
  }
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    for (auto& c : s) c = static_cast<char>(std::tolower(c));
    if (s == "always") return RestartPolicy::Always;
    if (s == "onfailure" || s == "on_failure") return RestartPolicy::OnFailure;
    if (s == "never") return RestartPolicy::Never;
  }
  throw ConfigError(path, "restart policy must be Always, OnFailure, Never or 0/1/2");
}

SchedulerMode parse_scheduler_mode(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  std::string s = v.get<std::string>();
  for (auto& c : s) {
    if (c == '-') c = '_';
    c = static_cast<char>(std::tolower(c));
  }
  if (s == "round_robin" || s == "spread") return SchedulerMode::RoundRobin;
  if (s == "first_fit" || s == "first_fit_by_id") return SchedulerMode::FirstFitById;
  if (s == "seeded_random" || s == "random") return SchedulerMode::SeededRandom;
  throw ConfigError(path, "unknown scheduler mode '" + v.get<std::string>() + "'");
}

}  // namespace

petri::DelayDistribution parse_distribution(const json& spec, const std::string& field) {
  if (!spec.is_object()) throw ConfigError(field, "expected {dist, params}");
  const auto& dist = require(spec, "dist", field);
  if (!dist.is_string()) throw ConfigError(field + ".dist", "expected a string");
  const std::string kind = dist.get<std::string>();
  const json params = spec.value("params", json::object());
  try {
    if (kind == "constant") {
      return petri::DelayDistribution::constant(number_at(params, "value", field + ".params"));
    }
    if (kind == "normal_truncated") {
      return petri::DelayDistribution::normal_truncated(
          number_at(params, "mean", field + ".params"),
          number_at(params, "std", field + ".params"));
    }
    if (kind == "exponential") {
      return petri::DelayDistribution::exponential(
          number_at(params, "rate", field + ".params"));
    }
    if (kind == "empirical") {
      const auto& samples = require(params, "samples", field + ".params");
      if (!samples.is_array()) {
        throw ConfigError(field + ".params.samples", "expected an array");
      }
      std::vector<double> values;
      for (const auto& s : samples) {
        if (!s.is_number()) throw ConfigError(field + ".params.samples", "expected numbers");
        values.push_back(s.get<double>());
      }
      return petri::DelayDistribution::empirical(std::move(values));
    }
    if (kind == "never") return petri::DelayDistribution::never();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
  throw ConfigError(field + ".dist", "unknown distribution '" + kind + "'");
}

json distribution_to_json(const petri::DelayDistribution& dist) {
  using Kind = petri::DelayDistribution::Kind;
  switch (dist.kind()) {
    case Kind::Constant:
      return {{"dist", "constant"}, {"params", {{"value", dist.param_a()}}}};
    case Kind::NormalTruncated:
      return {{"dist", "normal_truncated"},
              {"params", {{"mean", dist.param_a()}, {"std", dist.param_b()}}}};
    case Kind::Exponential:
      return {{"dist", "exponential"}, {"params", {{"rate", dist.param_a()}}}};
    case Kind::Empirical:
      return {{"dist", "empirical"}, {"params", {{"samples", dist.samples()}}}};
    case Kind::Never:
      return {{"dist", "never"}};
  }
  return {};
}

Scenario parse_scenario(const json& config) {
  if (!config.is_object()) throw ConfigError("", "scenario must be a JSON object");
  Scenario out;

  const auto& cluster = require(config, "cluster", "");
  const auto& machines = require(cluster, "machines", "cluster");
  if (!machines.is_array() || machines.empty()) {
    throw ConfigError("cluster.machines", "expected a non-empty array");
  }
  for (std::size_t i = 0; i < machines.size(); ++i) {
    const std::string path = "cluster.machines[" + std::to_string(i) + "]";
    const auto& mj = machines[i];
    Machine m;
    const auto& id = require(mj, "id", path);
    if (!id.is_string()) throw ConfigError(path + ".id", "expected a string");
    m.node_id = id.get<std::string>();
    m.ram_gb = number_at(mj, "ram_gb", path);
    m.cores = number_at(mj, "cores", path);
    m.rtt_ms = number_at(mj, "rtt_ms", path, 0.0);
    if (const auto it = mj.find("preloaded"); it != mj.end()) {
      if (!it->is_array()) throw ConfigError(path + ".preloaded", "expected an array");
      for (const auto& img : *it) m.preloaded_images.insert(img.get<std::string>());
    }
    out.cluster.machines.push_back(std::move(m));
  }
  out.cluster.registry_bandwidth_gbps =
      number_at(cluster, "registry_bandwidth_gbps", "cluster", 1.0);
  if (const auto it = cluster.find("scheduler_mode"); it != cluster.end()) {
    out.cluster.scheduler_mode = parse_scheduler_mode(*it, "cluster.scheduler_mode");
  }
  if (const auto it = cluster.find("creation_parallelism"); it != cluster.end()) {
    out.cluster.creation_parallelism = it->get<int>();
  }
  try {
    out.cluster.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("cluster", e.what());
  }

  const auto& deployment = require(config, "deployment", "");
  const int total = static_cast<int>(number_at(deployment, "C", "deployment"));

  PodSpec tmpl;
  const auto& pod = require(deployment, "pod", "deployment");
  tmpl.ram_request_gb = number_at(pod, "ram_request_gb", "deployment.pod", 0.0);
  tmpl.cpu_request_cores = number_at(pod, "cpu_request_cores", "deployment.pod", 0.0);
  if (const auto it = pod.find("restart_policy"); it != pod.end()) {
    tmpl.restart_policy = parse_restart_policy(*it, "deployment.pod.restart_policy");
  }
  const auto& image = require(pod, "image", "deployment.pod");
  tmpl.image.name = require(image, "name", "deployment.pod.image").get<std::string>();
  tmpl.image.size_gb = number_at(image, "size_gb", "deployment.pod.image", 0.0);

  TimingProfile timing;
  if (const auto it = config.find("timing"); it != config.end()) {
    const auto& tj = *it;
    if (const auto d = tj.find("t1"); d != tj.end()) {
      timing.t1 = parse_distribution(*d, "timing.t1");
    }
    if (const auto d = tj.find("t2"); d != tj.end()) {
      timing.t2 = parse_distribution(*d, "timing.t2");
    }
    if (const auto d = tj.find("t3"); d != tj.end()) {
      timing.t3 = parse_distribution(*d, "timing.t3");
    }
    if (const auto d = tj.find("t4_t5"); d != tj.end()) {
      timing.t4_t5 = parse_distribution(*d, "timing.t4_t5");
    }
    if (const auto d = tj.find("t6_t7"); d != tj.end()) {
      timing.t6_t7 = parse_distribution(*d, "timing.t6_t7");
    }
    timing.grace_period_s = number_at(tj, "grace_period_s", "timing", 30.0);
    if (timing.grace_period_s < 0.0) {
      throw ConfigError("timing.grace_period_s", "must be >= 0");
    }
  }

  const auto& rho = require(deployment, "rho", "deployment");
  try {
    if (rho.is_object()) {
      out.deployment = build_deployment(
          total, static_cast<int>(number_at(rho, "pods", "deployment.rho")),
          static_cast<int>(number_at(rho, "containers", "deployment.rho")), tmpl, timing);
    } else if (rho.is_number()) {
      out.deployment = build_deployment(total, rho.get<double>(), tmpl, timing);
    } else {
      throw ConfigError("deployment.rho", "expected a number or {pods, containers}");
    }
  } catch (const NonIntegralLayout& e) {
    throw ConfigError("deployment.rho", e.what());
  }

  if (const auto it = config.find("run"); it != config.end()) {
    const auto& run = *it;
    out.seed = static_cast<std::uint64_t>(number_at(run, "seed", "run", 0.0));
    out.replications = static_cast<int>(number_at(run, "replications", "run", 1.0));
    out.max_events = static_cast<std::uint64_t>(number_at(run, "max_events", "run", 1e6));
    if (out.replications < 1) throw ConfigError("run.replications", "must be >= 1");
    if (const auto st = run.find("stop_time_s"); st != run.end()) {
      out.stop_time_s = st->get<double>();
    }
  }
  return out;
}

Scenario load_scenario(std::istream& in) {
  json config;
  try {
    config = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(config);
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open scenario file '" + path + "'");
  return load_scenario(in);
}

}  // namespace podsim::k8s
