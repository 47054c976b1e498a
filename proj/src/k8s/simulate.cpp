#include "podsim/k8s/simulate.hpp"

#include <algorithm>

#include "podsim/k8s/download.hpp"

namespace podsim::k8s {

namespace {

std::optional<petri::InstanceId> pod_ref_of(const petri::TraceEvent& ev,
                                            const std::string& place) {
  for (const auto& pt : ev.tokens) {
    if (pt.place != place || pt.tokens.empty()) continue;
    if (const auto* ref = std::get_if<petri::NetRef>(&pt.tokens.front().front())) {
      return ref->id;
    }
  }
  return std::nullopt;
}

}  // namespace

SimResult simulate(const ClusterSpec& cluster, const DeploymentSpec& deployment,
                   const SimOptions& options) {
  petri::Simulation sim(options.seed, petri::Simulation::Options{options.max_events});
  const auto handles = build_system_net(sim, cluster, deployment);
  const auto image = deployment.pod_specs.empty() ? ImageSpec{}
                                                  : deployment.pod_specs.front().image;
  DownloadModel downloads(sim, handles.system, cluster, image);

  SimResult result;
  result.pod_instances = handles.pod_instances;
  result.status = options.stop_time_s
                      ? sim.run(petri::StopCondition::time(*options.stop_time_s))
                      : sim.run();
  result.events = sim.events_processed();
  result.downloads_by_machine = downloads.delay_by_machine();
  result.download_time_s = downloads.max_delay();

  // Index child instance -> pod id and prepare per-pod outcomes in pod order.
  std::map<petri::InstanceId, std::size_t> by_instance;
  result.pods.reserve(deployment.pod_specs.size());
  for (const auto& pod : deployment.pod_specs) {
    PodOutcome out;
    out.pod_id = pod.pod_id;
    by_instance.emplace(handles.pod_instances.at(pod.pod_id), result.pods.size());
    result.pods.push_back(std::move(out));
  }

  // Open T1 firings per (instance, container index), to pair consume/produce.
  std::map<std::pair<petri::InstanceId, std::int64_t>, double> open_t1;

  for (const auto& ev : sim.trace().events()) {
    if (ev.net == handles.system) {
      if (ev.phase != petri::Phase::Produce) continue;
      if (ev.transition == "schedule") {
        if (const auto ref = pod_ref_of(ev, places::kPending)) {
          auto& pod = result.pods[by_instance.at(*ref)];
          if (!pod.scheduled_at) {
            pod.scheduled_at = ev.time;
            for (const auto& pt : ev.tokens) {
              if (pt.place == places::kPending) {
                pod.machine = std::get<std::string>(pt.tokens.front()[2]);
              }
            }
          }
        }
      } else if (ev.transition == "podRunning") {
        if (const auto ref = pod_ref_of(ev, places::kRunning)) {
          auto& pod = result.pods[by_instance.at(*ref)];
          if (!pod.running_at) pod.running_at = ev.time;
        }
      } else if (ev.transition == "podSucceeded" || ev.transition == "podFailed") {
        if (const auto ref = pod_ref_of(ev, places::kGraceWait)) {
          result.pods[by_instance.at(*ref)].all_done_at = ev.time;
        }
      } else if (ev.transition == "podTerminalSuccess" ||
                 ev.transition == "podTerminalFailed") {
        const bool failed = ev.transition == "podTerminalFailed";
        if (const auto ref = pod_ref_of(ev, failed ? places::kFailed : places::kSuccess)) {
          auto& pod = result.pods[by_instance.at(*ref)];
          pod.terminal_at = ev.time;
          pod.terminal_phase = failed ? "Failed" : "Success";
        }
      }
      continue;
    }

    const auto pod_it = by_instance.find(ev.net);
    if (pod_it == by_instance.end()) continue;
    if (ev.transition == "T1") {
      const auto idx = std::get<std::int64_t>(ev.tokens.front().tokens.front()[0]);
      if (ev.phase == petri::Phase::Consume) {
        open_t1[{ev.net, idx}] = ev.time;
      } else if (const auto open = open_t1.find({ev.net, idx}); open != open_t1.end()) {
        result.container_creation_s.push_back(ev.time - open->second);
        open_t1.erase(open);
      }
    } else if ((ev.transition == "T4" || ev.transition == "T5") &&
               ev.phase == petri::Phase::Consume) {
      result.pods[pod_it->second].restarts += 1;
    }
  }

  double latest_running = 0.0;
  for (const auto& pod : result.pods) {
    if (!pod.running_at) {
      result.all_pods_ran = false;
      continue;
    }
    latest_running = std::max(latest_running, *pod.running_at);
    if (const auto d = pod.termination_duration_s()) {
      result.pod_termination_s.push_back(*d);
    }
  }
  result.total_time_s = latest_running;
  result.deploy_time_s = latest_running - result.download_time_s;
  if (result.deploy_time_s < 0.0) result.deploy_time_s = 0.0;  // no pod ran

  result.trace = std::make_shared<petri::Trace>(sim.trace());
  return result;
}

std::vector<double> restart_cycle_times(const SimResult& result, const std::string& pod_id,
                                        int container_index) {
  const auto it = result.pod_instances.find(pod_id);
  if (it == result.pod_instances.end()) {
    throw NoRestartObserved("unknown pod '" + pod_id + "'");
  }
  const petri::InstanceId net = it->second;
  const auto idx = static_cast<std::int64_t>(container_index);

  struct OpenSpan {
    double started = 0.0;
  };
  std::optional<OpenSpan> open_stop;
  std::optional<OpenSpan> open_create;
  std::optional<double> stop_duration;  // completed T4/T5 awaiting its T1
  std::vector<double> cycles;

  for (const auto& ev : result.trace->events()) {
    if (ev.net != net || ev.tokens.empty() || ev.tokens.front().tokens.empty()) continue;
    if (std::get<std::int64_t>(ev.tokens.front().tokens.front()[0]) != idx) continue;
    const bool consume = ev.phase == petri::Phase::Consume;
    if (ev.transition == "T4" || ev.transition == "T5") {
      if (consume) {
        open_stop = OpenSpan{ev.time};
      } else if (open_stop) {
        stop_duration = ev.time - open_stop->started;
        open_stop.reset();
      }
    } else if (ev.transition == "T1" && stop_duration) {
      if (consume) {
        open_create = OpenSpan{ev.time};
      } else if (open_create) {
        cycles.push_back(*stop_duration + (ev.time - open_create->started));
        stop_duration.reset();
        open_create.reset();
      }
    }
  }
  if (cycles.empty()) {
    throw NoRestartObserved("container " + std::to_string(container_index) + " of '" +
                            pod_id + "' never restarted");
  }
  return cycles;
}

}  // namespace podsim::k8s
