#include "podsim/k8s/download.hpp"

#include <algorithm>
#include <stdexcept>

#include "podsim/k8s/lifecycle.hpp"

namespace podsim::k8s {

double image_download_delay(const Machine& machine, const ImageSpec& image,
                            int active_downloads, double registry_bandwidth_gbps) {
  if (active_downloads < 1) throw std::invalid_argument("active_downloads must be >= 1");
  if (!(registry_bandwidth_gbps > 0.0)) {
    throw std::invalid_argument("registry bandwidth must be > 0");
  }
  const double share_gb_per_s = registry_bandwidth_gbps / 8.0 / active_downloads;
  return image.size_gb / share_gb_per_s + machine.rtt_ms / 1000.0;
}

DownloadModel::DownloadModel(petri::Simulation& sim, petri::InstanceId system_net,
                             const ClusterSpec& cluster, const ImageSpec& image)
    : system_(system_net), cluster_(cluster), image_(image) {
  // Preloaded machines never download.
  for (const auto& m : cluster_.machines) {
    if (m.preloaded_images.contains(image_.name)) handled_.insert(m.node_id);
  }
  sim.on_completion([this](petri::Simulation& s, const petri::CompletionInfo& info) {
    if (info.instance != system_ || info.transition != "schedule") return;
    request(s, std::get<std::string>(info.binding.at("m")));
  });
}

double DownloadModel::max_delay() const {
  double out = 0.0;
  for (const auto& [machine, delay] : delays_) {
    (void)machine;
    out = std::max(out, delay);
  }
  return out;
}

void DownloadModel::request(petri::Simulation& sim, const std::string& machine_id) {
  if (handled_.contains(machine_id)) return;  // downloads once per machine
  handled_.insert(machine_id);
  pending_.insert(machine_id);
  if (!flush_scheduled_) {
    flush_scheduled_ = true;
    sim.schedule_callback(sim.clock(), "imageDownloadBatch",
                          [this](petri::Simulation& s) { flush(s); });
  }
}

void DownloadModel::flush(petri::Simulation& sim) {
  // Same-instant placements (the scheduler chains them through zero-delay
  // completions) all belong to one batch: defer behind any remaining
  // same-time events so concurrent downloads share the registry equally.
  if (const auto next = sim.next_event_time(); next && *next <= sim.clock()) {
    sim.schedule_callback(sim.clock(), "imageDownloadBatch",
                          [this](petri::Simulation& s) { flush(s); });
    return;
  }
  flush_scheduled_ = false;
  const int active = static_cast<int>(in_flight_.size() + pending_.size());
  for (const auto& machine_id : pending_) {
    const auto it = std::find_if(cluster_.machines.begin(), cluster_.machines.end(),
                                 [&](const Machine& m) { return m.node_id == machine_id; });
    const double delay = image_download_delay(*it, image_, active,
                                              cluster_.registry_bandwidth_gbps);
    delays_.emplace(machine_id, delay);
    in_flight_.insert(machine_id);
    sim.schedule_callback(
        sim.clock() + delay, "imageDownload",
        [this, machine_id](petri::Simulation& s) {
          in_flight_.erase(machine_id);
          std::vector<petri::Token> slots;
          for (int i = 0; i < cluster_.creation_parallelism; ++i) {
            slots.push_back(petri::Token{petri::Value{machine_id}});
          }
          s.inject_tokens(system_, places::kCreationSlots, std::move(slots), "imageDownload");
        });
  }
  pending_.clear();
}

}  // namespace podsim::k8s
