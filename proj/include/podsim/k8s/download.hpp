#pragma once

#include <map>
#include <set>
#include <string>

#include "podsim/k8s/spec.hpp"
#include "podsim/petri/simulation.hpp"

namespace podsim::k8s {

/// Time for one machine to pull an image when `active_downloads` machines
/// share the registry: size / (per-download share of the aggregate bandwidth)
/// plus the machine's round-trip latency. Bandwidth is in gigabits per
/// second, image sizes in gigabytes.
double image_download_delay(const Machine& machine, const ImageSpec& image,
                            int active_downloads, double registry_bandwidth_gbps);

/// Drives image pulls for a system net. A machine starts its single download
/// when its first pod lands on it; machines starting at the same simulated
/// instant share the registry equally (their delays are computed with the
/// joint active-download count). On completion the machine's creation slots
/// are injected, which is what allows its first T1 to fire. Emits exactly
/// one "imageDownload" trace record per downloading machine.
class DownloadModel {
 public:
  DownloadModel(petri::Simulation& sim, petri::InstanceId system_net,
                const ClusterSpec& cluster, const ImageSpec& image);

  const std::map<std::string, double>& delay_by_machine() const { return delays_; }
  double max_delay() const;

 private:
  void request(petri::Simulation& sim, const std::string& machine_id);
  void flush(petri::Simulation& sim);

  petri::InstanceId system_;
  ClusterSpec cluster_;
  ImageSpec image_;
  std::set<std::string> pending_;
  std::set<std::string> in_flight_;
  std::set<std::string> handled_;
  std::map<std::string, double> delays_;
  bool flush_scheduled_ = false;
};

}  // namespace podsim::k8s
