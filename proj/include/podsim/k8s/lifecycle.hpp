#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "podsim/k8s/spec.hpp"
#include "podsim/petri/simulation.hpp"

namespace podsim::k8s {

// Place and channel names of the lifecycle nets, fixed so that traces can be
// interpreted by the metrics layer and by external tooling.
namespace places {
// system net
inline constexpr const char* kPendingScheduling = "PendingScheduling";
inline constexpr const char* kScheduler = "Scheduler";
inline constexpr const char* kMachines = "Machines";
inline constexpr const char* kCreationSlots = "CreationSlots";
inline constexpr const char* kPending = "Pending";
inline constexpr const char* kRunning = "Running";
inline constexpr const char* kRunningFailed = "RunningFailed";
inline constexpr const char* kGraceWait = "GraceWait";
inline constexpr const char* kCleanup = "Cleanup";
inline constexpr const char* kSuccess = "Success";
inline constexpr const char* kFailed = "Failed";
// container net
inline constexpr const char* kWaiting = "Waiting";
inline constexpr const char* kContRunning = "Running";
inline constexpr const char* kContSuccess = "Success";
inline constexpr const char* kContFailure = "Failure";
inline constexpr const char* kSuccessExit = "SuccessExit";
inline constexpr const char* kFailedExit = "FailedExit";
}  // namespace places

namespace channels {
inline constexpr const char* kRunCont = "runCont";
inline constexpr const char* kContDone = "contDone";
inline constexpr const char* kContFail = "contFail";
inline constexpr const char* kExitCont = "exitCont";
}  // namespace channels

/// Container lifecycle net: Waiting -T1-> Running, a T2/T3 success-failure
/// race, restart transitions T4/T5 guarded by the restart policy carried in
/// each container token, and graceful exits T6/T7. In hierarchical form T1,
/// the done/fail announcements and the exits synchronize with the pod's
/// system net; standalone form drops the channels so the net runs alone.
petri::NetDefinition container_net_definition(const TimingProfile& timing,
                                              bool standalone = false);

/// Initial marking for one pod's containers: tokens (index, restart policy).
petri::Marking container_initial_marking(int containers, RestartPolicy policy);

/// Pod lifecycle system net over a machine inventory: scheduling with
/// resource guards, per-machine creation slots, the pend==0 running gate,
/// done/failure accounting, grace period and per-container cleanup, and
/// resource release on terminal pods (restart policy never/on-failure only).
petri::NetDefinition system_net_definition(const TimingProfile& timing);

struct SystemNetHandles {
  petri::InstanceId system = 0;
  std::map<std::string, petri::InstanceId> pod_instances;  // pod_id -> child net
};

/// Builds one container child net per pod plus the system net, installs the
/// scheduler's machine-choice policy, and returns the instance handles.
/// Machines with the pod image preloaded start with their creation slots in
/// place; other machines receive slots from the download model.
SystemNetHandles build_system_net(petri::Simulation& sim, const ClusterSpec& cluster,
                                  const DeploymentSpec& deployment);

/// Machine state as seen by the scheduling decision.
struct MachineState {
  std::string node_id;
  double ram_gb = 0.0;
  double cores = 0.0;
};

/// Pure placement rule behind the system net's scheduling transition: picks
/// the machine (index into `machines`, given in current token order) for a
/// pod requesting the aggregate (ram, cpu), or nullopt when nothing fits.
/// RoundRobin takes the first feasible machine in token order (consumed
/// machine tokens re-enter at the back, which rotates the cluster);
/// FirstFitById takes the lowest feasible node_id; SeededRandom draws
/// uniformly among feasible machines.
std::optional<std::size_t> choose_machine(double ram_request, double cpu_request,
                                          std::span<const MachineState> machines,
                                          SchedulerMode mode, petri::Rng* rng);

}  // namespace podsim::k8s
