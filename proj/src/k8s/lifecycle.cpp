#include "podsim/k8s/lifecycle.hpp"

#include <algorithm>

namespace podsim::k8s {

using petri::ArcIn;
using petri::ArcOut;
using petri::Expr;
using petri::FieldPattern;
using petri::FieldType;
using petri::Marking;
using petri::NetDefinition;
using petri::PlaceDef;
using petri::Token;
using petri::TransitionDef;
using petri::Value;

namespace {

Expr ival(std::int64_t v) { return Expr::lit(v); }

std::vector<FieldPattern> bind_all(std::initializer_list<const char*> names) {
  std::vector<FieldPattern> out;
  for (const char* n : names) out.push_back(FieldPattern::bind(n));
  return out;
}

std::vector<Expr> vars_of(std::initializer_list<const char*> names) {
  std::vector<Expr> out;
  for (const char* n : names) out.push_back(Expr::var(n));
  return out;
}

}  // namespace

petri::NetDefinition container_net_definition(const TimingProfile& timing, bool standalone) {
  NetDefinition def;
  def.name = "container-lifecycle";
  const std::vector<FieldType> schema{FieldType::Int, FieldType::Int};  // (index, r)
  for (const char* p : {places::kWaiting, places::kContRunning, "Done", "Failed0",
                        places::kContSuccess, places::kContFailure, places::kSuccessExit,
                        places::kFailedExit}) {
    def.places.push_back(PlaceDef::tuple(p, schema));
  }
  if (!standalone) {
    def.channels = {channels::kRunCont, channels::kContDone, channels::kContFail,
                    channels::kExitCont};
  }

  const auto pat = [] { return bind_all({"idx", "r"}); };
  const auto tok = [](const char* place) {
    return ArcOut{place, {Expr::var("idx"), Expr::var("r")}, 1};
  };

  TransitionDef t1{
      .name = "T1", .inputs = {{places::kWaiting, pat(), 1}}, .outputs = {tok(places::kContRunning)}};
  if (!standalone) t1.uplink = channels::kRunCont;

  TransitionDef t2{
      .name = "T2", .inputs = {{places::kContRunning, pat(), 1}}, .outputs = {tok("Done")}};
  t2.race_group = "execution";
  TransitionDef t3{
      .name = "T3", .inputs = {{places::kContRunning, pat(), 1}}, .outputs = {tok("Failed0")}};
  t3.race_group = "execution";

  TransitionDef done{.name = "announceDone",
                     .inputs = {{"Done", pat(), 1}},
                     .outputs = {tok(places::kContSuccess)}};
  if (!standalone) done.uplink = channels::kContDone;
  TransitionDef fail{.name = "announceFailure",
                     .inputs = {{"Failed0", pat(), 1}},
                     .outputs = {tok(places::kContFailure)}};
  if (!standalone) fail.uplink = channels::kContFail;

  // r: Always = 0, OnFailure = 1, Never = 2.
  TransitionDef t4{
      .name = "T4", .inputs = {{places::kContSuccess, pat(), 1}}, .outputs = {tok(places::kWaiting)}};
  t4.guard = Expr::eq(Expr::var("r"), ival(0));
  TransitionDef t5{
      .name = "T5", .inputs = {{places::kContFailure, pat(), 1}}, .outputs = {tok(places::kWaiting)}};
  t5.guard = Expr::le(Expr::var("r"), ival(1));

  TransitionDef t6{.name = "T6",
                   .inputs = {{places::kContSuccess, pat(), 1}},
                   .outputs = {tok(places::kSuccessExit)}};
  t6.guard = Expr::ge(Expr::var("r"), ival(1));
  if (!standalone) t6.uplink = channels::kExitCont;
  TransitionDef t7{.name = "T7",
                   .inputs = {{places::kContFailure, pat(), 1}},
                   .outputs = {tok(places::kFailedExit)}};
  t7.guard = Expr::eq(Expr::var("r"), ival(2));
  if (!standalone) t7.uplink = channels::kExitCont;

  def.transitions = {t1, t2, t3, done, fail, t4, t5, t6, t7};
  def.timing.emplace("T1", timing.t1);
  def.timing.emplace("T2", timing.t2);
  def.timing.emplace("T3", timing.t3);
  def.timing.emplace("T4", timing.t4_t5);
  def.timing.emplace("T5", timing.t4_t5);
  def.timing.emplace("T6", timing.t6_t7);
  def.timing.emplace("T7", timing.t6_t7);
  return def;
}

petri::Marking container_initial_marking(int containers, RestartPolicy policy) {
  Marking m;
  for (int i = 0; i < containers; ++i) {
    m.add(places::kWaiting,
          Token{Value{static_cast<std::int64_t>(i)},
                Value{static_cast<std::int64_t>(policy)}});
  }
  return m;
}

petri::NetDefinition system_net_definition(const TimingProfile& timing) {
  NetDefinition def;
  def.name = "pod-lifecycle";
  def.channels = {channels::kRunCont, channels::kContDone, channels::kContFail,
                  channels::kExitCont};

  // Pod tokens carry (pod ref, counter, machine, ram request, cpu request,
  // containers, restart policy); the counter is `pend` while Pending and
  // `done` while Running / RunningFailed.
  const std::vector<FieldType> pod_entry{FieldType::Ref, FieldType::Real, FieldType::Real,
                                         FieldType::Int, FieldType::Int};
  const std::vector<FieldType> pod_state{FieldType::Ref,  FieldType::Int, FieldType::Str,
                                         FieldType::Real, FieldType::Real, FieldType::Int,
                                         FieldType::Int};
  const std::vector<FieldType> pod_grace{FieldType::Ref,  FieldType::Str, FieldType::Real,
                                         FieldType::Real, FieldType::Int, FieldType::Int};
  const std::vector<FieldType> pod_cleanup{FieldType::Ref,  FieldType::Str,
                                           FieldType::Real, FieldType::Real,
                                           FieldType::Int,  FieldType::Int, FieldType::Int};

  def.places.push_back(PlaceDef::tuple(places::kPendingScheduling, pod_entry));
  // Single token serialising placements: the scheduler handles one pod at a
  // time, so each placement sees the machine inventory left by the previous.
  def.places.push_back(PlaceDef::counter(places::kScheduler));
  def.places.push_back(
      PlaceDef::tuple(places::kMachines, {FieldType::Str, FieldType::Real, FieldType::Real}));
  def.places.push_back(PlaceDef::tuple(places::kCreationSlots, {FieldType::Str}));
  def.places.push_back(PlaceDef::tuple(places::kPending, pod_state));
  def.places.push_back(PlaceDef::tuple(places::kRunning, pod_state));
  def.places.push_back(PlaceDef::tuple(places::kRunningFailed, pod_state));
  def.places.push_back(PlaceDef::tuple(places::kGraceWait, pod_grace));
  def.places.push_back(PlaceDef::tuple(places::kCleanup, pod_cleanup));
  def.places.push_back(PlaceDef::tuple(places::kSuccess, {FieldType::Ref}));
  def.places.push_back(PlaceDef::tuple(places::kFailed, {FieldType::Ref}));

  const auto entry_pat = bind_all({"p", "rram", "rcpu", "cp", "r"});
  const auto state_pat = bind_all({"p", "n", "m", "rram", "rcpu", "cp", "r"});
  const auto machine_pat = bind_all({"m", "ram", "cores"});
  const auto slot_pat = bind_all({"m"});  // unifies with the pod's machine
  const auto grace_pat = bind_all({"p", "m", "rram", "rcpu", "cp", "f"});
  const auto cleanup_pat = bind_all({"p", "m", "rram", "rcpu", "cp", "k", "f"});

  const auto state_tok = [](Expr counter, const char* place) {
    return ArcOut{place,
                  {Expr::var("p"), std::move(counter), Expr::var("m"), Expr::var("rram"),
                   Expr::var("rcpu"), Expr::var("cp"), Expr::var("r")},
                  1};
  };
  const auto slot_tok = [] { return ArcOut{places::kCreationSlots, {Expr::var("m")}, 1}; };

  std::vector<TransitionDef> ts;

  // Scheduling: one pod token and one feasible machine token; the machine
  // re-enters Machines with the aggregate request subtracted. Pods without a
  // feasible machine simply stay queued.
  {
    TransitionDef t{.name = "schedule",
                    .inputs = {{places::kPendingScheduling, entry_pat, 1},
                               {places::kMachines, machine_pat, 1},
                               {places::kScheduler, {}, 1}},
                    .outputs = {state_tok(Expr::var("cp"), places::kPending),
                                ArcOut{places::kMachines,
                                       {Expr::var("m"),
                                        Expr::sub(Expr::var("ram"), Expr::var("rram")),
                                        Expr::sub(Expr::var("cores"), Expr::var("rcpu"))},
                                       1},
                                ArcOut{places::kScheduler, {}, 1}}};
    t.guard = Expr::logical_and(Expr::ge(Expr::var("ram"), Expr::var("rram")),
                                Expr::ge(Expr::var("cores"), Expr::var("rcpu")));
    ts.push_back(std::move(t));
  }

  // Container creation while the pod is Pending: holds the machine's
  // creation slot for the full T1 delay and decrements pend on completion.
  {
    TransitionDef t{.name = "createContainer",
                    .inputs = {{places::kPending, state_pat, 1},
                               {places::kCreationSlots, slot_pat, 1}},
                    .outputs = {state_tok(Expr::sub(Expr::var("n"), ival(1)), places::kPending),
                                slot_tok()}};
    t.downlink = TransitionDef::Downlink{"p", channels::kRunCont};
    ts.push_back(std::move(t));
  }

  // All containers running: the pod leaves Pending once pend == 0.
  {
    TransitionDef t{.name = "podRunning",
                    .inputs = {{places::kPending, state_pat, 1}},
                    .outputs = {state_tok(ival(0), places::kRunning)}};
    t.guard = Expr::eq(Expr::var("n"), ival(0));
    ts.push_back(std::move(t));
  }

  // Done/failure accounting. `done` counts containers that finished for
  // good: successes count unless the policy restarts them (always), and
  // failures count only under never. Restarting containers re-create via
  // the runCont channel below.
  const auto counting = [&](const char* name, const char* from, const char* to,
                            const char* channel, Expr guard, bool increment) {
    TransitionDef t{.name = name,
                    .inputs = {{from, state_pat, 1}},
                    .outputs = {state_tok(increment ? Expr::add(Expr::var("n"), ival(1))
                                                    : Expr::var("n"),
                                          to)}};
    t.guard = std::move(guard);
    t.downlink = TransitionDef::Downlink{"p", channel};
    ts.push_back(std::move(t));
  };
  const auto r_is = [&](std::int64_t v) { return Expr::eq(Expr::var("r"), ival(v)); };
  const auto r_ge1 = Expr::ge(Expr::var("r"), ival(1));

  counting("containerDone", places::kRunning, places::kRunning, channels::kContDone, r_ge1,
           true);
  counting("containerDoneAlways", places::kRunning, places::kRunning, channels::kContDone,
           r_is(0), false);
  counting("containerDoneAfterFailure", places::kRunningFailed, places::kRunningFailed,
           channels::kContDone, r_ge1, true);
  counting("containerDoneAfterFailureAlways", places::kRunningFailed, places::kRunningFailed,
           channels::kContDone, r_is(0), false);

  counting("containerFailed", places::kRunning, places::kRunningFailed, channels::kContFail,
           r_is(2), true);
  counting("containerFailedRestarting", places::kRunning, places::kRunningFailed,
           channels::kContFail, Expr::le(Expr::var("r"), ival(1)), false);
  counting("containerFailedAgain", places::kRunningFailed, places::kRunningFailed,
           channels::kContFail, r_is(2), true);
  counting("containerFailedAgainRestarting", places::kRunningFailed, places::kRunningFailed,
           channels::kContFail, Expr::le(Expr::var("r"), ival(1)), false);

  // Re-creation of restarted containers; same slot discipline as above.
  for (const auto& [name, place] :
       {std::pair{"recreateContainer", places::kRunning},
        std::pair{"recreateContainerFailed", places::kRunningFailed}}) {
    TransitionDef t{.name = name,
                    .inputs = {{place, state_pat, 1}, {places::kCreationSlots, slot_pat, 1}},
                    .outputs = {state_tok(Expr::var("n"), place), slot_tok()}};
    t.downlink = TransitionDef::Downlink{"p", channels::kRunCont};
    ts.push_back(std::move(t));
  }

  // Terminal gates: every container finished for good. Pods restarting
  // forever (always) never satisfy these.
  const auto gate = [&](const char* name, const char* from, std::int64_t failed_flag) {
    TransitionDef t{.name = name,
                    .inputs = {{from, state_pat, 1}},
                    .outputs = {ArcOut{places::kGraceWait,
                                       {Expr::var("p"), Expr::var("m"), Expr::var("rram"),
                                        Expr::var("rcpu"), Expr::var("cp"), ival(failed_flag)},
                                       1}}};
    t.guard = Expr::logical_and(Expr::eq(Expr::var("n"), Expr::var("cp")), r_ge1);
    ts.push_back(std::move(t));
  };
  gate("podSucceeded", places::kRunning, 0);
  gate("podFailed", places::kRunningFailed, 1);

  // Grace period, then per-container cleanup. The pod token is held during
  // each exit, so containers of one pod stop one after another.
  {
    TransitionDef t{.name = "gracePeriod",
                    .inputs = {{places::kGraceWait, grace_pat, 1}},
                    .outputs = {ArcOut{places::kCleanup,
                                       {Expr::var("p"), Expr::var("m"), Expr::var("rram"),
                                        Expr::var("rcpu"), Expr::var("cp"), ival(0),
                                        Expr::var("f")},
                                       1}}};
    ts.push_back(std::move(t));
  }
  {
    TransitionDef t{.name = "cleanupContainer",
                    .inputs = {{places::kCleanup, cleanup_pat, 1}},
                    .outputs = {ArcOut{places::kCleanup,
                                       {Expr::var("p"), Expr::var("m"), Expr::var("rram"),
                                        Expr::var("rcpu"), Expr::var("cp"),
                                        Expr::add(Expr::var("k"), ival(1)), Expr::var("f")},
                                       1}}};
    t.downlink = TransitionDef::Downlink{"p", channels::kExitCont};
    ts.push_back(std::move(t));
  }

  // Terminal pods release their machine resources (the gates above only pass
  // restart policies never and on-failure).
  const auto finalize = [&](const char* name, std::int64_t failed_flag, const char* terminal) {
    TransitionDef t{.name = name,
                    .inputs = {{places::kCleanup, cleanup_pat, 1},
                               {places::kMachines, machine_pat, 1}},
                    .outputs = {ArcOut{places::kMachines,
                                       {Expr::var("m"),
                                        Expr::add(Expr::var("ram"), Expr::var("rram")),
                                        Expr::add(Expr::var("cores"), Expr::var("rcpu"))},
                                       1},
                                ArcOut{terminal, {Expr::var("p")}, 1}}};
    t.guard = Expr::logical_and(Expr::eq(Expr::var("k"), Expr::var("cp")),
                                Expr::eq(Expr::var("f"), ival(failed_flag)));
    ts.push_back(std::move(t));
  };
  finalize("podTerminalSuccess", 0, places::kSuccess);
  finalize("podTerminalFailed", 1, places::kFailed);

  def.transitions = std::move(ts);
  def.timing.emplace("gracePeriod",
                     petri::DelayDistribution::constant(timing.grace_period_s));
  return def;
}

std::optional<std::size_t> choose_machine(double ram_request, double cpu_request,
                                          std::span<const MachineState> machines,
                                          SchedulerMode mode, petri::Rng* rng) {
  std::vector<std::size_t> feasible;
  for (std::size_t i = 0; i < machines.size(); ++i) {
    if (machines[i].ram_gb >= ram_request && machines[i].cores >= cpu_request) {
      feasible.push_back(i);
    }
  }
  if (feasible.empty()) return std::nullopt;
  switch (mode) {
    case SchedulerMode::RoundRobin:
      return feasible.front();
    case SchedulerMode::FirstFitById:
      return *std::min_element(feasible.begin(), feasible.end(),
                               [&](std::size_t a, std::size_t b) {
                                 return machines[a].node_id < machines[b].node_id;
                               });
    case SchedulerMode::SeededRandom:
      return feasible[rng->uniform_index(feasible.size())];
  }
  return std::nullopt;
}

SystemNetHandles build_system_net(petri::Simulation& sim, const ClusterSpec& cluster,
                                  const DeploymentSpec& deployment) {
  cluster.validate();
  SystemNetHandles handles;

  const auto container_def = std::make_shared<const NetDefinition>(
      container_net_definition(deployment.timing, /*standalone=*/false));
  std::vector<petri::InstanceId> children;
  children.reserve(deployment.pod_specs.size());
  for (const auto& pod : deployment.pod_specs) {
    const auto child = sim.build_net(
        container_def, container_initial_marking(pod.containers, pod.restart_policy));
    children.push_back(child);
    handles.pod_instances.emplace(pod.pod_id, child);
  }

  Marking root;
  root.add_counter(places::kScheduler, 1);
  for (const auto& m : cluster.machines) {
    root.add(places::kMachines, Token{Value{m.node_id}, Value{m.ram_gb}, Value{m.cores}});
  }
  for (std::size_t i = 0; i < deployment.pod_specs.size(); ++i) {
    const auto& pod = deployment.pod_specs[i];
    root.add(places::kPendingScheduling,
             Token{Value{petri::NetRef{children[i]}}, Value{pod.ram_request_total()},
                   Value{pod.cpu_request_total()},
                   Value{static_cast<std::int64_t>(pod.containers)},
                   Value{static_cast<std::int64_t>(pod.restart_policy)}});
  }
  // Machines holding the image already can create containers from the start;
  // the rest get their slots when the download model delivers the image.
  const std::string image = deployment.pod_specs.empty()
                                ? std::string{}
                                : deployment.pod_specs.front().image.name;
  for (const auto& m : cluster.machines) {
    if (image.empty() || m.preloaded_images.contains(image)) {
      for (int s = 0; s < cluster.creation_parallelism; ++s) {
        root.add(places::kCreationSlots, Token{Value{m.node_id}});
      }
    }
  }

  handles.system = sim.build_net(system_net_definition(deployment.timing), std::move(root));

  const SchedulerMode mode = cluster.scheduler_mode;
  sim.set_binding_selector(
      handles.system, "schedule",
      [mode](petri::Simulation& s,
             const std::vector<petri::EnabledBinding>& bindings) -> std::size_t {
        // Head-of-queue pod: candidate machines are the contiguous prefix of
        // bindings sharing the first binding's pod reference.
        const auto& head_pod = bindings.front().binding.at("p");
        std::vector<MachineState> machines;
        for (const auto& b : bindings) {
          if (!(b.binding.at("p") == head_pod)) break;
          machines.push_back(MachineState{std::get<std::string>(b.binding.at("m")),
                                          std::get<double>(b.binding.at("ram")),
                                          std::get<double>(b.binding.at("cores"))});
        }
        const auto& head = bindings.front().binding;
        const auto choice =
            choose_machine(std::get<double>(head.at("rram")),
                           std::get<double>(head.at("rcpu")), machines, mode, &s.rng());
        // Feasibility was already enforced by the transition guard.
        return choice.value_or(0);
      });

  return handles;
}

}  // namespace podsim::k8s
