#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "podsim/petri/errors.hpp"
#include "podsim/petri/net.hpp"
#include "podsim/petri/trace.hpp"

namespace podsim::petri {

/// Child half of a channel-synchronized firing.
struct SyncPart {
  InstanceId child = 0;
  std::string transition;
  Binding binding;
};

/// A concrete (transition, binding) pair that fire() will accept.
struct EnabledBinding {
  std::string transition;
  Binding binding;
  std::optional<SyncPart> sync;
};

struct StopCondition {
  std::optional<double> at_time;
  std::function<bool(const class Simulation&)> predicate;

  static StopCondition quiescence() { return {}; }
  static StopCondition time(double t) {
    StopCondition s;
    s.at_time = t;
    return s;
  }
  static StopCondition when(std::function<bool(const class Simulation&)> p) {
    StopCondition s;
    s.predicate = std::move(p);
    return s;
  }
};

enum class RunStatus { Quiescent, TimeReached, PredicateMet };

/// Completion notification delivered to observers when a firing produces
/// its output tokens.
struct CompletionInfo {
  InstanceId instance = 0;
  const std::string& transition;
  const Binding& binding;
  double fired_at = 0.0;
  double completed_at = 0.0;
};

/// Deterministic discrete-event simulation over a hierarchy of net
/// instances. Single-threaded; externally synchronized. Two simulations
/// built from the same definitions, markings and seed produce identical
/// traces event for event.
///
/// Firing semantics: input tokens are consumed when a transition fires and
/// output tokens are produced when the sampled delay elapses. Simultaneously
/// enabled transitions fire in declaration order, consuming tokens in FIFO
/// order. Transitions whose timing is `never` are permanently disabled.
class Simulation {
 public:
  struct Options {
    std::uint64_t max_events = 1'000'000;
  };

  explicit Simulation(std::uint64_t seed) : Simulation(seed, Options{}) {}
  Simulation(std::uint64_t seed, Options options);
  ~Simulation();

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  /// Validates the definition and the marking, installs the instance and
  /// returns its id (root nets and children alike). No events are scheduled.
  InstanceId build_net(NetDefinition definition, Marking initial_marking);
  InstanceId build_net(std::shared_ptr<const NetDefinition> definition, Marking initial_marking);

  const NetDefinition& definition(InstanceId id) const;
  const Marking& marking(InstanceId id) const;
  std::size_t instance_count() const;

  double clock() const;
  std::uint64_t events_processed() const;
  Rng& rng();
  const Trace& trace() const;

  /// Time of the earliest pending event, if any; cancelled timers are
  /// skipped. Lets timer callbacks defer behind same-instant activity.
  std::optional<double> next_event_time();

  /// Every autonomously firable (transition, binding) pair of one instance:
  /// sufficient input tokens, guard true, and, for downlink transitions, an
  /// enabled child counterpart on the channel. Uplink transitions are
  /// reported only inside their parents' bindings.
  std::vector<EnabledBinding> enabled_bindings(InstanceId id) const;

  /// Consumes inputs now and schedules the completion at clock + sampled
  /// delay. For synchronized pairs both nets consume now and produce at
  /// completion. Throws NotEnabled if the pair is stale.
  void fire(InstanceId id, const EnabledBinding& binding);

  /// Runs until the stop condition holds, quiescence is reached, or the
  /// event budget is exhausted (throws BudgetExceeded).
  RunStatus run(StopCondition stop = StopCondition::quiescence());

  // --- extension points -----------------------------------------------

  /// Chooses among the enabled bindings of one transition; defaults to the
  /// first in FIFO enumeration order.
  using BindingSelector =
      std::function<std::size_t(Simulation&, const std::vector<EnabledBinding>&)>;
  void set_binding_selector(InstanceId id, const std::string& transition, BindingSelector sel);

  void on_completion(std::function<void(Simulation&, const CompletionInfo&)> observer);

  /// One-shot timer processed through the regular event list.
  using TimerId = std::uint64_t;
  TimerId schedule_callback(double time, std::string label,
                            std::function<void(Simulation&)> fn);
  void cancel_callback(TimerId id);

  /// Adds tokens to a place immediately, recording a produce event under
  /// `label`. Used by out-of-net machinery such as download models.
  void inject_tokens(InstanceId id, const std::string& place, std::vector<Token> tokens,
                     const std::string& label);
  void inject_counter(InstanceId id, const std::string& place, std::uint64_t n,
                      const std::string& label);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace podsim::petri
