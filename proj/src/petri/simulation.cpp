#include "podsim/petri/simulation.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <set>
#include <unordered_map>

namespace podsim::petri {

namespace {

constexpr std::size_t kCounterPick = std::numeric_limits<std::size_t>::max();

struct CompiledNet {
  std::shared_ptr<const NetDefinition> def;
  std::unordered_map<std::string, std::size_t> place_index;
  std::unordered_map<std::string, std::size_t> transition_index;
  std::vector<const DelayDistribution*> timing;  // per transition, nullptr = immediate
  std::vector<bool> never;                       // per transition
  // race group -> members in declaration order
  std::map<std::string, std::vector<std::size_t>> race_groups;
  // first race-group member handles the whole group during a scan
  std::vector<bool> race_follower;
  // channel -> uplink transitions in declaration order
  std::map<std::string, std::vector<std::size_t>> uplinks;
};

std::shared_ptr<const CompiledNet> compile(std::shared_ptr<const NetDefinition> def) {
  def->validate();
  auto net = std::make_shared<CompiledNet>();
  net->def = def;
  for (std::size_t i = 0; i < def->places.size(); ++i) net->place_index[def->places[i].name] = i;
  net->timing.resize(def->transitions.size(), nullptr);
  net->never.resize(def->transitions.size(), false);
  net->race_follower.resize(def->transitions.size(), false);
  for (std::size_t i = 0; i < def->transitions.size(); ++i) {
    const auto& t = def->transitions[i];
    net->transition_index[t.name] = i;
    if (const auto it = def->timing.find(t.name); it != def->timing.end()) {
      net->timing[i] = &it->second;
      net->never[i] = it->second.is_never();
    }
    if (t.race_group) {
      auto& members = net->race_groups[*t.race_group];
      if (!members.empty()) net->race_follower[i] = true;
      members.push_back(i);
    }
    if (t.uplink) net->uplinks[*t.uplink].push_back(i);
  }
  return net;
}

struct Instance {
  InstanceId id = 0;
  std::shared_ptr<const CompiledNet> net;
  Marking marking;
  bool live = true;
};

/// Token choices for one transition side, parallel to its input arcs.
using Picks = std::vector<std::size_t>;

struct ChildPart {
  InstanceId child = 0;
  std::size_t transition = 0;
  Binding binding;
  Picks picks;
};

struct Candidate {
  std::size_t transition = 0;
  Binding binding;
  Picks picks;
  std::optional<ChildPart> sync;
};

struct Scheduled {
  double time = 0.0;
  std::uint64_t seq = 0;
  bool is_callback = false;
  // completion payload
  InstanceId instance = 0;
  std::size_t transition = 0;
  Binding binding;
  std::optional<ChildPart> sync;
  double fired_at = 0.0;
  // callback payload
  std::uint64_t callback_id = 0;
  std::string label;
};

struct ScheduledAfter {
  bool operator()(const Scheduled& a, const Scheduled& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

}  // namespace

struct Simulation::Impl {
  Options options;
  Rng rng;
  double clock = 0.0;
  std::uint64_t events = 0;
  std::uint64_t seq = 0;
  std::uint64_t next_timer = 1;
  Trace trace;
  std::vector<Instance> instances;
  std::priority_queue<Scheduled, std::vector<Scheduled>, ScheduledAfter> fel;
  std::map<std::uint64_t, std::function<void(Simulation&)>> callbacks;
  std::map<std::pair<InstanceId, std::string>, BindingSelector> selectors;
  std::vector<std::function<void(Simulation&, const CompletionInfo&)>> observers;

  explicit Impl(std::uint64_t seed, Options opts) : options(opts), rng(seed) {}

  const Instance& at(InstanceId id) const {
    if (id >= instances.size()) throw MarkingError("unknown net instance " + std::to_string(id));
    return instances[id];
  }
  Instance& at(InstanceId id) {
    if (id >= instances.size()) throw MarkingError("unknown net instance " + std::to_string(id));
    return instances[id];
  }

  void count_event() {
    if (++events > options.max_events) {
      throw BudgetExceeded("event budget of " + std::to_string(options.max_events) +
                           " exhausted at t=" + std::to_string(clock));
    }
  }

  // --- binding enumeration -------------------------------------------

  /// Yields candidate bindings of `transition` in `inst`, including the
  /// synchronized child part for downlink transitions. `yield` returns
  /// false to stop enumeration. Returns false if enumeration was stopped.
  bool enumerate(const Instance& inst, std::size_t transition, Binding seed_binding,
                 const std::function<bool(const Binding&, const Picks&,
                                          const std::optional<ChildPart>&)>& yield) const {
    const auto& tdef = inst.net->def->transitions[transition];
    Picks picks(tdef.inputs.size(), kCounterPick);
    std::unordered_map<std::string, std::set<std::size_t>> used;
    std::unordered_map<std::string, std::uint64_t> used_counts;
    return match_arc(inst, tdef, 0, seed_binding, picks, used, used_counts, yield);
  }

  bool match_arc(const Instance& inst, const TransitionDef& tdef, std::size_t arc_i,
                 Binding& binding, Picks& picks,
                 std::unordered_map<std::string, std::set<std::size_t>>& used,
                 std::unordered_map<std::string, std::uint64_t>& used_counts,
                 const std::function<bool(const Binding&, const Picks&,
                                          const std::optional<ChildPart>&)>& yield) const {
    if (arc_i == tdef.inputs.size()) {
      if (tdef.guard && !tdef.guard->eval_bool(binding)) return true;
      if (!tdef.downlink) return yield(binding, picks, std::nullopt);
      return match_sync(inst, tdef, binding, picks, yield);
    }

    const auto& arc = tdef.inputs[arc_i];
    const auto& place = inst.net->def->places[inst.net->place_index.at(arc.place)];
    if (place.kind == PlaceKind::Counter) {
      auto& reserved = used_counts[arc.place];
      if (inst.marking.counter(arc.place) < reserved + arc.weight) return true;
      reserved += arc.weight;
      picks[arc_i] = kCounterPick;
      const bool keep_going =
          match_arc(inst, tdef, arc_i + 1, binding, picks, used, used_counts, yield);
      reserved -= arc.weight;
      return keep_going;
    }

    const auto& tokens = inst.marking.tokens(arc.place);
    auto& used_here = used[arc.place];
    for (std::size_t idx = 0; idx < tokens.size(); ++idx) {
      if (used_here.contains(idx)) continue;
      const Token& tok = tokens[idx];
      std::vector<std::string> newly_bound;
      bool ok = true;
      for (std::size_t f = 0; f < arc.pattern.size() && ok; ++f) {
        const auto& pat = arc.pattern[f];
        switch (pat.kind) {
          case FieldPattern::Kind::Any:
            break;
          case FieldPattern::Kind::Const:
            ok = tok[f] == pat.literal;
            break;
          case FieldPattern::Kind::Var: {
            const auto it = binding.find(pat.var);
            if (it == binding.end()) {
              binding.emplace(pat.var, tok[f]);
              newly_bound.push_back(pat.var);
            } else {
              ok = it->second == tok[f];
            }
            break;
          }
        }
      }
      if (ok) {
        used_here.insert(idx);
        picks[arc_i] = idx;
        const bool keep_going =
            match_arc(inst, tdef, arc_i + 1, binding, picks, used, used_counts, yield);
        used_here.erase(idx);
        if (!keep_going) {
          for (const auto& v : newly_bound) binding.erase(v);
          return false;
        }
      }
      for (const auto& v : newly_bound) binding.erase(v);
    }
    return true;
  }

  bool match_sync(const Instance& inst, const TransitionDef& tdef, Binding& binding,
                  Picks& picks,
                  const std::function<bool(const Binding&, const Picks&,
                                           const std::optional<ChildPart>&)>& yield) const {
    const auto it = binding.find(tdef.downlink->token_var);
    assert(it != binding.end());
    const auto ref = std::get<NetRef>(it->second);
    if (ref.id >= instances.size() || !instances[ref.id].live) return true;
    const Instance& child = instances[ref.id];
    const auto up = child.net->uplinks.find(tdef.downlink->channel);
    if (up == child.net->uplinks.end()) return true;
    for (const std::size_t child_t : up->second) {
      if (child.net->never[child_t]) continue;
      bool keep_going = true;
      enumerate(child, child_t, Binding{},
                [&](const Binding& cb, const Picks& cp, const std::optional<ChildPart>&) {
                  ChildPart part{ref.id, child_t, cb, cp};
                  keep_going = yield(binding, picks, part);
                  return keep_going;
                });
      if (!keep_going) return false;
    }
    return true;
  }

  std::vector<Candidate> candidates_for(const Instance& inst, std::size_t transition,
                                        bool first_only) const {
    std::vector<Candidate> out;
    enumerate(inst, transition, Binding{},
              [&](const Binding& b, const Picks& p, const std::optional<ChildPart>& sync) {
                out.push_back(Candidate{transition, b, p, sync});
                return !first_only;
              });
    return out;
  }

  // --- firing ----------------------------------------------------------

  void consume_side(Instance& inst, const TransitionDef& tdef, const Picks& picks,
                    const std::string& transition_name) {
    TraceEvent ev;
    ev.time = clock;
    ev.net = inst.id;
    ev.transition = transition_name;
    ev.phase = Phase::Consume;
    // Erase picked tokens per place in descending index order so earlier
    // removals do not shift later picks.
    std::map<std::string, std::vector<std::size_t>> by_place;
    for (std::size_t i = 0; i < tdef.inputs.size(); ++i) {
      const auto& arc = tdef.inputs[i];
      if (picks[i] == kCounterPick) {
        inst.marking.take_counter(arc.place, arc.weight);
        ev.tokens.push_back(PlacedTokens{arc.place, {}, arc.weight});
      } else {
        by_place[arc.place].push_back(picks[i]);
        ev.tokens.push_back(
            PlacedTokens{arc.place, {inst.marking.tokens(arc.place)[picks[i]]}, 0});
      }
    }
    for (auto& [place, indices] : by_place) {
      std::sort(indices.rbegin(), indices.rend());
      for (const std::size_t idx : indices) inst.marking.take_at(place, idx);
    }
    trace.append(std::move(ev));
  }

  void produce_side(Instance& inst, const TransitionDef& tdef, const Binding& binding,
                    const std::string& transition_name) {
    TraceEvent ev;
    ev.time = clock;
    ev.net = inst.id;
    ev.transition = transition_name;
    ev.phase = Phase::Produce;
    for (const auto& arc : tdef.outputs) {
      const auto& place = inst.net->def->places[inst.net->place_index.at(arc.place)];
      if (place.kind == PlaceKind::Counter) {
        inst.marking.put_counter(arc.place, arc.weight);
        ev.tokens.push_back(PlacedTokens{arc.place, {}, arc.weight});
      } else {
        Token tok;
        tok.reserve(arc.fields.size());
        for (const auto& field : arc.fields) tok.push_back(field.eval(binding));
        for (std::size_t f = 0; f < tok.size(); ++f) {
          if (!value_matches(tok[f], place.schema[f])) {
            throw EvalError("output token " + to_string(tok) + " does not fit place '" +
                            arc.place + "'");
          }
        }
        ev.tokens.push_back(PlacedTokens{arc.place, {tok}, 0});
        inst.marking.put(arc.place, std::move(tok));
      }
    }
    trace.append(std::move(ev));
  }

  double sample_joint_delay(const Instance& inst, std::size_t transition,
                            const std::optional<ChildPart>& sync) {
    double delay = 0.0;
    if (const auto* dist = inst.net->timing[transition]) {
      const auto d = dist->sample(rng);
      assert(d.has_value());  // never-timed transitions cannot fire
      delay = *d;
    }
    if (sync) {
      const Instance& child = instances[sync->child];
      if (const auto* dist = child.net->timing[sync->transition]) {
        const auto d = dist->sample(rng);
        assert(d.has_value());
        delay = std::max(delay, *d);
      }
    }
    return delay;
  }

  void execute_fire(Simulation& self, InstanceId id, const Candidate& cand,
                    std::optional<double> presampled) {
    Instance& inst = instances[id];
    const auto& tdef = inst.net->def->transitions[cand.transition];
    count_event();
    consume_side(inst, tdef, cand.picks, tdef.name);
    if (cand.sync) {
      Instance& child = instances[cand.sync->child];
      const auto& cdef = child.net->def->transitions[cand.sync->transition];
      consume_side(child, cdef, cand.sync->picks, cdef.name);
    }
    const double delay =
        presampled ? *presampled : sample_joint_delay(inst, cand.transition, cand.sync);

    Scheduled ev;
    ev.time = clock + delay;
    ev.seq = seq++;
    ev.instance = id;
    ev.transition = cand.transition;
    ev.binding = cand.binding;
    ev.sync = cand.sync;
    ev.fired_at = clock;
    fel.push(std::move(ev));
    (void)self;
  }

  void apply_completion(Simulation& self, const Scheduled& ev) {
    Instance& inst = instances[ev.instance];
    const auto& tdef = inst.net->def->transitions[ev.transition];
    produce_side(inst, tdef, ev.binding, tdef.name);
    if (ev.sync) {
      Instance& child = instances[ev.sync->child];
      const auto& cdef = child.net->def->transitions[ev.sync->transition];
      produce_side(child, cdef, ev.sync->binding, cdef.name);
    }
    for (const auto& obs : observers) {
      CompletionInfo info{ev.instance, tdef.name, ev.binding, ev.fired_at, clock};
      obs(self, info);
    }
  }

  // --- scan loop -------------------------------------------------------

  struct FireAction {
    InstanceId instance = 0;
    Candidate candidate;
    std::optional<double> presampled;
  };

  std::optional<FireAction> next_firable(Simulation& self) {
    for (auto& inst : instances) {
      if (!inst.live) continue;
      const auto& transitions = inst.net->def->transitions;
      for (std::size_t t = 0; t < transitions.size(); ++t) {
        const auto& tdef = transitions[t];
        if (tdef.uplink || inst.net->never[t] || inst.net->race_follower[t]) continue;

        if (tdef.race_group) {
          // Race: sample a delay for the first enabled binding of every
          // group member; the smallest sample fires.
          const auto& members = inst.net->race_groups.at(*tdef.race_group);
          std::optional<FireAction> winner;
          for (const std::size_t m : members) {
            if (inst.net->never[m]) continue;
            auto cands = candidates_for(inst, m, /*first_only=*/true);
            if (cands.empty()) continue;
            const double d = sample_joint_delay(inst, m, cands.front().sync);
            if (!winner || d < *winner->presampled) {
              winner = FireAction{inst.id, std::move(cands.front()), d};
            }
          }
          if (winner) return winner;
          continue;
        }

        const auto sel = selectors.find({inst.id, tdef.name});
        if (sel != selectors.end()) {
          auto cands = candidates_for(inst, t, /*first_only=*/false);
          if (cands.empty()) continue;
          std::vector<EnabledBinding> visible;
          visible.reserve(cands.size());
          for (const auto& c : cands) visible.push_back(to_public(inst, c));
          const std::size_t choice = sel->second(self, visible);
          if (choice >= cands.size()) {
            throw std::out_of_range("binding selector returned index " + std::to_string(choice) +
                                    " of " + std::to_string(cands.size()));
          }
          return FireAction{inst.id, std::move(cands[choice]), std::nullopt};
        }

        auto cands = candidates_for(inst, t, /*first_only=*/true);
        if (!cands.empty()) {
          return FireAction{inst.id, std::move(cands.front()), std::nullopt};
        }
      }
    }
    return std::nullopt;
  }

  EnabledBinding to_public(const Instance& inst, const Candidate& c) const {
    EnabledBinding eb;
    eb.transition = inst.net->def->transitions[c.transition].name;
    eb.binding = c.binding;
    if (c.sync) {
      const Instance& child = instances[c.sync->child];
      eb.sync = SyncPart{c.sync->child,
                         child.net->def->transitions[c.sync->transition].name, c.sync->binding};
    }
    return eb;
  }
};

Simulation::Simulation(std::uint64_t seed, Options options)
    : impl_(std::make_unique<Impl>(seed, options)) {}

Simulation::~Simulation() = default;

InstanceId Simulation::build_net(NetDefinition definition, Marking initial_marking) {
  return build_net(std::make_shared<const NetDefinition>(std::move(definition)),
                   std::move(initial_marking));
}

InstanceId Simulation::build_net(std::shared_ptr<const NetDefinition> definition,
                                 Marking initial_marking) {
  auto net = compile(std::move(definition));
  initial_marking.validate_against(*net->def);
  // Net-reference tokens must point at already-built live instances.
  for (const auto& [place, tokens] : initial_marking.tuple_places()) {
    (void)place;
    for (const auto& tok : tokens) {
      for (const auto& v : tok) {
        if (const auto* ref = std::get_if<NetRef>(&v)) {
          if (ref->id >= impl_->instances.size() || !impl_->instances[ref->id].live) {
            throw MarkingError("marking references dead net instance " +
                               std::to_string(ref->id));
          }
        }
      }
    }
  }
  const auto id = static_cast<InstanceId>(impl_->instances.size());
  impl_->instances.push_back(Instance{id, std::move(net), std::move(initial_marking), true});
  return id;
}

const NetDefinition& Simulation::definition(InstanceId id) const {
  return *impl_->at(id).net->def;
}

const Marking& Simulation::marking(InstanceId id) const { return impl_->at(id).marking; }

std::size_t Simulation::instance_count() const { return impl_->instances.size(); }

double Simulation::clock() const { return impl_->clock; }

std::uint64_t Simulation::events_processed() const { return impl_->events; }

Rng& Simulation::rng() { return impl_->rng; }

const Trace& Simulation::trace() const { return impl_->trace; }

std::optional<double> Simulation::next_event_time() {
  auto& im = *impl_;
  while (!im.fel.empty() && im.fel.top().is_callback &&
         !im.callbacks.contains(im.fel.top().callback_id)) {
    im.fel.pop();
  }
  if (im.fel.empty()) return std::nullopt;
  return im.fel.top().time;
}

std::vector<EnabledBinding> Simulation::enabled_bindings(InstanceId id) const {
  const Instance& inst = impl_->at(id);
  std::vector<EnabledBinding> out;
  const auto& transitions = inst.net->def->transitions;
  for (std::size_t t = 0; t < transitions.size(); ++t) {
    if (transitions[t].uplink || inst.net->never[t]) continue;
    for (const auto& c : impl_->candidates_for(inst, t, /*first_only=*/false)) {
      out.push_back(impl_->to_public(inst, c));
    }
  }
  return out;
}

void Simulation::fire(InstanceId id, const EnabledBinding& binding) {
  Instance& inst = impl_->at(id);
  const auto it = inst.net->transition_index.find(binding.transition);
  if (it == inst.net->transition_index.end()) {
    throw NotEnabled("unknown transition '" + binding.transition + "'");
  }
  const std::size_t t = it->second;
  if (inst.net->def->transitions[t].uplink) {
    throw NotEnabled("transition '" + binding.transition +
                     "' is channel-bound and fires through its parent");
  }
  if (inst.net->never[t]) {
    throw NotEnabled("transition '" + binding.transition + "' has a never delay");
  }

  // Re-derive a consumption plan for exactly this binding (and child part).
  std::optional<Candidate> found;
  impl_->enumerate(inst, t, binding.binding,
                   [&](const Binding& b, const Picks& p, const std::optional<ChildPart>& sync) {
                     if (b != binding.binding) return true;
                     if (binding.sync.has_value() != sync.has_value()) return true;
                     if (binding.sync) {
                       const Instance& child = impl_->instances[sync->child];
                       if (binding.sync->child != sync->child ||
                           binding.sync->transition !=
                               child.net->def->transitions[sync->transition].name ||
                           binding.sync->binding != sync->binding) {
                         return true;
                       }
                     }
                     found = Candidate{t, b, p, sync};
                     return false;
                   });
  if (!found) {
    throw NotEnabled("transition '" + binding.transition + "' is not enabled for this binding");
  }
  impl_->execute_fire(*this, id, *found, std::nullopt);
}

RunStatus Simulation::run(StopCondition stop) {
  auto& im = *impl_;
  if (stop.predicate && stop.predicate(*this)) return RunStatus::PredicateMet;
  for (;;) {
    while (auto action = im.next_firable(*this)) {
      im.execute_fire(*this, action->instance, action->candidate, action->presampled);
      if (stop.predicate && stop.predicate(*this)) return RunStatus::PredicateMet;
    }

    // Drop cancelled timers before deciding whether we are quiescent.
    while (!im.fel.empty() && im.fel.top().is_callback &&
           !im.callbacks.contains(im.fel.top().callback_id)) {
      im.fel.pop();
    }
    if (im.fel.empty()) return RunStatus::Quiescent;
    if (stop.at_time && im.fel.top().time > *stop.at_time) {
      im.clock = *stop.at_time;
      return RunStatus::TimeReached;
    }

    const Scheduled ev = im.fel.top();
    im.fel.pop();
    im.clock = ev.time;
    if (ev.is_callback) {
      auto node = im.callbacks.extract(ev.callback_id);
      if (node.empty()) continue;  // cancelled
      im.count_event();
      node.mapped()(*this);
    } else {
      im.count_event();
      im.apply_completion(*this, ev);
    }
    if (stop.predicate && stop.predicate(*this)) return RunStatus::PredicateMet;
  }
}

void Simulation::set_binding_selector(InstanceId id, const std::string& transition,
                                      BindingSelector sel) {
  const Instance& inst = impl_->at(id);
  if (!inst.net->transition_index.contains(transition)) {
    throw StructuralError("selector for unknown transition '" + transition + "'");
  }
  impl_->selectors[{id, transition}] = std::move(sel);
}

void Simulation::on_completion(std::function<void(Simulation&, const CompletionInfo&)> observer) {
  impl_->observers.push_back(std::move(observer));
}

Simulation::TimerId Simulation::schedule_callback(double time, std::string label,
                                                  std::function<void(Simulation&)> fn) {
  const TimerId id = impl_->next_timer++;
  impl_->callbacks[id] = std::move(fn);
  Scheduled ev;
  ev.time = std::max(time, impl_->clock);
  ev.seq = impl_->seq++;
  ev.is_callback = true;
  ev.callback_id = id;
  ev.label = std::move(label);
  impl_->fel.push(std::move(ev));
  return id;
}

void Simulation::cancel_callback(TimerId id) { impl_->callbacks.erase(id); }

void Simulation::inject_tokens(InstanceId id, const std::string& place,
                               std::vector<Token> tokens, const std::string& label) {
  Instance& inst = impl_->at(id);
  const auto it = inst.net->place_index.find(place);
  if (it == inst.net->place_index.end()) {
    throw MarkingError("injection into unknown place '" + place + "'");
  }
  const auto& pdef = inst.net->def->places[it->second];
  if (pdef.kind != PlaceKind::Tuple) {
    throw MarkingError("place '" + place + "' is a counter place; use inject_counter");
  }
  Marking probe;
  for (const auto& tok : tokens) probe.add(place, tok);
  probe.validate_against(*inst.net->def);

  impl_->count_event();
  TraceEvent ev;
  ev.time = impl_->clock;
  ev.net = id;
  ev.transition = label;
  ev.phase = Phase::Produce;
  ev.tokens.push_back(PlacedTokens{place, tokens, 0});
  impl_->trace.append(std::move(ev));
  for (auto& tok : tokens) inst.marking.put(place, std::move(tok));
}

void Simulation::inject_counter(InstanceId id, const std::string& place, std::uint64_t n,
                                const std::string& label) {
  Instance& inst = impl_->at(id);
  const auto it = inst.net->place_index.find(place);
  if (it == inst.net->place_index.end()) {
    throw MarkingError("injection into unknown place '" + place + "'");
  }
  if (inst.net->def->places[it->second].kind != PlaceKind::Counter) {
    throw MarkingError("place '" + place + "' holds tuple tokens; use inject_tokens");
  }
  impl_->count_event();
  TraceEvent ev;
  ev.time = impl_->clock;
  ev.net = id;
  ev.transition = label;
  ev.phase = Phase::Produce;
  ev.tokens.push_back(PlacedTokens{place, {}, n});
  impl_->trace.append(std::move(ev));
  inst.marking.put_counter(place, n);
}

}  // namespace podsim::petri
