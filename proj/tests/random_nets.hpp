#pragma once

// Randomised small-net generator plus invariant checkers shared by the unit
// and acceptance suites.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "podsim/petri/net.hpp"
#include "podsim/petri/simulation.hpp"
#include "podsim/petri/trace.hpp"

namespace podsim::testing {

struct RandomNet {
  petri::NetDefinition def;
  petri::Marking marking;
};

/// Builds a random net with counter places only: up to `max_places` places
/// and `max_transitions` transitions, random arcs and weights, random
/// constant/exponential/empirical timings.
inline RandomNet make_random_net(std::mt19937_64& gen, int max_places = 6,
                                 int max_transitions = 6) {
  std::uniform_int_distribution<int> place_count(1, max_places);
  std::uniform_int_distribution<int> trans_count(1, max_transitions);
  const int n_places = place_count(gen);
  const int n_trans = trans_count(gen);

  RandomNet out;
  out.def.name = "random";
  for (int p = 0; p < n_places; ++p) {
    out.def.places.push_back(petri::PlaceDef::counter("p" + std::to_string(p)));
  }
  std::uniform_int_distribution<int> pick_place(0, n_places - 1);
  std::uniform_int_distribution<int> arc_count(1, 2);
  std::uniform_int_distribution<int> out_count(0, 2);
  std::uniform_int_distribution<std::uint64_t> weight(1, 2);
  std::uniform_int_distribution<int> timing_kind(0, 2);
  std::uniform_real_distribution<double> delay(0.0, 1.0);

  for (int t = 0; t < n_trans; ++t) {
    petri::TransitionDef td;
    td.name = "t" + std::to_string(t);
    const int n_in = arc_count(gen);
    for (int a = 0; a < n_in; ++a) {
      td.inputs.push_back(
          petri::ArcIn{"p" + std::to_string(pick_place(gen)), {}, weight(gen)});
    }
    const int n_out = out_count(gen);
    for (int a = 0; a < n_out; ++a) {
      td.outputs.push_back(
          petri::ArcOut{"p" + std::to_string(pick_place(gen)), {}, weight(gen)});
    }
    switch (timing_kind(gen)) {
      case 0:
        out.def.timing.emplace(td.name, petri::DelayDistribution::constant(delay(gen)));
        break;
      case 1:
        out.def.timing.emplace(td.name, petri::DelayDistribution::exponential(2.0));
        break;
      default:
        out.def.timing.emplace(
            td.name, petri::DelayDistribution::empirical({delay(gen), delay(gen)}));
        break;
    }
    out.def.transitions.push_back(std::move(td));
  }

  std::uniform_int_distribution<std::uint64_t> initial(0, 3);
  for (int p = 0; p < n_places; ++p) {
    const auto n = initial(gen);
    if (n > 0) out.marking.add_counter("p" + std::to_string(p), n);
  }
  return out;
}

/// Replays consume/produce deltas from the trace over the initial marking
/// and compares against the final marking, per place.
inline bool conserves_tokens(const petri::Marking& initial, const petri::Trace& trace,
                             const petri::Marking& final_marking,
                             const petri::NetDefinition& def, petri::InstanceId net_id) {
  std::map<std::string, std::int64_t> count;
  for (const auto& place : def.places) {
    count[place.name] = static_cast<std::int64_t>(initial.size(place.name));
  }
  for (const auto& ev : trace.events()) {
    if (ev.net != net_id) continue;
    for (const auto& pt : ev.tokens) {
      const auto moved =
          static_cast<std::int64_t>(pt.tokens.empty() ? pt.count : pt.tokens.size());
      count[pt.place] += ev.phase == petri::Phase::Produce ? moved : -moved;
      if (count[pt.place] < 0) return false;
    }
  }
  // Holds even with in-flight firings: their tokens were consumed and the
  // matching produce never entered the trace or the marking.
  for (const auto& place : def.places) {
    const auto settled = static_cast<std::int64_t>(final_marking.size(place.name));
    if (count[place.name] != settled) return false;
  }
  return true;
}

inline bool clock_monotone(const petri::Trace& trace) {
  double last = 0.0;
  for (const auto& ev : trace.events()) {
    if (ev.time < last) return false;
    last = ev.time;
  }
  return true;
}

}  // namespace podsim::testing
