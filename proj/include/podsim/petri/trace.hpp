#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "podsim/petri/value.hpp"

namespace podsim::petri {

enum class Phase { Consume, Produce };

/// Tokens moved at one place by one event. Counter places report `count`
/// and leave `tokens` empty.
struct PlacedTokens {
  std::string place;
  std::vector<Token> tokens;
  std::uint64_t count = 0;
};

struct TraceEvent {
  double time = 0.0;
  InstanceId net = 0;
  std::string transition;
  Phase phase = Phase::Consume;
  std::vector<PlacedTokens> tokens;
};

/// Append-only event log. A channel-synchronized firing contributes two
/// adjacent records per phase (parent first, then child); the engine never
/// interleaves another event between them.
class Trace {
 public:
  void append(TraceEvent ev) { events_.push_back(std::move(ev)); }

  const std::vector<TraceEvent>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  /// Newline-delimited JSON records:
  /// {time, net_instance_id, transition, phase, tokens}.
  void write_ndjson(std::ostream& out) const;
  std::string to_ndjson() const;

 private:
  std::vector<TraceEvent> events_;
};

std::string to_json_line(const TraceEvent& ev);

}  // namespace podsim::petri
