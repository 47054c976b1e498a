#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "podsim/petri/distribution.hpp"
#include "podsim/petri/expr.hpp"
#include "podsim/petri/value.hpp"

namespace podsim::petri {

enum class PlaceKind {
  Tuple,    // FIFO multiset of typed tuple tokens (fields may be net refs)
  Counter,  // non-negative count of indistinct tokens
};

struct PlaceDef {
  std::string name;
  PlaceKind kind = PlaceKind::Tuple;
  std::vector<FieldType> schema;  // empty for Counter

  static PlaceDef tuple(std::string name, std::vector<FieldType> schema) {
    return PlaceDef{std::move(name), PlaceKind::Tuple, std::move(schema)};
  }
  static PlaceDef counter(std::string name) {
    return PlaceDef{std::move(name), PlaceKind::Counter, {}};
  }
};

/// Input-arc field pattern: binds a variable, matches a literal, or ignores.
struct FieldPattern {
  enum class Kind { Var, Const, Any };
  Kind kind = Kind::Any;
  std::string var;
  Value literal{};

  static FieldPattern bind(std::string name) { return {Kind::Var, std::move(name), {}}; }
  static FieldPattern match(Value v) { return {Kind::Const, {}, std::move(v)}; }
  static FieldPattern any() { return {}; }
};

struct ArcIn {
  std::string place;
  std::vector<FieldPattern> pattern;  // arity == place schema; empty for Counter
  std::uint64_t weight = 1;           // > 1 allowed on Counter places only
};

struct ArcOut {
  std::string place;
  std::vector<Expr> fields;  // arity == place schema; empty for Counter
  std::uint64_t weight = 1;  // > 1 allowed on Counter places only
};

struct TransitionDef {
  std::string name;
  std::vector<ArcIn> inputs;
  std::vector<ArcOut> outputs;
  std::optional<Expr> guard;  // over variables bound by `inputs`

  /// Child side of a synchronization channel. A transition carrying an
  /// uplink never fires autonomously; it fires jointly with a parent
  /// transition whose downlink names the same channel.
  std::optional<std::string> uplink;

  /// Parent side: `token_var` must be bound to a net-reference field by an
  /// input arc; the referenced child must offer an enabled uplink on
  /// `channel` for this transition to be enabled.
  struct Downlink {
    std::string token_var;
    std::string channel;
  };
  std::optional<Downlink> downlink;

  /// Transitions sharing a race group compete by sampled delay: when several
  /// are enabled at once the smallest sample fires (ties by declaration
  /// order). Members whose timing is `never` always lose.
  std::optional<std::string> race_group;
};

struct NetDefinition {
  std::string name;
  std::vector<PlaceDef> places;
  std::vector<TransitionDef> transitions;
  std::vector<std::string> channels;               // declared labels, unique
  std::map<std::string, DelayDistribution> timing;  // transition -> delay; absent means immediate

  /// Throws StructuralError when any structural invariant is violated.
  void validate() const;
};

/// Token distribution over the places of one net instance.
class Marking {
 public:
  Marking& add(const std::string& place, Token token);
  Marking& add_counter(const std::string& place, std::uint64_t n);

  const std::deque<Token>& tokens(const std::string& place) const;
  std::uint64_t counter(const std::string& place) const;
  /// Token count for tuple places, counter value for counter places.
  std::uint64_t size(const std::string& place) const;
  bool has_place(const std::string& place) const;

  /// Checked against a definition when a net is built.
  void validate_against(const NetDefinition& def) const;

  // Engine-side mutation helpers.
  Token take_at(const std::string& place, std::size_t index);
  void take_counter(const std::string& place, std::uint64_t n);
  void put(const std::string& place, Token token);
  void put_counter(const std::string& place, std::uint64_t n);

  const std::map<std::string, std::deque<Token>>& tuple_places() const { return tuples_; }
  const std::map<std::string, std::uint64_t>& counter_places() const { return counters_; }

 private:
  std::map<std::string, std::deque<Token>> tuples_;
  std::map<std::string, std::uint64_t> counters_;
};

}  // namespace podsim::petri
