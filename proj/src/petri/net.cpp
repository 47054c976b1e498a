#include "podsim/petri/net.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "podsim/petri/errors.hpp"

namespace podsim::petri {

namespace {

const PlaceDef* find_place(const NetDefinition& def, const std::string& name) {
  for (const auto& p : def.places) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

void check_arc_shape(const NetDefinition& def, const std::string& transition,
                     const std::string& place_name, std::size_t arity, std::uint64_t weight,
                     const char* direction) {
  const PlaceDef* place = find_place(def, place_name);
  if (place == nullptr) {
    throw StructuralError("net '" + def.name + "': transition '" + transition + "' has an " +
                          direction + " arc to unknown place '" + place_name + "'");
  }
  if (weight == 0) {
    throw StructuralError("net '" + def.name + "': zero-weight arc at '" + transition + "'");
  }
  if (place->kind == PlaceKind::Counter) {
    if (arity != 0) {
      throw StructuralError("net '" + def.name + "': counter place '" + place_name +
                            "' cannot carry a token pattern");
    }
  } else {
    if (weight != 1) {
      throw StructuralError("net '" + def.name + "': tuple place '" + place_name +
                            "' only supports weight-1 arcs");
    }
    if (arity != place->schema.size()) {
      throw StructuralError("net '" + def.name + "': arc at '" + transition + "' has arity " +
                            std::to_string(arity) + " but place '" + place_name + "' has " +
                            std::to_string(place->schema.size()) + " fields");
    }
  }
}

}  // namespace

void NetDefinition::validate() const {
  std::unordered_set<std::string> seen;
  for (const auto& p : places) {
    if (!seen.insert(p.name).second) {
      throw StructuralError("net '" + name + "': duplicate place '" + p.name + "'");
    }
    if (p.kind == PlaceKind::Counter && !p.schema.empty()) {
      throw StructuralError("net '" + name + "': counter place '" + p.name + "' has a schema");
    }
  }
  seen.clear();
  for (const auto& t : transitions) {
    if (!seen.insert(t.name).second) {
      throw StructuralError("net '" + name + "': duplicate transition '" + t.name + "'");
    }
  }
  seen.clear();
  for (const auto& c : channels) {
    if (!seen.insert(c).second) {
      throw StructuralError("net '" + name + "': channel '" + c + "' declared twice");
    }
  }

  for (const auto& [transition, dist] : timing) {
    (void)dist;
    if (std::none_of(transitions.begin(), transitions.end(),
                     [&](const TransitionDef& t) { return t.name == transition; })) {
      throw StructuralError("net '" + name + "': timing for unknown transition '" + transition +
                            "'");
    }
  }

  for (const auto& t : transitions) {
    std::set<std::string> bound;
    std::unordered_map<std::string, FieldType> bound_types;
    for (const auto& arc : t.inputs) {
      check_arc_shape(*this, t.name, arc.place, arc.pattern.size(), arc.weight, "input");
      const PlaceDef* place = find_place(*this, arc.place);
      for (std::size_t i = 0; i < arc.pattern.size(); ++i) {
        const auto& pat = arc.pattern[i];
        if (pat.kind == FieldPattern::Kind::Var) {
          bound.insert(pat.var);
          bound_types.emplace(pat.var, place->schema[i]);
        } else if (pat.kind == FieldPattern::Kind::Const &&
                   !value_matches(pat.literal, place->schema[i])) {
          throw StructuralError("net '" + name + "': literal pattern type mismatch at '" +
                                t.name + "' / '" + arc.place + "'");
        }
      }
    }

    if (t.guard) {
      std::set<std::string> used;
      t.guard->collect_vars(used);
      for (const auto& v : used) {
        if (!bound.contains(v)) {
          throw StructuralError("net '" + name + "': guard of '" + t.name +
                                "' references unbound variable '" + v + "'");
        }
      }
    }

    for (const auto& arc : t.outputs) {
      check_arc_shape(*this, t.name, arc.place, arc.fields.size(), arc.weight, "output");
      std::set<std::string> used;
      for (const auto& field : arc.fields) field.collect_vars(used);
      for (const auto& v : used) {
        if (!bound.contains(v)) {
          throw StructuralError("net '" + name + "': output of '" + t.name +
                                "' references unbound variable '" + v + "'");
        }
      }
    }

    if (t.uplink && t.downlink) {
      throw StructuralError("net '" + name + "': transition '" + t.name +
                            "' cannot be both uplink and downlink");
    }
    const auto check_channel = [&](const std::string& label) {
      if (std::find(channels.begin(), channels.end(), label) == channels.end()) {
        throw StructuralError("net '" + name + "': transition '" + t.name +
                              "' references undeclared channel '" + label + "'");
      }
    };
    if (t.uplink) check_channel(*t.uplink);
    if (t.downlink) {
      check_channel(t.downlink->channel);
      const auto it = bound_types.find(t.downlink->token_var);
      if (it == bound_types.end() || it->second != FieldType::Ref) {
        throw StructuralError("net '" + name + "': downlink of '" + t.name +
                              "' must bind a net-reference variable, got '" +
                              t.downlink->token_var + "'");
      }
    }
  }
}

Marking& Marking::add(const std::string& place, Token token) {
  tuples_[place].push_back(std::move(token));
  return *this;
}

Marking& Marking::add_counter(const std::string& place, std::uint64_t n) {
  counters_[place] += n;
  return *this;
}

const std::deque<Token>& Marking::tokens(const std::string& place) const {
  static const std::deque<Token> kEmpty;
  const auto it = tuples_.find(place);
  return it == tuples_.end() ? kEmpty : it->second;
}

std::uint64_t Marking::counter(const std::string& place) const {
  const auto it = counters_.find(place);
  return it == counters_.end() ? 0 : it->second;
}

std::uint64_t Marking::size(const std::string& place) const {
  if (const auto it = tuples_.find(place); it != tuples_.end()) return it->second.size();
  return counter(place);
}

bool Marking::has_place(const std::string& place) const {
  return tuples_.contains(place) || counters_.contains(place);
}

void Marking::validate_against(const NetDefinition& def) const {
  for (const auto& [place_name, toks] : tuples_) {
    const PlaceDef* place = find_place(def, place_name);
    if (place == nullptr) {
      throw MarkingError("marking holds tokens in unknown place '" + place_name + "'");
    }
    if (place->kind != PlaceKind::Tuple) {
      throw MarkingError("place '" + place_name + "' is a counter place; use add_counter");
    }
    for (const auto& tok : toks) {
      if (tok.size() != place->schema.size()) {
        throw MarkingError("token " + to_string(tok) + " has wrong arity for place '" +
                           place_name + "'");
      }
      for (std::size_t i = 0; i < tok.size(); ++i) {
        if (!value_matches(tok[i], place->schema[i])) {
          throw MarkingError("token " + to_string(tok) + " has wrong field type at index " +
                             std::to_string(i) + " for place '" + place_name + "'");
        }
      }
    }
  }
  for (const auto& [place_name, count] : counters_) {
    (void)count;
    const PlaceDef* place = find_place(def, place_name);
    if (place == nullptr) {
      throw MarkingError("marking holds tokens in unknown place '" + place_name + "'");
    }
    if (place->kind != PlaceKind::Counter) {
      throw MarkingError("place '" + place_name + "' holds tuple tokens, not a count");
    }
  }
}

Token Marking::take_at(const std::string& place, std::size_t index) {
  auto& q = tuples_.at(place);
  Token tok = std::move(q[index]);
  q.erase(q.begin() + static_cast<std::ptrdiff_t>(index));
  return tok;
}

void Marking::take_counter(const std::string& place, std::uint64_t n) {
  auto& c = counters_.at(place);
  if (c < n) throw NotEnabled("counter underflow at place '" + place + "'");
  c -= n;
}

void Marking::put(const std::string& place, Token token) {
  tuples_[place].push_back(std::move(token));
}

void Marking::put_counter(const std::string& place, std::uint64_t n) { counters_[place] += n; }

}  // namespace podsim::petri
