#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace podsim::petri {

using InstanceId = std::uint32_t;

/// Handle to a child net instance living inside the same simulation.
struct NetRef {
  InstanceId id = 0;
  friend bool operator==(const NetRef&, const NetRef&) = default;
  friend auto operator<=>(const NetRef&, const NetRef&) = default;
};

/// One field of a token.
using Value = std::variant<std::int64_t, double, std::string, NetRef>;

/// A token is a tuple of fields. Counter places use indistinct tokens and
/// never materialise Token objects.
using Token = std::vector<Value>;

enum class FieldType { Int, Real, Str, Ref };

/// Variables bound by a transition's input arcs, by name.
using Binding = std::map<std::string, Value>;

bool value_matches(const Value& v, FieldType t);
std::string to_string(const Value& v);
std::string to_string(const Token& t);

}  // namespace podsim::petri
