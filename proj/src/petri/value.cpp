#include "podsim/petri/value.hpp"

#include <sstream>

namespace podsim::petri {

bool value_matches(const Value& v, FieldType t) {
  switch (t) {
    case FieldType::Int:
      return std::holds_alternative<std::int64_t>(v);
    case FieldType::Real:
      return std::holds_alternative<double>(v);
    case FieldType::Str:
      return std::holds_alternative<std::string>(v);
    case FieldType::Ref:
      return std::holds_alternative<NetRef>(v);
  }
  return false;
}

std::string to_string(const Value& v) {
  std::ostringstream out;
  if (const auto* i = std::get_if<std::int64_t>(&v)) {
    out << *i;
  } else if (const auto* d = std::get_if<double>(&v)) {
    out << *d;
  } else if (const auto* s = std::get_if<std::string>(&v)) {
    out << '"' << *s << '"';
  } else {
    out << "net#" << std::get<NetRef>(v).id;
  }
  return out.str();
}

std::string to_string(const Token& t) {
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_string(t[i]);
  }
  out += ")";
  return out;
}

}  // namespace podsim::petri
