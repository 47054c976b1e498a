#include "podsim/petri/trace.hpp"

#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

namespace podsim::petri {

namespace {

nlohmann::ordered_json value_to_json(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return nlohmann::ordered_json{{"net", std::get<NetRef>(v).id}};
}

}  // namespace

std::string to_json_line(const TraceEvent& ev) {
  nlohmann::ordered_json rec;
  rec["time"] = ev.time;
  rec["net_instance_id"] = ev.net;
  rec["transition"] = ev.transition;
  rec["phase"] = ev.phase == Phase::Consume ? "consume" : "produce";
  auto tokens = nlohmann::ordered_json::array();
  for (const auto& pt : ev.tokens) {
    nlohmann::ordered_json entry;
    entry["place"] = pt.place;
    if (pt.tokens.empty()) {
      entry["count"] = pt.count;
    } else {
      auto values = nlohmann::ordered_json::array();
      for (const auto& tok : pt.tokens) {
        auto fields = nlohmann::ordered_json::array();
        for (const auto& v : tok) fields.push_back(value_to_json(v));
        values.push_back(std::move(fields));
      }
      entry["values"] = std::move(values);
    }
    tokens.push_back(std::move(entry));
  }
  rec["tokens"] = std::move(tokens);
  return rec.dump();
}

void Trace::write_ndjson(std::ostream& out) const {
  for (const auto& ev : events_) out << to_json_line(ev) << '\n';
}

std::string Trace::to_ndjson() const {
  std::ostringstream out;
  write_ndjson(out);
  return out.str();
}

}  // namespace podsim::petri
