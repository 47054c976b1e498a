#include "podsim/stats/measurements.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace podsim::stats {

namespace {

constexpr const char* kHeader = "experiment,n,pods,containers,repetition,metric,value,unit";

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

int parse_int(const std::string& s, const char* what, std::size_t line_no) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw SchemaError("line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
  }
  return v;
}

double parse_double(const std::string& s, const char* what, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw SchemaError("line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
  }
}

std::string trimmed(std::string s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), is_space));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), is_space).base(), s.end());
  return s;
}

}  // namespace

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::DeployTime:
      return "deploy_time_s";
    case Metric::TotalTime:
      return "total_time_s";
    case Metric::ExecTime:
      return "exec_time_s";
    case Metric::Bandwidth:
      return "bandwidth_gb";
    case Metric::StopTime:
      return "stop_time_s";
  }
  return "";
}

Metric parse_metric(const std::string& name) {
  if (name == "deploy_time_s") return Metric::DeployTime;
  if (name == "total_time_s") return Metric::TotalTime;
  if (name == "exec_time_s") return Metric::ExecTime;
  if (name == "bandwidth_gb") return Metric::Bandwidth;
  if (name == "stop_time_s") return Metric::StopTime;
  throw SchemaError("unknown metric '" + name + "'");
}

std::vector<MeasurementSample> load_measurements(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty input, expected header row");
  if (trimmed(line) != kHeader) {
    throw SchemaError("header mismatch: expected '" + std::string(kHeader) + "'");
  }

  std::vector<MeasurementSample> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    const auto fields = split_row(line);
    if (fields.size() != 8) {
      throw SchemaError("line " + std::to_string(line_no) + ": expected 8 fields, got " +
                        std::to_string(fields.size()));
    }
    MeasurementSample s;
    s.experiment = trimmed(fields[0]);
    s.machines = parse_int(trimmed(fields[1]), "n", line_no);
    s.pods = parse_int(trimmed(fields[2]), "pods", line_no);
    s.containers = parse_int(trimmed(fields[3]), "containers", line_no);
    s.repetition = parse_int(trimmed(fields[4]), "repetition", line_no);
    try {
      s.metric = parse_metric(trimmed(fields[5]));
    } catch (const SchemaError& e) {
      throw SchemaError("line " + std::to_string(line_no) + ": " + e.what());
    }
    s.value = parse_double(trimmed(fields[6]), "value", line_no);
    s.unit = trimmed(fields[7]);

    // Normalise to seconds / gigabytes.
    const bool is_bandwidth = s.metric == Metric::Bandwidth;
    if (is_bandwidth) {
      if (s.unit == "gb") {
      } else if (s.unit == "mb") {
        s.value /= 1000.0;
      } else {
        throw SchemaError("line " + std::to_string(line_no) + ": bandwidth unit '" + s.unit +
                          "' (use gb or mb)");
      }
      s.unit = "gb";
    } else {
      if (s.unit == "s") {
      } else if (s.unit == "ms") {
        s.value /= 1000.0;
      } else if (s.unit == "min") {
        s.value *= 60.0;
      } else {
        throw SchemaError("line " + std::to_string(line_no) + ": time unit '" + s.unit +
                          "' (use s, ms or min)");
      }
      s.unit = "s";
    }

    if (s.value < 0.0) {
      throw ValidationError("line " + std::to_string(line_no) + ": negative value");
    }
    if (s.machines < 1 || s.pods < 1 || s.containers < 1) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": counts must be positive");
    }
    if (s.pods > s.containers) {
      throw ValidationError("line " + std::to_string(line_no) + ": " +
                            std::to_string(s.pods) + " pods over " +
                            std::to_string(s.containers) +
                            " containers would mean rho > 1");
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<MeasurementSample> load_measurements_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open measurements file '" + path + "'");
  return load_measurements(in);
}

}  // namespace podsim::stats
