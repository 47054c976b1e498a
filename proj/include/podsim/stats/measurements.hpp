#pragma once

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace podsim::stats {

struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

/// A row violates a value invariant (negative value, pods > containers, ...).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

enum class Metric { DeployTime, TotalTime, ExecTime, Bandwidth, StopTime };

std::string metric_name(Metric m);
Metric parse_metric(const std::string& name);

/// One experiment observation. Values are normalised to seconds (times) or
/// gigabytes (bandwidth) on load.
struct MeasurementSample {
  std::string experiment;
  int machines = 0;    // n
  int pods = 0;        // #Pods
  int containers = 0;  // C
  int repetition = 0;
  Metric metric = Metric::DeployTime;
  double value = 0.0;
  std::string unit;  // unit after normalisation: "s" or "gb"

  double rho() const { return static_cast<double>(pods) / containers; }
};

/// Parses the measurement CSV. Exact header:
/// experiment,n,pods,containers,repetition,metric,value,unit
/// Accepted units: s, ms, min (times); gb, mb (bandwidth).
std::vector<MeasurementSample> load_measurements(std::istream& in);
std::vector<MeasurementSample> load_measurements_file(const std::string& path);

}  // namespace podsim::stats
