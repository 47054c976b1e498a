#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "podsim/stats/measurements.hpp"
#include "podsim/stats/stats.hpp"

namespace podsim::stats {

struct EmptyTable : std::runtime_error {
  explicit EmptyTable(const std::string& what) : std::runtime_error(what) {}
};

/// The table cannot answer a query (outside any grid cell with data).
struct MissingCalibration : std::runtime_error {
  explicit MissingCalibration(const std::string& what) : std::runtime_error(what) {}
};

struct CalibrationPoint {
  double rho = 1.0;
  int machines = 1;    // n
  int containers = 1;  // C
  double tc_s = 0.0;   // time to create a single container
};

/// Per-container creation times on a (rho, n, C) grid with an asymptotic
/// constant for large C. Queries interpolate multilinearly inside the grid,
/// clamp rho and n outside it, and return the asymptote beyond the largest
/// calibrated C.
class CalibrationTable {
 public:
  static CalibrationTable from_points(std::vector<CalibrationPoint> points,
                                      std::optional<double> asymptote = std::nullopt);

  bool empty() const { return points_.empty(); }
  const std::vector<CalibrationPoint>& points() const { return points_; }
  double asymptote_tc() const;

  /// Throws EmptyTable on an empty table and MissingCalibration when the
  /// surrounding grid cell has no data.
  double interpolate(double rho, double machines, double containers) const;

 private:
  std::vector<CalibrationPoint> points_;
  double asymptote_ = 0.0;
  // Rectilinear grid derived from the points.
  std::vector<double> rho_axis_;
  std::vector<double> n_axis_;
  std::vector<double> c_axis_;
  std::map<std::tuple<double, double, double>, double> cells_;
};

struct OverheadPoint {
  double rho = 1.0;
  double alpha = 1.0;
};

/// Pod-abstraction overhead factor per rho. By definition the factor is
/// exactly 1 at rho = 1; between calibrated points it interpolates linearly
/// and outside them it clamps.
class OverheadTable {
 public:
  OverheadTable() = default;
  static OverheadTable from_points(std::vector<OverheadPoint> points);

  bool empty() const { return points_.empty(); }
  const std::vector<OverheadPoint>& points() const { return points_; }
  double at(double rho) const;

 private:
  std::vector<OverheadPoint> points_;
};

struct CalibrationResult {
  CalibrationTable tc;
  OverheadTable alpha;
};

/// Builds both tables from raw measurements: deployment times inverted to
/// per-container creation times per (rho, n, C) group, and execution or
/// bandwidth overheads ratioed against the rho = 1 groups at matching
/// (n, C). Throws InsufficientData when no creation time can be derived.
CalibrationResult calibrate(const std::vector<MeasurementSample>& samples);

}  // namespace podsim::stats
