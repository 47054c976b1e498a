#include "podsim/stats/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

namespace podsim::stats {

namespace {

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Bracketing indices and interpolation weight along one axis, after clamping.
struct AxisPos {
  std::size_t lo = 0;
  std::size_t hi = 0;
  double w = 0.0;  // weight of hi
};

AxisPos locate(const std::vector<double>& axis, double x) {
  AxisPos p;
  if (x <= axis.front()) return p;
  if (x >= axis.back()) {
    p.lo = p.hi = axis.size() - 1;
    return p;
  }
  const auto it = std::upper_bound(axis.begin(), axis.end(), x);
  p.hi = static_cast<std::size_t>(it - axis.begin());
  p.lo = p.hi - 1;
  const double span = axis[p.hi] - axis[p.lo];
  p.w = span == 0.0 ? 0.0 : (x - axis[p.lo]) / span;
  if (p.w == 0.0) p.hi = p.lo;
  return p;
}

}  // namespace

CalibrationTable CalibrationTable::from_points(std::vector<CalibrationPoint> points,
                                               std::optional<double> asymptote) {
  CalibrationTable t;
  for (const auto& p : points) {
    if (!(p.tc_s > 0.0)) {
      throw ValidationError("calibration entries must have positive creation times");
    }
  }
  t.points_ = std::move(points);
  if (asymptote) {
    t.asymptote_ = *asymptote;
  } else if (!t.points_.empty()) {
    // Largest-C entry; ties broken towards small rho then large n, following
    // the limit the asymptote stands for.
    const auto best = std::max_element(
        t.points_.begin(), t.points_.end(),
        [](const CalibrationPoint& a, const CalibrationPoint& b) {
          return std::tuple(a.containers, -a.rho, a.machines) <
                 std::tuple(b.containers, -b.rho, b.machines);
        });
    t.asymptote_ = best->tc_s;
  }
  for (const auto& p : t.points_) {
    t.rho_axis_.push_back(p.rho);
    t.n_axis_.push_back(p.machines);
    t.c_axis_.push_back(p.containers);
    t.cells_[{p.rho, static_cast<double>(p.machines), static_cast<double>(p.containers)}] =
        p.tc_s;
  }
  t.rho_axis_ = sorted_unique(std::move(t.rho_axis_));
  t.n_axis_ = sorted_unique(std::move(t.n_axis_));
  t.c_axis_ = sorted_unique(std::move(t.c_axis_));
  return t;
}

double CalibrationTable::asymptote_tc() const {
  if (points_.empty()) throw EmptyTable("calibration table is empty");
  return asymptote_;
}

double CalibrationTable::interpolate(double rho, double machines, double containers) const {
  if (points_.empty()) throw EmptyTable("calibration table is empty");
  if (containers > c_axis_.back()) return asymptote_;

  const AxisPos pr = locate(rho_axis_, rho);
  const AxisPos pn = locate(n_axis_, machines);
  const AxisPos pc = locate(c_axis_, containers);

  double value = 0.0;
  for (const auto [ri, rw] : {std::pair{pr.lo, 1.0 - pr.w}, std::pair{pr.hi, pr.w}}) {
    if (rw == 0.0) continue;
    for (const auto [ni, nw] : {std::pair{pn.lo, 1.0 - pn.w}, std::pair{pn.hi, pn.w}}) {
      if (nw == 0.0) continue;
      for (const auto [ci, cw] : {std::pair{pc.lo, 1.0 - pc.w}, std::pair{pc.hi, pc.w}}) {
        if (cw == 0.0) continue;
        const auto it = cells_.find({rho_axis_[ri], n_axis_[ni], c_axis_[ci]});
        if (it == cells_.end()) {
          throw MissingCalibration(
              "no calibration entry at rho=" + std::to_string(rho_axis_[ri]) +
              ", n=" + std::to_string(n_axis_[ni]) + ", C=" + std::to_string(c_axis_[ci]));
        }
        value += rw * nw * cw * it->second;
      }
    }
  }
  return value;
}

OverheadTable OverheadTable::from_points(std::vector<OverheadPoint> points) {
  OverheadTable t;
  for (const auto& p : points) {
    if (!(p.alpha > 0.0)) throw ValidationError("overhead factors must be positive");
  }
  // The factor is 1 at rho = 1 by definition; any supplied entry there is
  // replaced.
  std::erase_if(points, [](const OverheadPoint& p) { return p.rho == 1.0; });
  points.push_back(OverheadPoint{1.0, 1.0});
  std::sort(points.begin(), points.end(),
            [](const OverheadPoint& a, const OverheadPoint& b) { return a.rho < b.rho; });
  t.points_ = std::move(points);
  return t;
}

double OverheadTable::at(double rho) const {
  if (rho == 1.0) return 1.0;
  if (points_.empty()) throw EmptyTable("overhead table is empty");
  if (rho <= points_.front().rho) return points_.front().alpha;
  if (rho >= points_.back().rho) return points_.back().alpha;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (rho <= points_[i].rho) {
      const auto& a = points_[i - 1];
      const auto& b = points_[i];
      const double w = (rho - a.rho) / (b.rho - a.rho);
      return a.alpha + w * (b.alpha - a.alpha);
    }
  }
  return points_.back().alpha;
}

CalibrationResult calibrate(const std::vector<MeasurementSample>& samples) {
  struct Group {
    double sum = 0.0;
    std::size_t count = 0;
    double mean() const { return sum / static_cast<double>(count); }
  };
  using Key = std::tuple<int, int, int>;  // (pods, machines, containers)
  std::map<Key, Group> deploy;
  std::map<Key, Group> exec;
  std::map<Key, Group> bandwidth;

  for (const auto& s : samples) {
    const Key key{s.pods, s.machines, s.containers};
    switch (s.metric) {
      case Metric::DeployTime: {
        auto& g = deploy[key];
        g.sum += s.value;
        g.count += 1;
        break;
      }
      case Metric::ExecTime: {
        auto& g = exec[key];
        g.sum += s.value;
        g.count += 1;
        break;
      }
      case Metric::Bandwidth: {
        auto& g = bandwidth[key];
        g.sum += s.value;
        g.count += 1;
        break;
      }
      default:
        break;
    }
  }

  std::vector<CalibrationPoint> tc_points;
  for (const auto& [key, group] : deploy) {
    const auto [pods, machines, containers] = key;
    CalibrationPoint p;
    p.rho = static_cast<double>(pods) / containers;
    p.machines = machines;
    p.containers = containers;
    p.tc_s = container_time_from_deploy(group.mean(), containers, pods, machines);
    tc_points.push_back(p);
  }
  if (tc_points.empty()) {
    throw InsufficientData("no deploy_time_s rows to calibrate from");
  }

  // Overhead per rho: evaluated groups against the rho = 1 group at the same
  // (n, C). Execution times ratio directly, bandwidths flip.
  std::map<double, std::pair<double, int>> alpha_acc;
  const auto fold = [&](const std::map<Key, Group>& groups, bool is_bandwidth) {
    for (const auto& [key, group] : groups) {
      const auto [pods, machines, containers] = key;
      if (pods == containers) continue;
      const auto base = groups.find(Key{containers, machines, containers});
      if (base == groups.end()) continue;
      const double ratio = is_bandwidth ? base->second.mean() / group.mean()
                                        : group.mean() / base->second.mean();
      auto& acc = alpha_acc[static_cast<double>(pods) / containers];
      acc.first += ratio;
      acc.second += 1;
    }
  };
  fold(exec, false);
  fold(bandwidth, true);

  std::vector<OverheadPoint> alpha_points;
  for (const auto& [rho, acc] : alpha_acc) {
    alpha_points.push_back(OverheadPoint{rho, acc.first / acc.second});
  }

  CalibrationResult out;
  out.tc = CalibrationTable::from_points(std::move(tc_points));
  out.alpha = OverheadTable::from_points(std::move(alpha_points));
  return out;
}

}  // namespace podsim::stats
