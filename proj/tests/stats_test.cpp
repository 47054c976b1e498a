#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "podsim/stats/calibration.hpp"
#include "podsim/stats/measurements.hpp"
#include "podsim/stats/stats.hpp"

using namespace podsim::stats;

namespace {

// N values with exactly the requested sample mean and standard deviation:
// a fixed zero-mean/unit-std pattern scaled and shifted.
std::vector<double> synthesize(double mean, double stddev, std::size_t n) {
  std::vector<double> base(n);
  for (std::size_t i = 0; i < n; ++i) base[i] = static_cast<double>(i);
  const double m = (n - 1) / 2.0;
  double sq = 0.0;
  for (auto& v : base) {
    v -= m;
    sq += v * v;
  }
  const double s = std::sqrt(sq / (n - 1));
  for (auto& v : base) v = mean + stddev * v / s;
  return base;
}

SummaryStats stats_of(double mean, double stddev, std::size_t n = 30,
                      std::string metric = "exec_time_s") {
  return summarize(synthesize(mean, stddev, n), 0.05, std::move(metric));
}

}  // namespace

TEST_CASE("summarize: constant sample") {
  const std::vector<double> values{5, 5, 5, 5};
  const auto s = summarize(values);
  CHECK(s.mean == 5.0);
  CHECK(s.stddev == 0.0);
  CHECK(s.ci_low == 5.0);
  CHECK(s.ci_high == 5.0);
  CHECK(s.count == 4);
}

TEST_CASE("summarize: confidence half-width uses the normal quantile") {
  const auto s = stats_of(123.47, 0.43);
  CHECK(s.mean == doctest::Approx(123.47));
  CHECK(s.stddev == doctest::Approx(0.43));
  const double half = (s.ci_high - s.ci_low) / 2.0;
  // 1.95996 * 0.43 / sqrt(30)
  CHECK(half == doctest::Approx(0.1539).epsilon(1e-3));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.95996).epsilon(1e-5));
}

TEST_CASE("summarize: a single value is insufficient") {
  const std::vector<double> one{42.0};
  CHECK_THROWS_AS(summarize(one), InsufficientData);
}

TEST_CASE("pooled t test accepts when the cpu benchmark means are close") {
  // 30-rep execution summaries, one container per scenario.
  const auto d = pooled_t_test(stats_of(123.47, 0.43), stats_of(123.38, 0.39));
  CHECK(d.t_statistic == doctest::Approx(0.849).epsilon(1e-3));
  CHECK(d.degrees_of_freedom == 58);
  CHECK(d.critical_value == doctest::Approx(2.0017).epsilon(1e-4));
  CHECK_FALSE(d.reject_h0);
}

TEST_CASE("pooled t test rejects on the io benchmark four-container row") {
  const auto d = pooled_t_test(stats_of(60.85, 1.45), stats_of(65.02, 1.25));
  CHECK(d.t_statistic == doctest::Approx(-11.93).epsilon(1e-3));
  CHECK(d.reject_h0);
}

TEST_CASE("pooled t test on identical summaries is exactly zero") {
  const auto s = stats_of(50.0, 2.0);
  const auto d = pooled_t_test(s, s);
  CHECK(d.t_statistic == 0.0);
  CHECK_FALSE(d.reject_h0);
}

TEST_CASE("t test properties: antisymmetry and scale equivariance") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> mean_d(1.0, 200.0);
  std::uniform_real_distribution<double> std_d(0.1, 10.0);
  std::uniform_real_distribution<double> scale_d(0.1, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const auto a = stats_of(mean_d(gen), std_d(gen));
    const auto b = stats_of(mean_d(gen), std_d(gen));
    const auto ab = pooled_t_test(a, b);
    const auto ba = pooled_t_test(b, a);
    CHECK(ab.t_statistic == doctest::Approx(-ba.t_statistic).epsilon(1e-9));
    CHECK(ab.reject_h0 == ba.reject_h0);

    const double k = scale_d(gen);
    auto sa = a;
    auto sb = b;
    sa.mean *= k;
    sa.stddev *= k;
    sb.mean *= k;
    sb.stddev *= k;
    const auto scaled = pooled_t_test(sa, sb);
    CHECK(scaled.t_statistic == doctest::Approx(ab.t_statistic).epsilon(1e-9));
  }
}

TEST_CASE("confidence interval coverage is near the nominal level") {
  std::mt19937_64 gen(12345);
  std::normal_distribution<double> normal(3.0, 2.0);
  const int trials = 1000;
  int covered = 0;
  std::vector<double> sample(30);
  for (int t = 0; t < trials; ++t) {
    for (auto& v : sample) v = normal(gen);
    const auto s = summarize(sample);
    if (s.ci_low <= 3.0 && 3.0 <= s.ci_high) ++covered;
  }
  CHECK(covered >= 920);
  CHECK(covered <= 980);
}

TEST_CASE("bandwidth per container") {
  CHECK(avg_bandwidth_per_container(8.61, 4) == doctest::Approx(2.15).epsilon(2e-3));
  CHECK(avg_bandwidth_per_container(7.5, 1) == 7.5);
  CHECK(avg_bandwidth_per_container(15.10, 20) == doctest::Approx(0.755));
}

TEST_CASE("deployment time prediction and inversion") {
  CHECK(predict_deploy_time(40, 40, 8, 2.048) == doctest::Approx(10.24).epsilon(1e-12));
  CHECK(predict_deploy_time(1, 1, 8, 1.7) == doctest::Approx(1.7));
  // Predicted 5.12 sits within 11% of the measured 5.69.
  const double predicted = predict_deploy_time(20, 20, 8, 2.048);
  CHECK(predicted == doctest::Approx(5.12));
  CHECK(std::abs(predicted - 5.69) / 5.69 < 0.11);

  CHECK(container_time_from_deploy(10.24, 40, 40, 8) == doctest::Approx(2.048));
  CHECK(container_time_from_deploy(1.85, 1, 1, 8) == doctest::Approx(1.85));
}

TEST_CASE("prediction round-trips exactly through inversion") {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> count(1, 64);
  std::uniform_real_distribution<double> tc(0.01, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const int c = count(gen);
    const int pods = std::uniform_int_distribution<int>(1, c)(gen);
    const int n = count(gen);
    const double t = tc(gen);
    const double td = predict_deploy_time(c, pods, n, t);
    CHECK(container_time_from_deploy(td, c, pods, n) == doctest::Approx(t).epsilon(1e-12));
  }
}

TEST_CASE("linear in containers once pods saturate the machines") {
  const double one = predict_deploy_time(20, 20, 8, 2.048);
  const double two = predict_deploy_time(40, 40, 8, 2.048);
  CHECK(two == doctest::Approx(2.0 * one));
}

TEST_CASE("total provisioning time is deployment plus download") {
  CHECK(total_provisioning_time(1.85, 29.24) == doctest::Approx(31.09));
  CHECK(total_provisioning_time(5.0, 0.0) == 5.0);
  CHECK(total_provisioning_time(10.24, 75.23) == doctest::Approx(85.47));
}

TEST_CASE("pod abstraction overhead factor") {
  const auto base = stats_of(100.0, 1.0);
  CHECK(overhead_alpha(base, base) == 1.0);
  CHECK(overhead_alpha(stats_of(101.0, 1.0), base) == doctest::Approx(1.01));
  CHECK_THROWS_AS(overhead_alpha(stats_of(10.0, 1.0, 30, "bandwidth_gb"), base),
                  UnitMismatch);
  // Network rows ratio as transfer time: baseline bandwidth over evaluated.
  const auto grouped = stats_of(124.74, 1.22, 30, "bandwidth_mb");
  const auto isolated = stats_of(126.52, 2.09, 30, "bandwidth_mb");
  CHECK(overhead_alpha_from_bandwidth(grouped, isolated) ==
        doctest::Approx(1.0143).epsilon(1e-3));
}

TEST_CASE("calibration table lookup, interpolation and asymptote") {
  std::vector<CalibrationPoint> points{
      {1.0, 8, 8, 2.2},
      {1.0, 8, 16, 2.0},
      {1.0, 8, 40, 3.0},
  };
  const auto table = CalibrationTable::from_points(points);
  CHECK(table.interpolate(1.0, 8, 16) == doctest::Approx(2.0));
  // Midway between the C=16 and C=40 entries.
  CHECK(table.interpolate(1.0, 8, 28) == doctest::Approx(2.5));
  // Beyond the largest calibrated C the asymptote answers.
  CHECK(table.asymptote_tc() == doctest::Approx(3.0));
  CHECK(table.interpolate(1.0, 8, 400) == doctest::Approx(3.0));
  // rho and n clamp to the grid.
  CHECK(table.interpolate(0.5, 4, 8) == doctest::Approx(2.2));

  CHECK_THROWS_AS(CalibrationTable::from_points({}).interpolate(1, 1, 1), EmptyTable);
}

TEST_CASE("overhead table interpolates and pins alpha(1) to one") {
  const auto table = OverheadTable::from_points({{0.2, 1.02}, {0.5, 1.008}});
  CHECK(table.at(1.0) == 1.0);
  CHECK(table.at(0.2) == doctest::Approx(1.02));
  CHECK(table.at(0.1) == doctest::Approx(1.02));  // clamp
  CHECK(table.at(0.35) == doctest::Approx(1.014));
  CHECK(table.at(0.75) == doctest::Approx(1.004));
}

TEST_CASE("measurement csv: empty body, schema and validation errors") {
  std::istringstream empty("experiment,n,pods,containers,repetition,metric,value,unit\n");
  CHECK(load_measurements(empty).empty());

  std::istringstream bad_header("a,b\n");
  CHECK_THROWS_AS(load_measurements(bad_header), SchemaError);

  std::istringstream rho_above_one(
      "experiment,n,pods,containers,repetition,metric,value,unit\n"
      "x,8,5,4,0,deploy_time_s,1.0,s\n");
  CHECK_THROWS_AS(load_measurements(rho_above_one), ValidationError);

  std::istringstream negative(
      "experiment,n,pods,containers,repetition,metric,value,unit\n"
      "x,8,4,4,0,deploy_time_s,-1.0,s\n");
  CHECK_THROWS_AS(load_measurements(negative), ValidationError);

  std::istringstream bad_metric(
      "experiment,n,pods,containers,repetition,metric,value,unit\n"
      "x,8,4,4,0,nope,1.0,s\n");
  CHECK_THROWS_AS(load_measurements(bad_metric), SchemaError);
}

TEST_CASE("measurement csv: unit normalisation and a table-two style series") {
  std::ostringstream body;
  body << "experiment,n,pods,containers,repetition,metric,value,unit\n";
  const auto values = synthesize(10.24, 0.3, 30);
  for (std::size_t i = 0; i < values.size(); ++i) {
    body << "deploy,8,40,40," << i << ",deploy_time_s," << values[i] << ",s\n";
  }
  body << "deploy,8,1,1,0,deploy_time_s,1850,ms\n";
  std::istringstream in(body.str());
  const auto samples = load_measurements(in);
  REQUIRE(samples.size() == 31);
  CHECK(samples.back().value == doctest::Approx(1.85));
  CHECK(samples.back().unit == "s");

  std::vector<double> series;
  for (const auto& s : samples) {
    if (s.containers == 40) series.push_back(s.value);
  }
  const auto stats = summarize(series);
  CHECK(stats.mean == doctest::Approx(10.24).epsilon(1e-6));
}

TEST_CASE("calibrate builds creation-time grid and overhead factors") {
  std::ostringstream body;
  body << "experiment,n,pods,containers,repetition,metric,value,unit\n";
  // Deployment series at rho=1, n=8 (means straight from measurements).
  const std::vector<std::pair<int, double>> series{
      {1, 1.85}, {5, 2.37}, {10, 3.77}, {20, 5.69}, {40, 10.24}};
  for (const auto& [c, mean] : series) {
    for (int rep = 0; rep < 3; ++rep) {
      body << "deploy,8," << c << "," << c << "," << rep << ",deploy_time_s," << mean
           << ",s\n";
    }
  }
  // Execution overhead: grouped (rho=0.25) vs isolated (rho=1) at C=4.
  for (int rep = 0; rep < 3; ++rep) {
    body << "exec,1,1,4," << rep << ",exec_time_s,101.0,s\n";
    body << "exec,1,4,4," << rep << ",exec_time_s,100.0,s\n";
  }
  std::istringstream in(body.str());
  const auto result = calibrate(load_measurements(in));

  CHECK(result.tc.interpolate(1.0, 8, 40) == doctest::Approx(2.048));
  CHECK(result.tc.interpolate(1.0, 8, 1) == doctest::Approx(1.85));
  // Largest-C entry becomes the asymptote.
  CHECK(result.tc.asymptote_tc() == doctest::Approx(2.048));
  CHECK(result.alpha.at(0.25) == doctest::Approx(1.01));
  CHECK(result.alpha.at(1.0) == 1.0);

  CHECK_THROWS_AS(calibrate({}), InsufficientData);
}
