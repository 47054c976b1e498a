#include "podsim/plan/planner.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace podsim::plan {

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

double alpha_at(const PlanInput& input, double rho) {
  if (rho == 1.0) return 1.0;
  if (input.alpha != nullptr && !input.alpha->empty()) return input.alpha->at(rho);
  return input.default_alpha;
}

double tc_at(const PlanInput& input, double rho) {
  if (input.calibration == nullptr || input.calibration->empty()) {
    throw stats::MissingCalibration("no creation-time calibration available");
  }
  return input.calibration->interpolate(rho, input.machines, input.containers);
}

void validate(const PlanInput& input) {
  if (input.containers < 1 || input.machines < 1) {
    throw std::invalid_argument("containers and machines must be >= 1");
  }
  if (input.exec_time_s < 0.0) throw std::invalid_argument("exec_time_s must be >= 0");
}

}  // namespace

std::string to_string(WorkloadKind kind) {
  switch (kind) {
    case WorkloadKind::CpuIntensive:
      return "cpu_intensive";
    case WorkloadKind::IoIntensive:
      return "io_intensive";
    case WorkloadKind::NetworkIntensive:
      return "network_intensive";
  }
  return "";
}

std::string to_string(Rule rule) { return rule == Rule::Rule1 ? "Rule1" : "Rule2"; }

Layout rule1_layout(int containers, int machines) {
  Layout l;
  l.containers_per_pod = (containers + machines - 1) / machines;
  l.pods = (containers + l.containers_per_pod - 1) / l.containers_per_pod;
  return l;
}

bool isolated_pods_preferred(double tc_rho1, double tc_rho_nc, int machines, int containers,
                             double alpha, double exec_time_s) {
  if (machines < 1 || containers < 1) {
    throw std::invalid_argument("counts must be >= 1");
  }
  const double rhs = machines * (alpha - 1.0) / containers * exec_time_s;
  return tc_rho1 - tc_rho_nc < rhs;
}

double predict_total(double rho, const PlanInput& input) {
  validate(input);
  const double tc = tc_at(input, rho);
  const double a = alpha_at(input, rho);
  return static_cast<double>(input.containers) / input.machines * tc +
         a * input.exec_time_s;
}

PlanRecommendation recommend(const PlanInput& input) {
  validate(input);
  PlanRecommendation rec;
  auto& trace = rec.decision_trace;
  const int c = input.containers;
  const int n = input.machines;
  trace.push_back("profile: " + to_string(input.profile.kind) +
                  (input.profile.is_service ? ", service" : ", job"));

  const auto pick_rule1 = [&] {
    const Layout l = rule1_layout(c, n);
    rec.rule = Rule::Rule1;
    rec.pods = l.pods;
    rec.containers_per_pod = l.containers_per_pod;
    rec.rho = static_cast<double>(l.pods) / c;
    trace.push_back("layout: " + std::to_string(l.pods) + " pods x " +
                    std::to_string(l.containers_per_pod) + " containers (rho = " +
                    fmt(rec.rho) + ")");
  };
  const auto pick_rule2 = [&] {
    rec.rule = Rule::Rule2;
    rec.pods = c;
    rec.containers_per_pod = 1;
    rec.rho = 1.0;
    trace.push_back("layout: " + std::to_string(c) + " pods x 1 container (rho = 1)");
  };

  if (input.profile.kind != WorkloadKind::NetworkIntensive) {
    // Grouping is free or better for cpu/io work, so the container count
    // against the machine count decides alone.
    if (c > n) {
      trace.push_back("C = " + std::to_string(c) + " > n = " + std::to_string(n) +
                      ": rule 1, spread n pods");
      pick_rule1();
    } else {
      trace.push_back("C = " + std::to_string(c) + " <= n = " + std::to_string(n) +
                      ": rule 2, one container per pod");
      pick_rule2();
    }
  } else if (c <= n) {
    trace.push_back("C = " + std::to_string(c) + " <= n = " + std::to_string(n) +
                    ": both candidates collapse to one container per pod");
    pick_rule2();
  } else {
    bool negligible;
    if (input.profile.deployment_negligible.has_value()) {
      negligible = *input.profile.deployment_negligible;
      trace.push_back(std::string("deployment negligible declared ") +
                      (negligible ? "true" : "false"));
    } else if (input.calibration != nullptr && !input.calibration->empty() &&
               input.exec_time_s > 0.0) {
      const double deploy_rho1 = static_cast<double>(c) / n * tc_at(input, 1.0);
      negligible = deploy_rho1 < input.negligible_threshold * input.exec_time_s;
      trace.push_back("deploy time at rho=1 is " + fmt(deploy_rho1) + " s vs " +
                      fmt(input.negligible_threshold * 100) + "% of Te = " +
                      fmt(input.negligible_threshold * input.exec_time_s) + " s: " +
                      (negligible ? "negligible" : "relevant"));
    } else {
      negligible = input.profile.is_service;
      trace.push_back(std::string("no calibration to derive deploy time; treating ") +
                      (negligible ? "service as negligible deployment"
                                  : "deployment as relevant"));
    }

    if (negligible) {
      trace.push_back("network-bound with negligible deployment: rule 2, isolate");
      pick_rule2();
    } else {
      const double rho_nc = static_cast<double>(n) / c;
      const double tc1 = tc_at(input, 1.0);
      const double tcnc = tc_at(input, rho_nc);
      const double a = alpha_at(input, rho_nc);
      const double lhs = tc1 - tcnc;
      const double rhs = n * (a - 1.0) / c * input.exec_time_s;
      const bool isolate = isolated_pods_preferred(tc1, tcnc, n, c, a, input.exec_time_s);
      trace.push_back("eq(1): Tc(1) - Tc(n/C) = " + fmt(tc1) + " - " + fmt(tcnc) + " = " +
                      fmt(lhs) + (isolate ? " < " : " >= ") + "n(alpha-1)/C * Te = " +
                      std::to_string(n) + " * " + fmt(a - 1.0) + " / " + std::to_string(c) +
                      " * " + fmt(input.exec_time_s) + " = " + fmt(rhs));
      if (isolate) {
        trace.push_back("rule 2: isolation pays off over the run time");
        pick_rule2();
      } else {
        trace.push_back("rule 1: deployment savings dominate");
        pick_rule1();
      }
    }
  }

  try {
    rec.predicted_total_s = predict_total(rec.rho, input);
  } catch (const stats::MissingCalibration&) {
  } catch (const stats::EmptyTable&) {
  }
  return rec;
}

}  // namespace podsim::plan
