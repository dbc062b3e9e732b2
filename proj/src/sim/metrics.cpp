// Copyright 2026 The Okypous Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "okypous/sim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace okypous::sim {

std::size_t MetricsReport::violations() const {
  return static_cast<std::size_t>(std::count_if(
      invocations.begin(), invocations.end(), [](const auto& r) { return r.violated(); }));
}

double MetricsReport::violation_rate() const {
  if (invocations.empty()) return 0.0;
  return static_cast<double>(violations()) / static_cast<double>(invocations.size());
}

double MetricsReport::mean_power_w() const {
  return duration_ms > 0.0 ? energy_j / (duration_ms / 1000.0) : 0.0;
}

double MetricsReport::mean_overshoot_ghz() const {
  return overshoot_count ? overshoot_sum_ghz / static_cast<double>(overshoot_count) : 0.0;
}

namespace {

std::map<double, double> busy_residency(const std::map<ResidencyKey, double>& r, bool core) {
  std::map<double, double> out;
  double total = 0.0;
  for (const auto& [k, ms] : r) {
    if (!k.busy) continue;
    out[core ? k.core_ghz : k.uncore_ghz] += ms;
    total += ms;
  }
  if (total > 0.0) {
    for (auto& [f, v] : out) v /= total;
  }
  return out;
}

std::string ghz_key(double f) {
  std::ostringstream s;
  s << f;
  return s.str();
}

nlohmann::json drift_json(const DriftStats& d) {
  return {{"sharing_degree", d.sharing_degree},   {"mean_ghz", d.mean_ghz},
          {"p50_ghz", d.p50_ghz},                 {"p95_ghz", d.p95_ghz},
          {"max_ghz", d.max_ghz},                 {"request_seconds", d.request_seconds},
          {"requests", d.requests}};
}

}  // namespace

std::map<double, double> MetricsReport::busy_core_residency() const {
  return busy_residency(residency_ms, true);
}

std::map<double, double> MetricsReport::busy_uncore_residency() const {
  return busy_residency(residency_ms, false);
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double energy_from_residency(const MetricsReport& report, const PowerTruth& truth) {
  double j = 0.0;
  for (const auto& [k, ms] : report.residency_ms) {
    const FreqConfig cfg{k.core_ghz, k.uncore_ghz};
    j += (k.busy ? truth.busy_w(cfg) : truth.idle_w(cfg)) * ms / 1000.0;
  }
  j += truth.socket_static_w * report.sockets * report.duration_ms / 1000.0;
  return j;
}

nlohmann::json MetricsReport::summary() const {
  std::vector<double> ratios;
  for (const auto& r : invocations) ratios.push_back(r.ratio());
  std::vector<double> readings;
  for (const auto& p : power_readings) readings.push_back(p.watts);

  std::size_t infeasible = 0;
  for (const auto& d : decisions) infeasible += d.feasible ? 0 : 1;

  nlohmann::json core_res = nlohmann::json::object();
  for (const auto& [f, v] : busy_core_residency()) core_res[ghz_key(f)] = v;
  nlohmann::json uncore_res = nlohmann::json::object();
  for (const auto& [f, v] : busy_uncore_residency()) uncore_res[ghz_key(f)] = v;

  nlohmann::json j;
  j["policy"] = policy;
  j["seed"] = seed;
  j["invocations"] = {{"completed", invocations.size()},
                      {"violations", violations()},
                      {"violation_rate", violation_rate()}};
  j["latency_slo_ratio"] = {{"mean", ratios.empty() ? 0.0
                                                    : std::accumulate(ratios.begin(),
                                                                      ratios.end(), 0.0) /
                                                          static_cast<double>(ratios.size())},
                            {"p50", percentile(ratios, 0.50)},
                            {"p95", percentile(ratios, 0.95)},
                            {"p99", percentile(ratios, 0.99)},
                            {"max", ratios.empty() ? 0.0
                                                   : *std::max_element(ratios.begin(),
                                                                       ratios.end())}};
  j["power"] = {{"mean_w", mean_power_w()},
                {"mean_socket_w", sockets > 0 ? mean_power_w() / sockets : 0.0},
                {"p50_socket_w", percentile(readings, 0.50)},
                {"p95_socket_w", percentile(readings, 0.95)}};
  j["energy_j"] = energy_j;
  j["duration_ms"] = duration_ms;
  j["residency"] = {{"busy_core_ghz", core_res}, {"busy_uncore_ghz", uncore_res}};
  j["decisions"] = {{"count", decisions.size()}, {"infeasible", infeasible}};
  j["overshoot"] = {{"mean_ghz", mean_overshoot_ghz()}, {"count", overshoot_count}};
  j["drift"] = {{"core", drift_json(core_drift)}, {"uncore", drift_json(uncore_drift)}};
  j["model_updates"] = model_updates;
  j["warnings"] = warnings;
  return j;
}

void write_invocations_csv(std::ostream& out, const MetricsReport& report) {
  out << kInvocationsHeader << '\n';
  out << std::setprecision(10);
  for (const auto& r : report.invocations) {
    out << r.id << ',' << r.workflow_id << ',' << r.arrival_ms << ',' << r.completion_ms
        << ',' << r.latency_ms() << ',' << r.slo_ms << ',' << r.ratio() << ','
        << (r.violated() ? 1 : 0) << ',' << r.stages << '\n';
  }
}

void write_power_csv(std::ostream& out, const MetricsReport& report) {
  out << kPowerHeader << '\n';
  out << std::setprecision(10);
  for (const auto& p : report.power_readings) {
    out << p.time_ms << ',' << p.socket << ',' << p.watts << '\n';
  }
}

}  // namespace okypous::sim
