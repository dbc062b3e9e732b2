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

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "okypous/conflict_resolver.hpp"
#include "okypous/controller.hpp"
#include "okypous/sim/ground_truth.hpp"

namespace okypous::sim {

struct InvocationRecord {
  std::uint64_t id = 0;
  std::string workflow_id;
  double arrival_ms = 0.0;
  double completion_ms = 0.0;
  double slo_ms = 0.0;
  std::size_t stages = 0;

  double latency_ms() const { return completion_ms - arrival_ms; }
  double ratio() const { return latency_ms() / slo_ms; }
  bool violated() const { return latency_ms() > slo_ms; }
};

/// One executed stage, for causality checks.
struct StageRecord {
  std::uint64_t invocation_id = 0;
  std::string node_id;
  double start_ms = 0.0;
  double end_ms = 0.0;
};

/// Mean socket power over the interval ending at time_ms.
struct PowerReading {
  double time_ms = 0.0;
  int socket = 0;
  double watts = 0.0;
};

/// Core-time bucket: one core, busy or idle, at a (core, uncore) pair.
struct ResidencyKey {
  bool busy = false;
  double core_ghz = 0.0;
  double uncore_ghz = 0.0;

  auto operator<=>(const ResidencyKey&) const = default;
};

struct MetricsReport {
  std::string policy;
  std::uint64_t seed = 0;
  int sockets = 0;
  int cores_per_socket = 0;
  double duration_ms = 0.0;
  double energy_j = 0.0;
  std::vector<InvocationRecord> invocations;
  std::vector<DecisionRecord> decisions;
  std::vector<StageRecord> stages;
  std::vector<PowerReading> power_readings;
  std::map<ResidencyKey, double> residency_ms;
  double overshoot_sum_ghz = 0.0;
  std::size_t overshoot_count = 0;
  DriftStats core_drift;
  DriftStats uncore_drift;
  std::size_t model_updates = 0;
  std::vector<std::string> warnings;

  std::size_t violations() const;
  double violation_rate() const;
  /// Whole-cluster average power (all sockets), W.
  double mean_power_w() const;
  double mean_overshoot_ghz() const;
  /// Fraction of busy core time spent at each core (or uncore) frequency.
  std::map<double, double> busy_core_residency() const;
  std::map<double, double> busy_uncore_residency() const;

  nlohmann::json summary() const;
};

/// Linear-interpolated percentile, q in [0, 1]. Zero for an empty set.
double percentile(std::vector<double> values, double q);

/// Energy rebuilt from the residency histogram and the power truth, J.
double energy_from_residency(const MetricsReport& report, const PowerTruth& truth);

inline constexpr const char* kInvocationsHeader =
    "invocation_id,workflow_id,arrival_ms,completion_ms,latency_ms,slo_ms,latency_slo_ratio,"
    "violated,stages";
inline constexpr const char* kPowerHeader = "time_ms,socket,power_w";

void write_invocations_csv(std::ostream& out, const MetricsReport& report);
void write_power_csv(std::ostream& out, const MetricsReport& report);

}  // namespace okypous::sim
