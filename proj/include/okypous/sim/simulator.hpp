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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "okypous/controller.hpp"
#include "okypous/freq.hpp"
#include "okypous/sim/ground_truth.hpp"
#include "okypous/sim/metrics.hpp"
#include "okypous/sim/policies.hpp"
#include "okypous/trace.hpp"
#include "okypous/workflow.hpp"

namespace okypous::sim {

enum class BudgetMode { kGreedy, kEqual };

BudgetMode parse_budget_mode(const std::string& name);
std::string to_string(BudgetMode mode);

struct ClusterParams {
  int sockets = 2;
  int cores_per_socket = 10;
  double core_switch_us = 50.0;
  double uncore_switch_us = 2000.0;
  double governor_tick_ms = 100.0;
  double power_sample_ms = 20.0;
  double pool_interval_ms = 5000.0;
  // Arrivals after this time are dropped; 0 disables the horizon.
  double horizon_ms = 0.0;

  void validate() const;
};

struct SimConfig {
  PolicyKind policy = PolicyKind::kOkypous;
  std::uint64_t seed = 1;
  FreqGrids grids = FreqGrids::defaults();
  GainSchedule gains;
  PidGains pid;
  NoiseParams noise;
  PowerTruth power_truth;
  ClusterParams cluster;
  // Per-socket power cap, W.
  std::optional<double> cap_w;
  BudgetMode budget_mode = BudgetMode::kGreedy;
  std::size_t profile_samples = 200;
  std::size_t pretrain_samples_per_class = 20;
  // Held back from each controller budget for frequency transitions.
  // Negative means core plus uncore switching time.
  double switch_reserve_ms = -1.0;
  bool online_updates = true;

  void validate() const;
};

struct SimInput {
  std::vector<FunctionClass> classes;
  std::vector<WorkflowSpec> workflows;
  std::vector<TraceRecord> trace;
};

/// Per-core share of a socket cap after the static floor, W.
double per_core_allowance_w(const SimConfig& config, double cap_w);

/// Replays the trace under the configured policy. Deterministic in
/// (config, input). Throws Error(kConfig) for unresolved workflow or class
/// references and for caps below idle power, Error(kInfeasibleSlo) when a
/// workflow's SLO is below its critical path.
MetricsReport run(const SimConfig& config, const SimInput& input);

}  // namespace okypous::sim
