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
#include <map>
#include <random>
#include <string>
#include <vector>

#include "okypous/freq.hpp"
#include "okypous/history_table.hpp"
#include "okypous/sim/ground_truth.hpp"
#include "okypous/trace.hpp"
#include "okypous/workflow.hpp"

namespace okypous::sim {

/// Draws one branch combination: each reachable conditional fires one
/// outgoing edge according to its probabilities. `taken_edges`, when set,
/// receives which edges fired.
Activation sample_activation(const WorkflowSpec& spec, std::mt19937_64& rng,
                             std::vector<bool>* taken_edges = nullptr);

struct InputSample {
  double size = 1.0;
  std::string variant;
};

/// Inputs the trace sends to one workflow; {size 1, no variant} when it has
/// none.
std::vector<InputSample> workflow_inputs(const std::vector<TraceRecord>& trace,
                                         const std::string& workflow_id);

/// Per-node p95 latency at the max config over `samples` draws from
/// `inputs`, with latency noise. When `history` is set, the observed
/// counters are logged into it.
std::map<std::string, double> profile_baselines(const WorkflowSpec& spec,
                                                const std::vector<FunctionClass>& classes,
                                                const std::vector<InputSample>& inputs,
                                                const FreqGrids& grids,
                                                const NoiseParams& noise, std::size_t samples,
                                                std::mt19937_64& rng,
                                                HistoryStore* history = nullptr);

/// History key variant for a class: the request variant when the class
/// defines it, empty otherwise.
std::string effective_variant(const FunctionClass& cls, const std::string& variant);

struct WorkloadParams {
  std::size_t workflows = 50;
  std::size_t invocations = 2000;
  std::size_t min_stages = 2;
  std::size_t max_stages = 6;
  double conditional_fraction = 0.25;
  double fanout_fraction = 0.15;
  double variant_fraction = 0.3;
  double size_lo = 0.75;
  double size_hi = 1.25;
  // Offered load as a fraction of the cluster's cores.
  double target_utilization = 0.35;
  int total_cores = 20;
  // Relative amplitude of the sinusoidal arrival-rate modulation.
  double rate_amplitude = 0.5;
  // SLO = slo_scale * critical path of per-node p95 latencies at max config.
  double slo_scale = 1.5;
  std::size_t profile_samples = 200;

  void validate() const;
};

struct Workload {
  std::vector<WorkflowSpec> workflows;
  std::vector<TraceRecord> trace;
};

Workload generate_workload(const WorkloadParams& params,
                           const std::vector<FunctionClass>& classes, const FreqGrids& grids,
                           const NoiseParams& noise, std::uint64_t seed);

}  // namespace okypous::sim
