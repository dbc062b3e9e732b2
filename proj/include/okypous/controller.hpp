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

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>

#include "okypous/budgeting.hpp"
#include "okypous/freq.hpp"
#include "okypous/grey_box_model.hpp"
#include "okypous/pmc.hpp"
#include "okypous/power_model.hpp"

namespace okypous {

/// Piecewise proportional gain on accumulated slack: a constant k_neg for
/// negative slack, and a ramp from k_min to k_max as nonnegative slack grows
/// to ref_budget_ms. ref_budget_ms <= 0 means "the next function's nominal
/// budget" and is resolved by on_function_boundary().
struct GainSchedule {
  double k_neg = 1.0;
  double k_min = 0.2;
  double k_max = 0.9;
  double ref_budget_ms = 0.0;

  /// Throws Error(kConfig) unless k_neg >= k_max >= k_min > 0.
  void validate() const;
};

double gain(const GainSchedule& schedule, double slack_ms);

/// t' = K(S) * S + t, clamped below at floor_ms (and at zero).
double update_budget(const GainSchedule& schedule, double slack_ms,
                     double nominal_budget_ms, double floor_ms = 0.0);

struct ControlDecision {
  double updated_budget_ms = 0.0;
  FreqConfig chosen;
  double predicted_latency_ms = 0.0;
  double predicted_power_w = 0.0;
  bool feasible = false;
};

/// Lowest predicted power among grid configs with predicted latency <=
/// budget_ms and, when a cap is given, predicted power <= cap_w. Ties go to
/// lower latency, then lower core, then lower uncore frequency.
///
/// When nothing qualifies the decision is flagged infeasible and falls back
/// to the fastest config that respects the cap (the max config when
/// uncapped); if the cap excludes every config, to the lowest-power config.
ControlDecision select_min_power(const FreqGrids& grids,
                                 const std::function<double(const FreqConfig&)>& latency,
                                 const PowerModel& power, double budget_ms,
                                 std::optional<double> cap_w);

ControlDecision select_config(const GreyBoxModel& latency, const PowerModel& power,
                              const FreqGrids& grids, const PmcVector& pmcs,
                              double budget_ms, std::optional<double> cap_w);

struct ControlContext {
  const GreyBoxModel& latency;
  const PowerModel& power;
  const FreqGrids& grids;
  GainSchedule schedule;
  std::optional<double> cap_w;
  // Held back from the budget when choosing a config, e.g. to absorb a
  // pending frequency transition.
  double reserve_ms = 0.0;
  // Profiled tail over predicted mean for this node; predictions are scaled
  // by it so they are compared with budgets on the same footing.
  double tail_ratio = 1.0;
};

/// One controller step before a function starts: gain, budget update, and
/// config selection. `state` is the slack state through the previous stage.
ControlDecision on_function_boundary(const SlackState& state, double nominal_budget_ms,
                                     const PmcVector& pmcs, const ControlContext& ctx);

/// One row of the decision log.
struct DecisionRecord {
  std::uint64_t invocation_id = 0;
  std::size_t stage = 0;
  double slack_ms = 0.0;
  double budget_ms = 0.0;
  FreqConfig cfg;
  double pred_latency_ms = 0.0;
  double pred_power_w = 0.0;
  bool feasible = false;
};

inline constexpr const char* kDecisionLogHeader =
    "invocation_id,stage,slack_ms,budget_ms,core_ghz,uncore_ghz,pred_latency_ms,"
    "pred_power_w,feasible";

void write_decision_log(std::ostream& out, const std::vector<DecisionRecord>& rows);

}  // namespace okypous
