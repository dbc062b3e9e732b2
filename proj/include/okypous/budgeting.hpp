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
#include <functional>
#include <map>
#include <string>

#include <json.hpp>

#include "okypous/freq.hpp"
#include "okypous/power_model.hpp"
#include "okypous/workflow.hpp"

namespace okypous {

/// Accumulated budget T(k), accumulated observed latency L(k) and the slack
/// S(k) = T(k) - L(k) through stage k of one workflow invocation.
struct SlackState {
  double target_ms = 0.0;
  double observed_ms = 0.0;
  std::size_t stage = 0;

  double slack_ms() const { return target_ms - observed_ms; }
};

SlackState advance_slack(const SlackState& state, double observed_latency_ms,
                         double nominal_budget_ms);

struct CriticalPath {
  ExecutionPath path;
  double cp_ms = 0.0;
};

/// The entry-to-sink chain with the largest summed baseline latency. Throws
/// Error(kMissingBaseline) naming the first node without a baseline.
CriticalPath compute_critical_path(const WorkflowSpec& spec,
                                   const std::map<std::string, double>& baselines);

struct BudgetPlan {
  std::string workflow_id;
  double slo_ms = 0.0;
  double cp_ms = 0.0;
  ExecutionPath critical_path;
  std::map<std::string, double> budgets_ms;
  // Config the controller selects for each node at zero slack. Empty for
  // plans built without models.
  std::map<std::string, FreqConfig> planned;

  nlohmann::json to_json() const;
};

/// Predicted latency of a node at a config.
using NodeLatencyFn = std::function<double(const std::string& node_id, const FreqConfig& cfg)>;

/// Nominal per-node budgets.
///
/// Every chain starts with each node at its baseline. Surplus (slo - chain
/// baseline) is handed out greedily: each round moves the node whose next
/// lower-power point on its predicted latency/power frontier saves the most
/// watts per added ms, as long as the step fits. Unspent surplus is spread
/// proportionally. A node on several chains keeps the tightest candidate;
/// whatever a chain then has left goes to the nodes only it contains.
///
/// Throws Error(kInfeasibleSlo) when slo_ms is below the critical path.
BudgetPlan assign_budgets(const WorkflowSpec& spec,
                          const std::map<std::string, double>& baselines, double slo_ms,
                          const NodeLatencyFn& latency, const PowerModel& power,
                          const FreqGrids& grids);

/// Splits the SLO evenly over each chain, tightest share per node. Unlike
/// assign_budgets() this can give a node less than its baseline; it exists
/// to study how the controller copes with poor nominal budgets.
BudgetPlan assign_equal_budgets(const WorkflowSpec& spec,
                                const std::map<std::string, double>& baselines,
                                double slo_ms);

/// A node that appears on several paths keeps the tighter of two budgets.
inline double tighter_budget(double a, double b) { return a < b ? a : b; }

/// Largest summed budget over all chains.
double max_chain_budget(const WorkflowSpec& spec, const BudgetPlan& plan);

}  // namespace okypous
