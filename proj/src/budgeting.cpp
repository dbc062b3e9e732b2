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

#include "okypous/budgeting.hpp"

#include <algorithm>
#include <limits>
#include <utility>
#include <sstream>

#include "okypous/controller.hpp"
#include "okypous/error.hpp"

namespace okypous {
namespace {

constexpr double kEps = 1e-9;

std::vector<double> baseline_vector(const WorkflowSpec& spec,
                                    const std::map<std::string, double>& baselines) {
  std::vector<double> out(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto it = baselines.find(spec.node(i).id);
    if (it == baselines.end()) {
      throw Error(ErrorKind::kMissingBaseline,
                  "no baseline latency for node '" + spec.node(i).id + "' in workflow '" +
                      spec.id() + "'");
    }
    out[i] = it->second;
  }
  return out;
}

double chain_sum(const std::vector<std::size_t>& chain, const std::vector<double>& w) {
  double s = 0.0;
  for (std::size_t n : chain) s += w[n];
  return s;
}

// Chains ordered by descending baseline sum; ties keep enumeration order.
std::vector<std::vector<std::size_t>> ordered_chains(const WorkflowSpec& spec,
                                                     const std::vector<double>& base) {
  auto chains = enumerate_chains(spec);
  std::stable_sort(chains.begin(), chains.end(), [&](const auto& a, const auto& b) {
    return chain_sum(a, base) > chain_sum(b, base);
  });
  return chains;
}

struct FrontierPoint {
  double budget_ms;
  double power_w;
};

// Latency/power Pareto frontier of one node, fastest first. Budgets are the
// predicted latency rescaled so the max config maps onto the measured
// baseline.
std::vector<FrontierPoint> node_frontier(const std::string& node_id, double baseline,
                                         const NodeLatencyFn& latency,
                                         const PowerModel& power, const FreqGrids& grids) {
  struct Point {
    double latency;
    double power;
  };
  std::vector<Point> pts;
  for (const auto& cfg : grids.all_configs()) {
    pts.push_back({latency(node_id, cfg), power.predict(cfg)});
  }
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.latency != b.latency ? a.latency < b.latency : a.power < b.power;
  });
  const double at_max = latency(node_id, grids.max_config());
  std::vector<FrontierPoint> frontier;
  for (const auto& p : pts) {
    if (!frontier.empty() && p.power >= frontier.back().power_w) continue;
    const double scaled = at_max > 0.0 ? baseline * p.latency / at_max : baseline;
    frontier.push_back({std::max(scaled, baseline), p.power});
  }
  return frontier;
}

std::vector<double> greedy_chain_budgets(const std::vector<std::size_t>& chain,
                                         const std::vector<std::vector<FrontierPoint>>& frontiers,
                                         const std::vector<double>& base, double slo_ms) {
  std::vector<std::size_t> pos(chain.size(), 0);
  std::vector<double> budget(chain.size());
  double used = 0.0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    budget[i] = frontiers[chain[i]].empty() ? base[chain[i]] : frontiers[chain[i]][0].budget_ms;
    used += budget[i];
  }
  while (true) {
    std::ptrdiff_t pick = -1;
    double best_ratio = -1.0;
    for (std::size_t i = 0; i < chain.size(); ++i) {
      const auto& f = frontiers[chain[i]];
      if (pos[i] + 1 >= f.size()) continue;
      const double d_lat = f[pos[i] + 1].budget_ms - f[pos[i]].budget_ms;
      const double d_pow = f[pos[i]].power_w - f[pos[i] + 1].power_w;
      if (used + d_lat > slo_ms + kEps) continue;
      const double ratio = d_lat > kEps ? d_pow / d_lat : std::numeric_limits<double>::infinity();
      if (ratio > best_ratio) {
        best_ratio = ratio;
        pick = static_cast<std::ptrdiff_t>(i);
      }
    }
    if (pick < 0) break;
    const auto i = static_cast<std::size_t>(pick);
    ++pos[i];
    const double next = frontiers[chain[i]][pos[i]].budget_ms;
    used += next - budget[i];
    budget[i] = next;
  }
  if (used > 0.0 && used < slo_ms) {
    const double scale = slo_ms / used;
    for (double& b : budget) b *= scale;
  }
  return budget;
}

BudgetPlan finish_plan(const WorkflowSpec& spec, const std::vector<double>& base,
                       double slo_ms, const std::vector<double>& budgets) {
  BudgetPlan plan;
  plan.workflow_id = spec.id();
  plan.slo_ms = slo_ms;
  std::map<std::string, double> bmap;
  for (std::size_t i = 0; i < spec.size(); ++i) bmap[spec.node(i).id] = base[i];
  const auto cp = compute_critical_path(spec, bmap);
  plan.critical_path = cp.path;
  plan.cp_ms = cp.cp_ms;
  for (std::size_t i = 0; i < spec.size(); ++i) plan.budgets_ms[spec.node(i).id] = budgets[i];
  return plan;
}

}  // namespace

SlackState advance_slack(const SlackState& state, double observed_latency_ms,
                         double nominal_budget_ms) {
  SlackState next;
  next.target_ms = state.target_ms + nominal_budget_ms;
  next.observed_ms = state.observed_ms + observed_latency_ms;
  next.stage = state.stage + 1;
  return next;
}

CriticalPath compute_critical_path(const WorkflowSpec& spec,
                                   const std::map<std::string, double>& baselines) {
  baseline_vector(spec, baselines);
  CriticalPath cp;
  bool first = true;
  for (auto& path : enumerate_paths(spec, &baselines)) {
    if (first || path.baseline_sum_ms > cp.cp_ms) {
      cp.cp_ms = path.baseline_sum_ms;
      cp.path = std::move(path);
      first = false;
    }
  }
  return cp;
}

BudgetPlan assign_budgets(const WorkflowSpec& spec,
                          const std::map<std::string, double>& baselines, double slo_ms,
                          const NodeLatencyFn& latency, const PowerModel& power,
                          const FreqGrids& grids) {
  const auto base = baseline_vector(spec, baselines);
  const auto chains = ordered_chains(spec, base);
  const double cp_ms = chain_sum(chains.front(), base);
  if (slo_ms + kEps < cp_ms) {
    std::ostringstream msg;
    msg << "workflow '" << spec.id() << "': SLO " << slo_ms
        << " ms is below the critical path " << cp_ms << " ms";
    throw Error(ErrorKind::kInfeasibleSlo, msg.str());
  }

  std::vector<std::vector<FrontierPoint>> frontiers(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    frontiers[i] = node_frontier(spec.node(i).id, base[i], latency, power, grids);
  }

  std::vector<double> budget(spec.size(), std::numeric_limits<double>::infinity());
  std::vector<std::size_t> membership(spec.size(), 0);
  for (const auto& chain : chains) {
    const auto candidate = greedy_chain_budgets(chain, frontiers, base, slo_ms);
    for (std::size_t i = 0; i < chain.size(); ++i) {
      budget[chain[i]] = tighter_budget(budget[chain[i]], candidate[i]);
      ++membership[chain[i]];
    }
  }

  // Return what the min rule took away to nodes owned by a single chain.
  for (const auto& chain : chains) {
    const double leftover = slo_ms - chain_sum(chain, budget);
    if (leftover <= kEps) continue;
    double owned = 0.0;
    for (std::size_t n : chain) {
      if (membership[n] == 1) owned += budget[n];
    }
    if (owned <= 0.0) continue;
    const double scale = (owned + leftover) / owned;
    for (std::size_t n : chain) {
      if (membership[n] == 1) budget[n] *= scale;
    }
  }

  BudgetPlan plan = finish_plan(spec, base, slo_ms, budget);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto& id = spec.node(i).id;
    const auto d = select_min_power(
        grids, [&](const FreqConfig& cfg) { return latency(id, cfg); }, power, budget[i],
        std::nullopt);
    plan.planned[id] = d.chosen;
  }
  return plan;
}

BudgetPlan assign_equal_budgets(const WorkflowSpec& spec,
                                const std::map<std::string, double>& baselines,
                                double slo_ms) {
  const auto base = baseline_vector(spec, baselines);
  std::vector<double> budget(spec.size(), std::numeric_limits<double>::infinity());
  for (const auto& chain : enumerate_chains(spec)) {
    const double share = slo_ms / static_cast<double>(chain.size());
    for (std::size_t n : chain) budget[n] = tighter_budget(budget[n], share);
  }
  return finish_plan(spec, base, slo_ms, budget);
}

double max_chain_budget(const WorkflowSpec& spec, const BudgetPlan& plan) {
  double worst = 0.0;
  for (const auto& chain : enumerate_chains(spec)) {
    double s = 0.0;
    for (std::size_t n : chain) s += plan.budgets_ms.at(spec.node(n).id);
    worst = std::max(worst, s);
  }
  return worst;
}

nlohmann::json BudgetPlan::to_json() const {
  nlohmann::json j;
  j["workflow_id"] = workflow_id;
  j["slo_ms"] = slo_ms;
  j["cp_ms"] = cp_ms;
  j["critical_path"] = critical_path.node_ids;
  j["budgets_ms"] = budgets_ms;
  nlohmann::json cfgs = nlohmann::json::object();
  for (const auto& [id, cfg] : planned) {
    cfgs[id] = {{"core_ghz", cfg.core_ghz}, {"uncore_ghz", cfg.uncore_ghz}};
  }
  j["planned"] = cfgs;
  return j;
}

}  // namespace okypous
