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

#include "okypous/controller.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <tuple>

#include "okypous/error.hpp"

namespace okypous {

void GainSchedule::validate() const {
  if (!(k_min > 0.0) || !(k_max >= k_min) || !(k_neg >= k_max)) {
    throw Error(ErrorKind::kConfig, "gain schedule requires k_neg >= k_max >= k_min > 0");
  }
}

double gain(const GainSchedule& schedule, double slack_ms) {
  if (slack_ms < 0.0) return schedule.k_neg;
  if (!(schedule.ref_budget_ms > 0.0)) return schedule.k_max;
  const double ramp = std::min(1.0, slack_ms / schedule.ref_budget_ms);
  return schedule.k_min + (schedule.k_max - schedule.k_min) * ramp;
}

double update_budget(const GainSchedule& schedule, double slack_ms,
                     double nominal_budget_ms, double floor_ms) {
  const double updated = gain(schedule, slack_ms) * slack_ms + nominal_budget_ms;
  return std::max({updated, floor_ms, 0.0});
}

ControlDecision select_min_power(const FreqGrids& grids,
                                 const std::function<double(const FreqConfig&)>& latency,
                                 const PowerModel& power, double budget_ms,
                                 std::optional<double> cap_w) {
  struct Candidate {
    FreqConfig cfg;
    double latency;
    double power;
  };
  std::optional<Candidate> best;
  std::optional<Candidate> fastest_in_cap;
  std::optional<Candidate> cheapest;
  for (const auto& cfg : grids.all_configs()) {
    const Candidate c{cfg, latency(cfg), power.predict(cfg)};
    const auto by_power = [](const Candidate& a) {
      return std::make_tuple(a.power, a.latency, a.cfg.core_ghz, a.cfg.uncore_ghz);
    };
    const auto by_latency = [](const Candidate& a) {
      return std::make_tuple(a.latency, a.power, a.cfg.core_ghz, a.cfg.uncore_ghz);
    };
    if (!cheapest || by_power(c) < by_power(*cheapest)) cheapest = c;
    const bool within_cap = !cap_w || c.power <= *cap_w;
    if (!within_cap) continue;
    if (!fastest_in_cap || by_latency(c) < by_latency(*fastest_in_cap)) fastest_in_cap = c;
    if (c.latency <= budget_ms && (!best || by_power(c) < by_power(*best))) best = c;
  }

  ControlDecision d;
  d.updated_budget_ms = budget_ms;
  if (best) {
    d.chosen = best->cfg;
    d.predicted_latency_ms = best->latency;
    d.predicted_power_w = best->power;
    d.feasible = true;
    return d;
  }
  const Candidate fallback =
      !cap_w ? Candidate{grids.max_config(), latency(grids.max_config()),
                         power.predict(grids.max_config())}
             : (fastest_in_cap ? *fastest_in_cap : *cheapest);
  d.chosen = fallback.cfg;
  d.predicted_latency_ms = fallback.latency;
  d.predicted_power_w = fallback.power;
  d.feasible = false;
  return d;
}

ControlDecision select_config(const GreyBoxModel& latency, const PowerModel& power,
                              const FreqGrids& grids, const PmcVector& pmcs,
                              double budget_ms, std::optional<double> cap_w) {
  if (!latency.trained()) throw Error(ErrorKind::kUntrained, "latency model is not trained");
  if (!power.fitted()) throw Error(ErrorKind::kUntrained, "power model is not fitted");
  return select_min_power(
      grids, [&](const FreqConfig& cfg) { return latency.predict(pmcs, cfg); }, power,
      budget_ms, cap_w);
}

ControlDecision on_function_boundary(const SlackState& state, double nominal_budget_ms,
                                     const PmcVector& pmcs, const ControlContext& ctx) {
  GainSchedule schedule = ctx.schedule;
  if (!(schedule.ref_budget_ms > 0.0)) schedule.ref_budget_ms = nominal_budget_ms;
  const double floor = ctx.latency.predict(pmcs, ctx.grids.max_config());
  const double budget = update_budget(schedule, state.slack_ms(), nominal_budget_ms, floor);
  ControlDecision d = select_config(ctx.latency, ctx.power, ctx.grids, pmcs,
                                    (budget - ctx.reserve_ms) / std::max(ctx.tail_ratio, 1.0),
                                    ctx.cap_w);
  d.updated_budget_ms = budget;
  return d;
}

void write_decision_log(std::ostream& out, const std::vector<DecisionRecord>& rows) {
  out << kDecisionLogHeader << '\n';
  out << std::setprecision(10);
  for (const auto& r : rows) {
    out << r.invocation_id << ',' << r.stage << ',' << r.slack_ms << ',' << r.budget_ms << ','
        << r.cfg.core_ghz << ',' << r.cfg.uncore_ghz << ',' << r.pred_latency_ms << ','
        << r.pred_power_w << ',' << (r.feasible ? 1 : 0) << '\n';
  }
}

}  // namespace okypous
