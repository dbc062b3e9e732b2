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

#include "okypous/sim/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "okypous/error.hpp"

namespace okypous::sim {

PolicyKind parse_policy(const std::string& name) {
  if (name == "okypous") return PolicyKind::kOkypous;
  if (name == "performance") return PolicyKind::kPerformance;
  if (name == "ondemand") return PolicyKind::kOndemand;
  if (name == "dvfaas_pid") return PolicyKind::kDvfaasPid;
  if (name == "ecofaas_pools") return PolicyKind::kEcofaasPools;
  throw Error(ErrorKind::kConfig, "unknown policy '" + name + "'");
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kOkypous: return "okypous";
    case PolicyKind::kPerformance: return "performance";
    case PolicyKind::kOndemand: return "ondemand";
    case PolicyKind::kDvfaasPid: return "dvfaas_pid";
    case PolicyKind::kEcofaasPools: return "ecofaas_pools";
  }
  return "unknown";
}

double ondemand_core_ghz(const FreqGrids& grids, double utilization) {
  const double u = std::clamp(utilization, 0.0, 1.0);
  const double lo = grids.core().front();
  const double hi = grids.core().back();
  return grids.core_ceil(lo + u * (hi - lo));
}

DvfaasPid::DvfaasPid(const FreqGrids& grids, PidGains gains)
    : core_(grids.core()), gains_(gains), index_(static_cast<double>(core_.size() - 1)) {}

double DvfaasPid::core_ghz() const {
  const auto i = static_cast<std::size_t>(std::lround(index_));
  return core_[std::min(i, core_.size() - 1)];
}

void DvfaasPid::observe(double latency_ms, double budget_ms) {
  const double e = budget_ms > 0.0 ? (latency_ms - budget_ms) / budget_ms : 0.0;
  const double delta =
      gains_.kp * (e - e1_) + gains_.ki * e + gains_.kd * (e - 2.0 * e1_ + e2_);
  index_ = std::clamp(index_ + delta, 0.0, static_cast<double>(core_.size() - 1));
  e2_ = e1_;
  e1_ = e;
}

std::vector<double> EcoFaasPools::candidate_levels(const FreqGrids& grids) {
  std::vector<double> all;
  for (double f : grids.core()) {
    const double steps = f / kStepGhz;
    if (std::abs(steps - std::round(steps)) < 1e-9) all.push_back(f);
  }
  if (all.empty()) all.push_back(grids.core().back());
  if (all.size() <= kMaxPools) return all;
  std::vector<double> picked;
  for (std::size_t k = 0; k < kMaxPools; ++k) {
    const std::size_t i = k * (all.size() - 1) / (kMaxPools - 1);
    picked.push_back(all[i]);
  }
  picked.erase(std::unique(picked.begin(), picked.end()), picked.end());
  return picked;
}

EcoFaasPools::EcoFaasPools(const FreqGrids& grids, std::vector<double> levels)
    : levels_(std::move(levels)) {
  if (levels_.empty() || levels_.size() > kMaxPools) {
    throw Error(ErrorKind::kConfig, "between one and four pools are required");
  }
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    grids.core_index(levels_[i]);
    if (i > 0 && levels_[i] <= levels_[i - 1]) {
      throw Error(ErrorKind::kConfig, "pool levels must be strictly ascending");
    }
  }
  for (double f : grids.core()) {
    const double steps = f / kStepGhz;
    if (std::abs(steps - std::round(steps)) < 1e-9) candidates_.push_back(f);
  }
  for (double l : levels_) {
    if (std::find(candidates_.begin(), candidates_.end(), l) == candidates_.end()) {
      candidates_.push_back(l);
    }
  }
  std::sort(candidates_.begin(), candidates_.end());
  demand_.assign(candidates_.size(), 0);
}

EcoFaasPools EcoFaasPools::with_default_levels(const FreqGrids& grids) {
  return EcoFaasPools(grids, candidate_levels(grids));
}

PoolAssignment EcoFaasPools::assign(double desired_ghz) const {
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i] >= desired_ghz - 1e-9) {
      return {i, levels_[i], std::max(0.0, levels_[i] - desired_ghz)};
    }
  }
  return {levels_.size() - 1, levels_.back(), 0.0};
}

void EcoFaasPools::record_demand(double desired_ghz) {
  for (std::size_t i = 0; i < candidates_.size(); ++i) {
    if (candidates_[i] >= desired_ghz - 1e-9) {
      ++demand_[i];
      return;
    }
  }
  ++demand_.back();
}

std::vector<std::size_t> EcoFaasPools::even_split(std::size_t cores) const {
  std::vector<std::size_t> out(levels_.size(), cores / levels_.size());
  for (std::size_t i = 0; i < cores % levels_.size(); ++i) ++out[i];
  return out;
}

std::vector<std::size_t> EcoFaasPools::rebalance(std::size_t cores) {
  if (candidates_.size() > kMaxPools) {
    std::vector<std::size_t> order(candidates_.size() - 1);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return demand_[a] > demand_[b]; });
    order.resize(kMaxPools - 1);
    order.push_back(candidates_.size() - 1);
    std::sort(order.begin(), order.end());
    levels_.clear();
    for (std::size_t i : order) levels_.push_back(candidates_[i]);
  }
  // Demand per chosen level: everything up to it that no lower pool covers.
  std::vector<double> weight(levels_.size(), 1.0);
  for (std::size_t c = 0; c < candidates_.size(); ++c) {
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      if (levels_[i] >= candidates_[c] - 1e-9) {
        weight[i] += static_cast<double>(demand_[c]);
        break;
      }
    }
  }
  std::fill(demand_.begin(), demand_.end(), 0);

  const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
  std::vector<std::size_t> out(levels_.size(), 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t given = 0;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const double exact = static_cast<double>(cores) * weight[i] / total;
    out[i] = static_cast<std::size_t>(std::floor(exact));
    given += out[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; given < cores; ++k, ++given) ++out[remainders[k].second];
  return out;
}

FreqConfig clamp_to_cap(const FreqGrids& grids,
                        const std::function<double(const FreqConfig&)>& power,
                        const FreqConfig& requested, double cap_w) {
  std::optional<FreqConfig> best;
  double best_power = 0.0;
  for (const auto& cfg : grids.all_configs()) {
    if (cfg.core_ghz > requested.core_ghz + 1e-9 ||
        cfg.uncore_ghz > requested.uncore_ghz + 1e-9) {
      continue;
    }
    const double p = power(cfg);
    if (p > cap_w + 1e-9) continue;
    if (!best || p > best_power ||
        (p == best_power && cfg.core_ghz > best->core_ghz)) {
      best = cfg;
      best_power = p;
    }
  }
  return best ? *best : grids.min_config();
}

}  // namespace okypous::sim
