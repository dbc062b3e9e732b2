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
#include <string>
#include <vector>

#include "okypous/freq.hpp"

namespace okypous::sim {

enum class PolicyKind { kOkypous, kPerformance, kOndemand, kDvfaasPid, kEcofaasPools };

/// Accepts "okypous", "performance", "ondemand", "dvfaas_pid", "ecofaas_pools".
PolicyKind parse_policy(const std::string& name);
std::string to_string(PolicyKind kind);

/// Utilization governor: the smallest core grid value at or above
/// min + util * (max - min). util is clamped to [0, 1].
double ondemand_core_ghz(const FreqGrids& grids, double utilization);

struct PidGains {
  double kp = 4.0;
  double ki = 1.0;
  double kd = 0.5;
};

/// Velocity-form PID on the relative stage error (latency - budget) / budget
/// steering a continuous index into the core grid. Starts at the top.
class DvfaasPid {
 public:
  DvfaasPid(const FreqGrids& grids, PidGains gains);

  double core_ghz() const;
  double index() const { return index_; }
  void observe(double latency_ms, double budget_ms);

 private:
  std::vector<double> core_;
  PidGains gains_;
  double index_;
  double e1_ = 0.0;
  double e2_ = 0.0;
};

struct PoolAssignment {
  std::size_t pool = 0;
  double ghz = 0.0;
  double overshoot_ghz = 0.0;
};

/// Up to four frequency-isolated core pools per socket.
class EcoFaasPools {
 public:
  static constexpr std::size_t kMaxPools = 4;
  static constexpr double kStepGhz = 0.4;

  /// Levels must be ascending, on the core grid and at most kMaxPools.
  EcoFaasPools(const FreqGrids& grids, std::vector<double> levels);

  /// Multiples of 400 MHz on the core grid; when there are more than four,
  /// the top one plus three evenly spread below it.
  static std::vector<double> candidate_levels(const FreqGrids& grids);
  static EcoFaasPools with_default_levels(const FreqGrids& grids);

  /// Cheapest pool whose level is >= desired, else the top pool.
  PoolAssignment assign(double desired_ghz) const;

  const std::vector<double>& levels() const { return levels_; }

  void record_demand(double desired_ghz);
  /// Re-levels from the demand seen since the last call (most requested
  /// candidate levels, always keeping the top one), then splits `cores`
  /// across the pools in proportion to demand plus one. Clears the demand.
  std::vector<std::size_t> rebalance(std::size_t cores);
  /// Even split used before any demand has been seen.
  std::vector<std::size_t> even_split(std::size_t cores) const;

 private:
  std::vector<double> candidates_;
  std::vector<double> levels_;
  std::vector<std::size_t> demand_;
};

/// Highest-power grid config not above `requested` on either axis whose
/// power is within cap_w; the minimum config when none is.
FreqConfig clamp_to_cap(const FreqGrids& grids,
                        const std::function<double(const FreqConfig&)>& power,
                        const FreqConfig& requested, double cap_w);

}  // namespace okypous::sim
