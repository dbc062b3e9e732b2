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

#include <gtest/gtest.h>

#include "okypous/error.hpp"
#include "okypous/sim/ground_truth.hpp"
#include "okypous/sim/policies.hpp"

namespace okypous::sim {
namespace {

TEST(Policies, NamesRoundTrip) {
  for (const char* n : {"okypous", "performance", "ondemand", "dvfaas_pid", "ecofaas_pools"}) {
    EXPECT_EQ(to_string(parse_policy(n)), n);
  }
  EXPECT_THROW(parse_policy("schedutil"), Error);
}

TEST(Ondemand, Examples) {
  const auto g = FreqGrids::defaults();
  EXPECT_DOUBLE_EQ(ondemand_core_ghz(g, 0.0), 1.2);
  EXPECT_DOUBLE_EQ(ondemand_core_ghz(g, 1.0), 2.5);
  // 1.2 + 0.5 * 1.3 = 1.85, rounded up onto the grid.
  EXPECT_DOUBLE_EQ(ondemand_core_ghz(g, 0.5), 2.0);
}

TEST(Ondemand, NondecreasingInUtilization) {
  const auto g = FreqGrids::defaults();
  double prev = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double f = ondemand_core_ghz(g, i / 100.0);
    EXPECT_GE(f, prev);
    EXPECT_TRUE(g.contains({f, g.uncore().back()}));
    prev = f;
  }
}

TEST(Pid, ZeroErrorHoldsFrequency) {
  const auto g = FreqGrids::defaults();
  DvfaasPid pid(g, PidGains{});
  const double start = pid.core_ghz();
  for (int i = 0; i < 20; ++i) pid.observe(50.0, 50.0);
  EXPECT_DOUBLE_EQ(pid.core_ghz(), start);
}

TEST(Pid, EarlyFinishDescendsThenOverrunClimbs) {
  const auto g = FreqGrids::defaults();
  DvfaasPid pid(g, PidGains{});
  EXPECT_DOUBLE_EQ(pid.core_ghz(), 2.5);
  int stages = 0;
  while (pid.core_ghz() > 1.2 && stages < 50) {
    pid.observe(25.0, 50.0);
    ++stages;
  }
  EXPECT_DOUBLE_EQ(pid.core_ghz(), 1.2);
  EXPECT_LT(stages, 20);
  stages = 0;
  while (pid.core_ghz() < 2.5 && stages < 50) {
    pid.observe(100.0, 50.0);
    ++stages;
  }
  EXPECT_DOUBLE_EQ(pid.core_ghz(), 2.5);
  EXPECT_LT(stages, 20);
  // Saturated: stays put.
  pid.observe(100.0, 50.0);
  EXPECT_DOUBLE_EQ(pid.core_ghz(), 2.5);
}

TEST(Pools, CeilingAssignment) {
  const auto g = FreqGrids::defaults();
  const EcoFaasPools pools(g, {1.2, 1.6, 2.0, 2.4});
  const auto a = pools.assign(1.6);
  EXPECT_DOUBLE_EQ(a.ghz, 1.6);
  EXPECT_DOUBLE_EQ(a.overshoot_ghz, 0.0);
  const auto b = pools.assign(1.7);
  EXPECT_DOUBLE_EQ(b.ghz, 2.0);
  EXPECT_NEAR(b.overshoot_ghz, 0.3, 1e-12);
  const auto c = pools.assign(2.5);
  EXPECT_DOUBLE_EQ(c.ghz, 2.4);
  EXPECT_EQ(c.pool, 3u);
}

TEST(Pools, DefaultLevelsAreMultiplesOf400Mhz) {
  const auto g = FreqGrids::defaults();
  const auto levels = EcoFaasPools::candidate_levels(g);
  EXPECT_EQ(levels, (std::vector<double>{1.2, 1.6, 2.0, 2.4}));
}

TEST(Pools, RejectsBadLevels) {
  const auto g = FreqGrids::defaults();
  EXPECT_THROW(EcoFaasPools(g, {}), Error);
  EXPECT_THROW(EcoFaasPools(g, {1.6, 1.2}), Error);
  EXPECT_THROW(EcoFaasPools(g, {1.3}), Error);
  EXPECT_THROW(EcoFaasPools(g, {1.2, 1.4, 1.6, 2.0, 2.4}), Error);
}

TEST(Pools, RebalanceFollowsDemand) {
  const auto g = FreqGrids::defaults();
  auto pools = EcoFaasPools::with_default_levels(g);
  EXPECT_EQ(pools.even_split(10), (std::vector<std::size_t>{3, 3, 2, 2}));
  for (int i = 0; i < 30; ++i) pools.record_demand(1.5);
  const auto split = pools.rebalance(10);
  std::size_t total = 0;
  for (auto n : split) total += n;
  EXPECT_EQ(total, 10u);
  EXPECT_GT(split[1], split[0]);
  EXPECT_GT(split[1], split[3]);
}

TEST(CapClamp, HighestConfigUnderCap) {
  const auto g = FreqGrids::defaults();
  const PowerTruth truth;
  const auto power = [&](const FreqConfig& c) { return truth.busy_w(c); };
  const auto top = g.max_config();
  EXPECT_EQ(clamp_to_cap(g, power, top, truth.busy_w(top)), top);
  const double cap = truth.busy_w(g.config(2.0, 2.1));
  const auto got = clamp_to_cap(g, power, top, cap);
  EXPECT_LE(truth.busy_w(got), cap + 1e-9);
  for (const auto& c : g.all_configs()) {
    if (truth.busy_w(c) <= cap) EXPECT_LE(truth.busy_w(c), truth.busy_w(got) + 1e-12);
  }
  // Never above what was asked for.
  const auto low = g.config(1.4, 1.2);
  EXPECT_EQ(clamp_to_cap(g, power, low, 1e9), low);
}

}  // namespace
}  // namespace okypous::sim
