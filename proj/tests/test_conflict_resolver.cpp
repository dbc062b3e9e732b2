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

#include <map>
#include <random>
#include <sstream>

#include "okypous/conflict_resolver.hpp"
#include "okypous/freq.hpp"

namespace okypous {
namespace {

TEST(Resolver, SubmitExamples) {
  DomainRequestSet a("core0", 1.2);
  EXPECT_DOUBLE_EQ(a.submit(1, 1.8), 1.8);

  DomainRequestSet b("core1", 1.2);
  b.submit(1, 2.2);
  EXPECT_DOUBLE_EQ(b.submit(2, 1.6), 2.2);

  DomainRequestSet c("uncore0", 1.2);
  c.submit(1, 1.6);
  c.submit(2, 2.0);
  EXPECT_DOUBLE_EQ(c.submit(3, 2.4), 2.4);
}

TEST(Resolver, ReleaseExamples) {
  DomainRequestSet s("core0", 1.2);
  s.submit(1, 2.4);
  s.submit(2, 1.6);
  EXPECT_DOUBLE_EQ(s.release(1), 1.6);
  EXPECT_DOUBLE_EQ(s.release(2), 1.2);
  EXPECT_EQ(s.active(), 0u);
}

TEST(Resolver, ResubmitEqualsFreshSubmit) {
  DomainRequestSet s("core0", 1.2);
  s.submit(5, 2.0);
  s.release(5);
  s.submit(5, 1.4);
  DomainRequestSet fresh("core0", 1.2);
  fresh.submit(5, 1.4);
  EXPECT_DOUBLE_EQ(s.applied_ghz(), fresh.applied_ghz());
  EXPECT_EQ(s.active(), fresh.active());
}

TEST(Resolver, DuplicateSubmitReplaces) {
  DomainRequestSet s("core0", 1.2);
  s.submit(1, 2.5);
  EXPECT_DOUBLE_EQ(s.submit(1, 1.4), 1.4);
  EXPECT_EQ(s.active(), 1u);
}

TEST(Resolver, UnknownReleaseIsNoop) {
  DomainRequestSet s("core0", 1.2);
  s.submit(1, 2.0);
  EXPECT_DOUBLE_EQ(s.release(99), 2.0);
  EXPECT_EQ(s.unknown_releases(), 1u);
  EXPECT_EQ(s.active(), 1u);
}

TEST(Resolver, RandomOperationsMatchBruteForceMax) {
  const auto grid = FreqGrids::defaults().core();
  std::mt19937_64 rng(100);
  std::uniform_int_distribution<int> id(0, 15), level(0, static_cast<int>(grid.size()) - 1),
      op(0, 2);
  DomainRequestSet s("core0", grid.front());
  std::map<int, double> model;
  for (int step = 0; step < 100000; ++step) {
    const int who = id(rng);
    double applied;
    if (op(rng) < 2) {
      const double ghz = grid[level(rng)];
      model[who] = ghz;
      applied = s.submit(who, ghz);
    } else {
      model.erase(who);
      applied = s.release(who);
    }
    double expect = grid.front();
    if (!model.empty()) {
      expect = 0.0;
      for (const auto& [k, v] : model) expect = std::max(expect, v);
    }
    ASSERT_DOUBLE_EQ(applied, expect) << "step " << step;
    for (const auto& [k, v] : model) ASSERT_GE(applied, v);
    ASSERT_EQ(s.active(), model.size());
  }
}

TEST(Drift, SoleOccupantIsZero) {
  const auto st = drift_report({{0, 10, "c0", 1.4}, {10, 25, "c0", 2.5}, {30, 31, "c0", 1.2}},
                               1, 1.2);
  EXPECT_DOUBLE_EQ(st.mean_ghz, 0.0);
  EXPECT_DOUBLE_EQ(st.max_ghz, 0.0);
  EXPECT_NEAR(st.request_seconds, 0.026, 1e-12);
}

TEST(Drift, LowRequesterDriftsOverOverlap) {
  // 1.2 holds [0,10), 2.5 holds [4,8): overlap 4 ms at 1.3 GHz drift.
  const auto st = drift_report({{0, 10, "u0", 1.2}, {4, 8, "u0", 2.5}}, 2, 1.2);
  EXPECT_NEAR(st.max_ghz, 1.3, 1e-12);
  // Request time: 10 + 4 ms; drift-time 1.3 * 4.
  EXPECT_NEAR(st.mean_ghz, 1.3 * 4.0 / 14.0, 1e-12);
  EXPECT_NEAR(st.request_seconds, 0.014, 1e-12);
}

TEST(Drift, SeparateDomainsDoNotInteract) {
  const auto st = drift_report({{0, 10, "u0", 1.2}, {0, 10, "u1", 2.5}}, 1, 1.2);
  EXPECT_DOUBLE_EQ(st.mean_ghz, 0.0);
}

std::vector<RequestInterval> sharers(int n, std::mt19937_64& rng) {
  const auto grid = FreqGrids::defaults().uncore();
  std::uniform_int_distribution<int> level(0, static_cast<int>(grid.size()) - 1);
  std::exponential_distribution<double> dur(1.0 / 20.0), gap(1.0 / 5.0);
  std::vector<RequestInterval> out;
  for (int s = 0; s < n; ++s) {
    double t = gap(rng);
    while (t < 5000.0) {
      const double d = dur(rng);
      out.push_back({t, t + d, "uncore0", grid[level(rng)]});
      t += d + gap(rng);
    }
  }
  return out;
}

TEST(Drift, GrowsWithSharingDegree) {
  std::mt19937_64 rng(12);
  const auto one = drift_report(sharers(1, rng), 1, 1.2);
  const auto twelve = drift_report(sharers(12, rng), 12, 1.2);
  EXPECT_DOUBLE_EQ(one.mean_ghz, 0.0);
  EXPECT_GT(twelve.mean_ghz, one.mean_ghz);
  EXPECT_GT(twelve.p95_ghz, 0.0);
}

TEST(Drift, CsvHeader) {
  std::ostringstream out;
  write_drift_csv(out, {{"core", DriftStats{}}});
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), kDriftHeader);
}

}  // namespace
}  // namespace okypous
