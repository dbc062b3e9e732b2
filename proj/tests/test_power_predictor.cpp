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

#include <random>

#include "okypous/error.hpp"
#include "okypous/power_model.hpp"
#include "okypous/sim/ground_truth.hpp"

namespace okypous {
namespace {

double poly(const PowerModel::Coefficients& a, double c, double u) {
  return a[0] + a[1] * c + a[2] * u + a[3] * c * c + a[4] * u * u + a[5] * c * u;
}

TEST(PowerModel, PolynomialByHand) {
  const auto m = PowerModel::from_coefficients({10, 2, 3, 0, 0, 0});
  EXPECT_DOUBLE_EQ(m.predict({2.0, 2.0}), 20.0);
}

TEST(PowerModel, ExactRecovery) {
  const PowerModel::Coefficients a{4.1, 0.35, 0.6, 0.2, 0.3, 0.05};
  const auto g = FreqGrids::defaults();
  std::vector<PowerSample> s;
  for (const auto& c : g.all_configs()) s.push_back({c, poly(a, c.core_ghz, c.uncore_ghz)});
  const auto m = PowerModel::fit(s, g);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(m.coefficients()[i], a[i], 1e-6 * a[i]) << i;
}

TEST(PowerModel, TooFewSamples) {
  const auto g = FreqGrids::defaults();
  std::vector<PowerSample> s;
  for (int i = 0; i < 5; ++i) s.push_back({g.all_configs()[i * 9], 5.0 + i});
  try {
    PowerModel::fit(s, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInsufficientCoverage);
  }
}

TEST(PowerModel, NarrowCoverageRejected) {
  const auto g = FreqGrids::defaults();
  std::vector<PowerSample> s;
  for (double c : g.core()) {
    s.push_back({{c, 1.2}, 5 + c});
    s.push_back({{c, 2.9}, 6 + c});
  }
  EXPECT_THROW(PowerModel::fit(s, g), Error);
}

TEST(PowerModel, NonMonotoneFitRejected) {
  const auto g = FreqGrids::defaults();
  std::vector<PowerSample> s;
  // Falls with core frequency.
  for (const auto& c : g.all_configs()) s.push_back({c, 20.0 - 3.0 * c.core_ghz + c.uncore_ghz});
  try {
    PowerModel::fit(s, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNonMonotoneFit);
  }
}

TEST(PowerModel, NoisyHeldOutMapeAndMonotone) {
  const auto g = FreqGrids::defaults();
  const sim::PowerTruth truth;
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n(0.0, 0.02);
  std::vector<PowerSample> train, test;
  for (int rep = 0; rep < 4; ++rep) {
    for (const auto& c : g.all_configs()) {
      (rep < 2 ? train : test).push_back({c, truth.busy_w(c) * (1.0 + n(rng))});
    }
  }
  const auto m = PowerModel::fit(train, g);
  EXPECT_LE(mean_absolute_percentage_error(m, test), 2.0);
  for (std::size_t i = 0; i < g.core().size(); ++i) {
    for (std::size_t j = 0; j < g.uncore().size(); ++j) {
      const double here = m.predict({g.core()[i], g.uncore()[j]});
      if (i + 1 < g.core().size()) EXPECT_LE(here, m.predict({g.core()[i + 1], g.uncore()[j]}));
      if (j + 1 < g.uncore().size()) EXPECT_LE(here, m.predict({g.core()[i], g.uncore()[j + 1]}));
    }
  }
}

TEST(PowerModel, GridExtremesAreExtremes) {
  const auto g = FreqGrids::defaults();
  const sim::PowerTruth truth;
  const auto m = PowerModel::from_coefficients(truth.a, &g);
  double lo = 1e9, hi = -1e9;
  for (const auto& c : g.all_configs()) {
    lo = std::min(lo, m.predict(c));
    hi = std::max(hi, m.predict(c));
  }
  EXPECT_DOUBLE_EQ(m.predict(g.min_config()), lo);
  EXPECT_DOUBLE_EQ(m.predict({2.5, 2.9}), hi);
}

TEST(PowerModel, UncoreSpanExceedsCoreSpan) {
  const auto g = FreqGrids::defaults();
  const sim::PowerTruth truth;
  const double top = truth.busy_w(g.max_config());
  for (double u : g.uncore()) {
    const double core_span = (truth.busy_w({2.5, u}) - truth.busy_w({1.2, u})) / truth.busy_w({2.5, u});
    for (double c : g.core()) {
      const double uncore_span =
          (truth.busy_w({c, 2.9}) - truth.busy_w({c, 1.2})) / truth.busy_w({c, 2.9});
      EXPECT_GT(uncore_span, core_span);
    }
  }
  // Roughly the characterised ranges.
  const double core_span = (top - truth.busy_w({1.2, 2.9})) / top;
  const double uncore_span = (top - truth.busy_w({2.5, 1.2})) / top;
  EXPECT_NEAR(core_span, 0.16, 0.03);
  EXPECT_NEAR(uncore_span, 0.30, 0.03);
}

TEST(PowerModel, UnfittedThrowsAndJsonRoundTrips) {
  PowerModel m;
  EXPECT_THROW(m.predict({1.2, 1.2}), Error);
  const auto f = PowerModel::from_coefficients({1, 2, 3, 4, 5, 6});
  EXPECT_EQ(PowerModel::from_json(f.to_json()).coefficients(), f.coefficients());
}

}  // namespace
}  // namespace okypous
