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

#include <array>
#include <optional>
#include <span>

#include <json.hpp>

#include "okypous/freq.hpp"

namespace okypous {

struct PowerSample {
  FreqConfig cfg;
  double watts = 0.0;
};

/// Per-core active power as a second-degree polynomial in (Fc, Fu):
///   p = a0 + a1*Fc + a2*Fu + a3*Fc^2 + a4*Fu^2 + a5*Fc*Fu   [W]
class PowerModel {
 public:
  using Coefficients = std::array<double, 6>;

  PowerModel() = default;

  /// Least-squares fit, then verifies the fit is positive and nondecreasing
  /// along both axes at every grid point. Throws Error(kInsufficientCoverage)
  /// for fewer than six samples, fewer than three distinct values on either
  /// axis, or a rank-deficient design; Error(kNonMonotoneFit) when the grid
  /// check fails.
  static PowerModel fit(std::span<const PowerSample> samples, const FreqGrids& grids);

  /// Skips the grid check when `grids` is null.
  static PowerModel from_coefficients(const Coefficients& a,
                                      const FreqGrids* grids = nullptr);

  /// Throws Error(kUntrained) on a default-constructed model.
  double predict(const FreqConfig& cfg) const;

  bool fitted() const { return fitted_; }
  const Coefficients& coefficients() const { return coeffs_; }

  nlohmann::json to_json() const;
  static PowerModel from_json(const nlohmann::json& j, const FreqGrids* grids = nullptr);

 private:
  explicit PowerModel(const Coefficients& a) : coeffs_(a), fitted_(true) {}
  void check_grid(const FreqGrids& grids) const;

  Coefficients coeffs_{};
  bool fitted_ = false;
};

double evaluate_power_polynomial(const PowerModel::Coefficients& a, const FreqConfig& cfg);

/// Mean absolute percentage error in percent.
double mean_absolute_percentage_error(const PowerModel& model,
                                      std::span<const PowerSample> samples);

}  // namespace okypous
