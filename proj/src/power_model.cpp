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

#include "okypous/power_model.hpp"

#include <cmath>
#include <set>

#include <Eigen/Dense>

#include "okypous/error.hpp"

namespace okypous {

double evaluate_power_polynomial(const PowerModel::Coefficients& a, const FreqConfig& cfg) {
  const double c = cfg.core_ghz;
  const double u = cfg.uncore_ghz;
  return a[0] + a[1] * c + a[2] * u + a[3] * c * c + a[4] * u * u + a[5] * c * u;
}

PowerModel PowerModel::fit(std::span<const PowerSample> samples, const FreqGrids& grids) {
  if (samples.size() < 6) {
    throw Error(ErrorKind::kInsufficientCoverage,
                "power fit needs at least 6 samples, got " + std::to_string(samples.size()));
  }
  std::set<double> cores;
  std::set<double> uncores;
  for (const auto& s : samples) {
    cores.insert(s.cfg.core_ghz);
    uncores.insert(s.cfg.uncore_ghz);
  }
  if (cores.size() < 3 || uncores.size() < 3) {
    throw Error(ErrorKind::kInsufficientCoverage,
                "power fit needs >= 3 distinct core and uncore frequencies");
  }

  const auto m = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd x(m, 6);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    const double c = s.cfg.core_ghz;
    const double u = s.cfg.uncore_ghz;
    x.row(i) << 1.0, c, u, c * c, u * u, c * u;
    y[i] = s.watts;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-12);
  if (qr.rank() < 6) {
    throw Error(ErrorKind::kInsufficientCoverage, "power samples give a rank-deficient design");
  }
  const Eigen::VectorXd beta = qr.solve(y);
  Coefficients a{};
  for (int i = 0; i < 6; ++i) a[static_cast<std::size_t>(i)] = beta[i];
  PowerModel model(a);
  model.check_grid(grids);
  return model;
}

PowerModel PowerModel::from_coefficients(const Coefficients& a, const FreqGrids* grids) {
  PowerModel model(a);
  if (grids != nullptr) model.check_grid(*grids);
  return model;
}

void PowerModel::check_grid(const FreqGrids& grids) const {
  const auto& cg = grids.core();
  const auto& ug = grids.uncore();
  for (std::size_t i = 0; i < cg.size(); ++i) {
    for (std::size_t j = 0; j < ug.size(); ++j) {
      const double p = evaluate_power_polynomial(coeffs_, {cg[i], ug[j]});
      if (!(p > 0.0)) {
        throw Error(ErrorKind::kNonMonotoneFit, "fitted power is not positive on the grid");
      }
      if (i > 0 && p < evaluate_power_polynomial(coeffs_, {cg[i - 1], ug[j]})) {
        throw Error(ErrorKind::kNonMonotoneFit, "fitted power decreases along the core axis");
      }
      if (j > 0 && p < evaluate_power_polynomial(coeffs_, {cg[i], ug[j - 1]})) {
        throw Error(ErrorKind::kNonMonotoneFit, "fitted power decreases along the uncore axis");
      }
    }
  }
}

double PowerModel::predict(const FreqConfig& cfg) const {
  if (!fitted_) throw Error(ErrorKind::kUntrained, "power model is not fitted");
  return evaluate_power_polynomial(coeffs_, cfg);
}

nlohmann::json PowerModel::to_json() const { return coeffs_; }

PowerModel PowerModel::from_json(const nlohmann::json& j, const FreqGrids* grids) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 6) throw Error(ErrorKind::kParse, "power model needs 6 coefficients");
  Coefficients a{};
  std::copy(v.begin(), v.end(), a.begin());
  return from_coefficients(a, grids);
}

double mean_absolute_percentage_error(const PowerModel& model,
                                      std::span<const PowerSample> samples) {
  if (samples.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : samples) {
    total += std::abs(model.predict(s.cfg) - s.watts) / s.watts;
  }
  return 100.0 * total / static_cast<double>(samples.size());
}

}  // namespace okypous
