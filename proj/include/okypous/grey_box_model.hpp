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
#include <deque>
#include <set>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "okypous/freq.hpp"
#include "okypous/pmc.hpp"

namespace okypous {

struct LatencySample {
  PmcVector pmcs;
  FreqConfig cfg;
  double latency_ms = 0.0;
};

struct DomainShares {
  double core_share = 0.0;
  // Uncore plus DRAM terms.
  double memory_share = 0.0;
};

/// Function-agnostic latency model
///
///   L(Fc, Fu) = sum_i c_i*PMCc_i / Fc + sum_i u_i*PMCu_i / Fu + sum_i d_i*PMCd_i
///
/// Frequencies enter analytically; only the counter weights are learned. The
/// weights are kept nonnegative, so predictions never increase with either
/// frequency. One instance serves every function class.
///
/// Fitting is least squares over a bounded window of samples. Negative
/// weights are clipped and the remaining features refit until none are
/// negative. Rank-deficient designs fall back to ridge (lambda = 1e-8 on
/// Jacobi-scaled normal equations).
class GreyBoxModel {
 public:
  static constexpr std::size_t kDefaultWindow = 10000;
  static constexpr double kRidgeLambda = 1e-8;

  GreyBoxModel(std::size_t core_counters, std::size_t uncore_counters,
               std::size_t dram_counters, std::size_t window_cap = kDefaultWindow);

  /// Batch fit. Throws Error(kUntrained) on an empty sample set and
  /// Error(kConfig) on nonpositive latencies or inconsistent vector shapes.
  static GreyBoxModel fit(std::span<const LatencySample> samples,
                          std::size_t window_cap = kDefaultWindow);

  /// A trained model with fixed weights and an empty window.
  static GreyBoxModel from_coefficients(std::vector<double> core,
                                        std::vector<double> uncore,
                                        std::vector<double> dram,
                                        std::size_t window_cap = kDefaultWindow);

  /// Appends the sample (evicting the oldest beyond the window cap) and
  /// refits. A sample identical to one already in the window carries no new
  /// information and leaves the model untouched.
  void update(const LatencySample& sample);

  /// Throws Error(kUntrained) before the first fit.
  double predict(const PmcVector& pmcs, const FreqConfig& cfg) const;

  /// Throws Error(kUndefinedShares) when the predicted latency is zero.
  DomainShares domain_contributions(const PmcVector& pmcs, const FreqConfig& cfg) const;

  /// Share of each term (core counters, then uncore, then dram) in the
  /// prediction. Same error contract as domain_contributions().
  std::vector<double> counter_contributions(const PmcVector& pmcs,
                                            const FreqConfig& cfg) const;

  bool trained() const { return trained_; }
  const std::vector<double>& core_coefficients() const { return core_; }
  const std::vector<double>& uncore_coefficients() const { return uncore_; }
  const std::vector<double>& dram_coefficients() const { return dram_; }
  const std::deque<LatencySample>& window() const { return window_; }
  std::size_t window_cap() const { return window_cap_; }
  std::size_t feature_count() const { return core_.size() + uncore_.size() + dram_.size(); }

  /// {"c": [...], "u": [...], "d": [...], "window": [...]}
  nlohmann::json to_json() const;
  static GreyBoxModel from_json(const nlohmann::json& j);

 private:
  Eigen::VectorXd features(const PmcVector& pmcs, const FreqConfig& cfg) const;
  void check_shape(const PmcVector& pmcs) const;
  void accumulate(const LatencySample& sample, double sign);
  void refit();
  static std::vector<double> fingerprint(const LatencySample& sample);

  std::vector<double> core_;
  std::vector<double> uncore_;
  std::vector<double> dram_;
  bool trained_ = false;
  std::size_t window_cap_;
  std::deque<LatencySample> window_;
  std::set<std::vector<double>> fingerprints_;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd moment_;
};

/// Mean absolute percentage error of the model on the samples, in percent.
double mean_absolute_percentage_error(const GreyBoxModel& model,
                                      std::span<const LatencySample> samples);

/// Single-writer / multi-reader holder: predictions may run concurrently,
/// updates take exclusive access.
class SharedLatencyModel {
 public:
  explicit SharedLatencyModel(GreyBoxModel model) : model_(std::move(model)) {}

  double predict(const PmcVector& pmcs, const FreqConfig& cfg) const {
    std::shared_lock lock(mutex_);
    return model_.predict(pmcs, cfg);
  }
  void update(const LatencySample& sample) {
    std::unique_lock lock(mutex_);
    model_.update(sample);
  }
  GreyBoxModel snapshot() const {
    std::shared_lock lock(mutex_);
    return model_;
  }

 private:
  mutable std::shared_mutex mutex_;
  GreyBoxModel model_;
};

}  // namespace okypous
