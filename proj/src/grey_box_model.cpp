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

#include "okypous/grey_box_model.hpp"

#include <cmath>
#include <numeric>

#include "okypous/error.hpp"

namespace okypous {

GreyBoxModel::GreyBoxModel(std::size_t core_counters, std::size_t uncore_counters,
                           std::size_t dram_counters, std::size_t window_cap)
    : core_(core_counters, 0.0),
      uncore_(uncore_counters, 0.0),
      dram_(dram_counters, 0.0),
      window_cap_(window_cap) {
  if (window_cap_ == 0) throw Error(ErrorKind::kConfig, "window cap must be positive");
  const auto n = static_cast<Eigen::Index>(feature_count());
  gram_ = Eigen::MatrixXd::Zero(n, n);
  moment_ = Eigen::VectorXd::Zero(n);
}

GreyBoxModel GreyBoxModel::fit(std::span<const LatencySample> samples,
                               std::size_t window_cap) {
  if (samples.empty()) {
    throw Error(ErrorKind::kUntrained, "cannot fit a latency model without samples");
  }
  const auto& first = samples.front().pmcs;
  GreyBoxModel model(first.core.size(), first.uncore.size(), first.dram.size(), window_cap);
  for (const auto& s : samples) {
    model.check_shape(s.pmcs);
    if (!(s.latency_ms > 0.0)) {
      throw Error(ErrorKind::kConfig, "training latencies must be positive");
    }
    auto key = fingerprint(s);
    if (model.fingerprints_.count(key) != 0) continue;
    model.fingerprints_.insert(std::move(key));
    model.window_.push_back(s);
    model.accumulate(s, +1.0);
    if (model.window_.size() > model.window_cap_) {
      const LatencySample old = model.window_.front();
      model.window_.pop_front();
      model.accumulate(old, -1.0);
      model.fingerprints_.erase(fingerprint(old));
    }
  }
  model.refit();
  return model;
}

GreyBoxModel GreyBoxModel::from_coefficients(std::vector<double> core,
                                             std::vector<double> uncore,
                                             std::vector<double> dram,
                                             std::size_t window_cap) {
  GreyBoxModel model(core.size(), uncore.size(), dram.size(), window_cap);
  for (const auto* v : {&core, &uncore, &dram}) {
    for (double x : *v) {
      if (!(x >= 0.0)) throw Error(ErrorKind::kConfig, "coefficients must be >= 0");
    }
  }
  model.core_ = std::move(core);
  model.uncore_ = std::move(uncore);
  model.dram_ = std::move(dram);
  model.trained_ = true;
  return model;
}

void GreyBoxModel::update(const LatencySample& sample) {
  check_shape(sample.pmcs);
  if (!(sample.latency_ms > 0.0)) {
    throw Error(ErrorKind::kConfig, "training latencies must be positive");
  }
  auto key = fingerprint(sample);
  if (fingerprints_.count(key) != 0) return;
  fingerprints_.insert(std::move(key));
  window_.push_back(sample);
  accumulate(sample, +1.0);
  if (window_.size() > window_cap_) {
    const LatencySample old = window_.front();
    window_.pop_front();
    accumulate(old, -1.0);
    fingerprints_.erase(fingerprint(old));
  }
  refit();
}

double GreyBoxModel::predict(const PmcVector& pmcs, const FreqConfig& cfg) const {
  if (!trained_) throw Error(ErrorKind::kUntrained, "latency model is not trained");
  check_shape(pmcs);
  double core = 0.0;
  double uncore = 0.0;
  double dram = 0.0;
  for (std::size_t i = 0; i < core_.size(); ++i) core += core_[i] * pmcs.core[i];
  for (std::size_t i = 0; i < uncore_.size(); ++i) uncore += uncore_[i] * pmcs.uncore[i];
  for (std::size_t i = 0; i < dram_.size(); ++i) dram += dram_[i] * pmcs.dram[i];
  return core / cfg.core_ghz + uncore / cfg.uncore_ghz + dram;
}

DomainShares GreyBoxModel::domain_contributions(const PmcVector& pmcs,
                                                const FreqConfig& cfg) const {
  const auto terms = counter_contributions(pmcs, cfg);
  DomainShares shares;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    (i < core_.size() ? shares.core_share : shares.memory_share) += terms[i];
  }
  return shares;
}

std::vector<double> GreyBoxModel::counter_contributions(const PmcVector& pmcs,
                                                        const FreqConfig& cfg) const {
  if (!trained_) throw Error(ErrorKind::kUntrained, "latency model is not trained");
  check_shape(pmcs);
  std::vector<double> terms;
  terms.reserve(feature_count());
  for (std::size_t i = 0; i < core_.size(); ++i) {
    terms.push_back(core_[i] * pmcs.core[i] / cfg.core_ghz);
  }
  for (std::size_t i = 0; i < uncore_.size(); ++i) {
    terms.push_back(uncore_[i] * pmcs.uncore[i] / cfg.uncore_ghz);
  }
  for (std::size_t i = 0; i < dram_.size(); ++i) terms.push_back(dram_[i] * pmcs.dram[i]);
  const double total = std::accumulate(terms.begin(), terms.end(), 0.0);
  if (!(total > 0.0)) {
    throw Error(ErrorKind::kUndefinedShares,
                "contribution shares are undefined for a zero prediction");
  }
  for (double& t : terms) t /= total;
  return terms;
}

Eigen::VectorXd GreyBoxModel::features(const PmcVector& pmcs, const FreqConfig& cfg) const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(feature_count()));
  Eigen::Index k = 0;
  for (double v : pmcs.core) x[k++] = v / cfg.core_ghz;
  for (double v : pmcs.uncore) x[k++] = v / cfg.uncore_ghz;
  for (double v : pmcs.dram) x[k++] = v;
  return x;
}

void GreyBoxModel::check_shape(const PmcVector& pmcs) const {
  if (pmcs.core.size() != core_.size() || pmcs.uncore.size() != uncore_.size() ||
      pmcs.dram.size() != dram_.size()) {
    throw Error(ErrorKind::kConfig, "PMC vector shape does not match the model");
  }
}

void GreyBoxModel::accumulate(const LatencySample& sample, double sign) {
  const Eigen::VectorXd x = features(sample.pmcs, sample.cfg);
  gram_.noalias() += sign * x * x.transpose();
  moment_.noalias() += sign * sample.latency_ms * x;
}

void GreyBoxModel::refit() {
  const auto n = static_cast<Eigen::Index>(feature_count());
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (gram_(j, j) > 0.0) active.push_back(j);
  }

  while (!active.empty()) {
    const auto k = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd g(k, k);
    Eigen::VectorXd b(k);
    Eigen::VectorXd scale(k);
    for (Eigen::Index r = 0; r < k; ++r) scale[r] = 1.0 / std::sqrt(gram_(active[r], active[r]));
    for (Eigen::Index r = 0; r < k; ++r) {
      b[r] = moment_[active[r]] * scale[r];
      for (Eigen::Index c = 0; c < k; ++c) {
        g(r, c) = gram_(active[r], active[c]) * scale[r] * scale[c];
      }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(g);
    qr.setThreshold(1e-10);
    Eigen::VectorXd solution;
    if (qr.rank() < k) {
      // A couple of refinement passes remove the ridge shrinkage along the
      // directions the data does determine.
      const auto ridge = (g + kRidgeLambda * Eigen::MatrixXd::Identity(k, k)).ldlt();
      solution = ridge.solve(b);
      for (int pass = 0; pass < 2; ++pass) solution += ridge.solve(b - g * solution);
    } else {
      solution = qr.solve(b);
    }
    solution = solution.cwiseProduct(scale);

    std::vector<Eigen::Index> kept;
    for (Eigen::Index r = 0; r < k; ++r) {
      if (solution[r] >= 0.0) kept.push_back(active[r]);
    }
    if (kept.size() == active.size()) {
      beta.setZero();
      for (Eigen::Index r = 0; r < k; ++r) beta[active[r]] = solution[r];
      break;
    }
    active = std::move(kept);
    beta.setZero();
  }

  Eigen::Index k = 0;
  for (double& v : core_) v = beta[k++];
  for (double& v : uncore_) v = beta[k++];
  for (double& v : dram_) v = beta[k++];
  trained_ = !window_.empty();
}

std::vector<double> GreyBoxModel::fingerprint(const LatencySample& s) {
  std::vector<double> key;
  key.reserve(s.pmcs.total_size() + 3);
  key.insert(key.end(), s.pmcs.core.begin(), s.pmcs.core.end());
  key.insert(key.end(), s.pmcs.uncore.begin(), s.pmcs.uncore.end());
  key.insert(key.end(), s.pmcs.dram.begin(), s.pmcs.dram.end());
  key.push_back(s.cfg.core_ghz);
  key.push_back(s.cfg.uncore_ghz);
  key.push_back(s.latency_ms);
  return key;
}

nlohmann::json GreyBoxModel::to_json() const {
  nlohmann::json window = nlohmann::json::array();
  for (const auto& s : window_) {
    window.push_back({{"pmcs", okypous::to_json(s.pmcs)},
                      {"core_ghz", s.cfg.core_ghz},
                      {"uncore_ghz", s.cfg.uncore_ghz},
                      {"latency_ms", s.latency_ms}});
  }
  return {{"c", core_}, {"u", uncore_}, {"d", dram_}, {"window", window},
          {"window_cap", window_cap_}};
}

GreyBoxModel GreyBoxModel::from_json(const nlohmann::json& j) {
  const std::size_t cap = j.value("window_cap", kDefaultWindow);
  auto model = from_coefficients(j.at("c").get<std::vector<double>>(),
                                 j.at("u").get<std::vector<double>>(),
                                 j.at("d").get<std::vector<double>>(), cap);
  // Restore the window without refitting so the dumped weights are kept
  // bit-for-bit; the next update() refits from the restored window.
  if (j.contains("window")) {
    for (const auto& w : j["window"]) {
      LatencySample s{pmcs_from_json(w.at("pmcs")),
                      {w.at("core_ghz").get<double>(), w.at("uncore_ghz").get<double>()},
                      w.at("latency_ms").get<double>()};
      model.check_shape(s.pmcs);
      auto key = fingerprint(s);
      if (model.fingerprints_.count(key) != 0) continue;
      model.fingerprints_.insert(std::move(key));
      model.window_.push_back(s);
      model.accumulate(s, +1.0);
    }
  }
  return model;
}

double mean_absolute_percentage_error(const GreyBoxModel& model,
                                      std::span<const LatencySample> samples) {
  if (samples.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : samples) {
    total += std::abs(model.predict(s.pmcs, s.cfg) - s.latency_ms) / s.latency_ms;
  }
  return 100.0 * total / static_cast<double>(samples.size());
}

}  // namespace okypous
