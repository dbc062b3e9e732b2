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
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "okypous/freq.hpp"
#include "okypous/pmc.hpp"

namespace okypous::sim {

/// Work in one domain as a linear function of input size, in Mcycles.
/// Mcycles divided by GHz gives milliseconds.
struct CycleLaw {
  double a = 0.0;
  double b = 0.0;

  double at(double size) const { return a * size + b; }
};

/// Multipliers a request variant applies to the class's work.
struct WorkVariant {
  double core_scale = 1.0;
  double memory_scale = 1.0;
};

struct Work {
  double core_mcycles = 0.0;
  double uncore_mcycles = 0.0;
  double dram_mcycles = 0.0;
};

/// Synthetic function class. Counters are linear in the domain work: counter
/// i of the core domain reads core_mix[i] * Wc, and so on.
struct FunctionClass {
  std::string id;
  CycleLaw core;
  CycleLaw uncore;
  CycleLaw dram;
  std::vector<double> core_mix;
  std::vector<double> uncore_mix;
  std::vector<double> dram_mix;
  std::map<std::string, WorkVariant> variants;

  bool has_variant(const std::string& key) const { return variants.count(key) != 0; }
};

Work work_of(const FunctionClass& cls, double size, const std::string& variant);

/// Noise-free latency: Wc/Fc + Wu/Fu + Wd/Fd.
double true_latency_ms(const Work& w, const FreqConfig& cfg, double dram_ghz);

PmcVector pmcs_of(const FunctionClass& cls, const Work& w);

struct NoiseParams {
  double latency_sigma = 0.05;
  double spike_prob = 0.01;
  double spike_factor = 3.0;
  double pmc_sigma = 0.02;
  double power_sigma = 0.02;
  // Additive interference: with probability interference_prob an execution
  // is inflated by interference_frac of its noise-free max-config latency.
  double interference_prob = 0.0;
  double interference_frac = 0.0;

  void validate() const;
  static NoiseParams none();
};

/// Multiplicative latency draw (lognormal with median 1, times the spike
/// factor with probability spike_prob).
double draw_latency_factor(const NoiseParams& noise, std::mt19937_64& rng);
PmcVector draw_observed_pmcs(const PmcVector& truth, const NoiseParams& noise,
                             std::mt19937_64& rng);

/// Ground-truth per-core power. Busy cores draw p(Fc, Fu) with
///   p = a0 + a1*Fc + a2*Fu + a3*Fc^2 + a4*Fu^2 + a5*Fc*Fu.
/// An idle core sheds every term involving Fc and keeps idle_fraction of
/// a0 plus its share of the uncore (a2, a4). Sockets add a static floor.
struct PowerTruth {
  std::array<double, 6> a{3.553, 0.4, 0.5, 0.2245, 0.3085, 0.04};
  double idle_fraction = 1.0;
  double socket_static_w = 20.0;

  double busy_w(const FreqConfig& cfg) const;
  double idle_w(const FreqConfig& cfg) const;
};

/// Weights that turn counters back into milliseconds. Every class in
/// default_classes() satisfies core_w . core_mix == 1, uncore_w . uncore_mix
/// == 1 and dram_w . dram_mix == 1 / dram_ghz, so the grey-box form is exact
/// for all of them with these weights.
struct CounterWeights {
  std::vector<double> core;
  std::vector<double> uncore;
  std::vector<double> dram;
};

CounterWeights default_counter_weights(std::size_t counters_per_domain);

/// Nine classes loosely shaped after common serverless benchmarks, spanning
/// compute-bound to memory-bound.
std::vector<FunctionClass> default_classes(std::size_t counters_per_domain = 4,
                                           double dram_ghz = 2.4);

nlohmann::json class_to_json(const FunctionClass& cls);
FunctionClass class_from_json(const nlohmann::json& j);

const FunctionClass& find_class(const std::vector<FunctionClass>& classes,
                                const std::string& id);

}  // namespace okypous::sim
