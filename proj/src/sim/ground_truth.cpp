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

#include "okypous/sim/ground_truth.hpp"

#include <algorithm>
#include <cmath>

#include "okypous/error.hpp"

namespace okypous::sim {

Work work_of(const FunctionClass& cls, double size, const std::string& variant) {
  WorkVariant v;
  if (const auto it = cls.variants.find(variant); it != cls.variants.end()) v = it->second;
  return {cls.core.at(size) * v.core_scale, cls.uncore.at(size) * v.memory_scale,
          cls.dram.at(size) * v.memory_scale};
}

double true_latency_ms(const Work& w, const FreqConfig& cfg, double dram_ghz) {
  return w.core_mcycles / cfg.core_ghz + w.uncore_mcycles / cfg.uncore_ghz +
         w.dram_mcycles / dram_ghz;
}

PmcVector pmcs_of(const FunctionClass& cls, const Work& w) {
  PmcVector p;
  for (double m : cls.core_mix) p.core.push_back(m * w.core_mcycles);
  for (double m : cls.uncore_mix) p.uncore.push_back(m * w.uncore_mcycles);
  for (double m : cls.dram_mix) p.dram.push_back(m * w.dram_mcycles);
  return p;
}

void NoiseParams::validate() const {
  const auto bad = [](double x) { return !std::isfinite(x) || x < 0.0; };
  if (bad(latency_sigma) || bad(pmc_sigma) || bad(power_sigma) || bad(interference_frac)) {
    throw Error(ErrorKind::kConfig, "noise parameters must be finite and nonnegative");
  }
  if (bad(spike_prob) || spike_prob > 1.0 || bad(interference_prob) ||
      interference_prob > 1.0) {
    throw Error(ErrorKind::kConfig, "noise probabilities must lie in [0, 1]");
  }
  if (!std::isfinite(spike_factor) || spike_factor < 1.0) {
    throw Error(ErrorKind::kConfig, "spike_factor must be >= 1");
  }
}

NoiseParams NoiseParams::none() {
  NoiseParams n;
  n.latency_sigma = 0.0;
  n.spike_prob = 0.0;
  n.pmc_sigma = 0.0;
  n.power_sigma = 0.0;
  n.interference_prob = 0.0;
  return n;
}

double draw_latency_factor(const NoiseParams& noise, std::mt19937_64& rng) {
  // Always consume the same number of draws so streams stay aligned across
  // noise settings.
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double z = normal(rng);
  const double u = uni(rng);
  double f = std::exp(noise.latency_sigma * z);
  if (u < noise.spike_prob) f *= noise.spike_factor;
  return f;
}

PmcVector draw_observed_pmcs(const PmcVector& truth, const NoiseParams& noise,
                             std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto jitter = [&](std::vector<double>& v) {
    for (double& x : v) x = std::max(0.0, x * (1.0 + noise.pmc_sigma * normal(rng)));
  };
  PmcVector p = truth;
  jitter(p.core);
  jitter(p.uncore);
  jitter(p.dram);
  return p;
}

double PowerTruth::busy_w(const FreqConfig& cfg) const {
  const double c = cfg.core_ghz;
  const double u = cfg.uncore_ghz;
  return a[0] + a[1] * c + a[2] * u + a[3] * c * c + a[4] * u * u + a[5] * c * u;
}

double PowerTruth::idle_w(const FreqConfig& cfg) const {
  const double u = cfg.uncore_ghz;
  return idle_fraction * a[0] + a[2] * u + a[4] * u * u;
}

namespace {

constexpr std::uint64_t kLibrarySeed = 0x0c0ffee5ULL;

std::vector<double> random_positive(std::size_t n, double lo, double hi,
                                    std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

// Rescales `mix` so that weights . mix == target.
void normalise(std::vector<double>& mix, const std::vector<double>& weights, double target) {
  double dot = 0.0;
  for (std::size_t i = 0; i < mix.size(); ++i) dot += weights[i] * mix[i];
  for (double& m : mix) m *= target / dot;
}

struct ClassShape {
  const char* id;
  double wc;
  double wu;
  double wd;
};

constexpr ClassShape kShapes[] = {
    {"dynamic-html", 900, 60, 30},        {"graph-bfs", 500, 900, 300},
    {"graph-mst", 700, 700, 200},         {"graph-pagerank", 1500, 1200, 400},
    {"video-processing", 3000, 800, 200}, {"compression", 1800, 500, 150},
    {"thumbnailer", 600, 300, 100},       {"uploader", 200, 150, 250},
    {"dna-visualisation", 2200, 400, 120},
};

CycleLaw law(double w_at_unit_size) { return {0.8 * w_at_unit_size, 0.2 * w_at_unit_size}; }

}  // namespace

CounterWeights default_counter_weights(std::size_t counters_per_domain) {
  if (counters_per_domain == 0) {
    throw Error(ErrorKind::kConfig, "counters_per_domain must be positive");
  }
  std::mt19937_64 rng(kLibrarySeed);
  CounterWeights w;
  w.core = random_positive(counters_per_domain, 0.5, 1.5, rng);
  w.uncore = random_positive(counters_per_domain, 0.5, 1.5, rng);
  w.dram = random_positive(counters_per_domain, 0.5, 1.5, rng);
  return w;
}

std::vector<FunctionClass> default_classes(std::size_t counters_per_domain, double dram_ghz) {
  const CounterWeights w = default_counter_weights(counters_per_domain);
  std::mt19937_64 rng(kLibrarySeed + 1);
  std::vector<FunctionClass> out;
  for (const auto& s : kShapes) {
    FunctionClass c;
    c.id = s.id;
    c.core = law(s.wc);
    c.uncore = law(s.wu);
    c.dram = law(s.wd);
    c.core_mix = random_positive(counters_per_domain, 0.2, 1.0, rng);
    c.uncore_mix = random_positive(counters_per_domain, 0.2, 1.0, rng);
    c.dram_mix = random_positive(counters_per_domain, 0.2, 1.0, rng);
    normalise(c.core_mix, w.core, 1.0);
    normalise(c.uncore_mix, w.uncore, 1.0);
    normalise(c.dram_mix, w.dram, 1.0 / dram_ghz);
    out.push_back(std::move(c));
  }
  // Request variants that change the compute/memory balance.
  for (auto& c : out) {
    if (c.id == "compression") {
      c.variants["text"] = {1.0, 1.0};
      c.variants["binary"] = {1.5, 0.7};
    } else if (c.id == "thumbnailer") {
      c.variants["png"] = {1.0, 1.0};
      c.variants["jpeg"] = {0.7, 1.4};
    }
  }
  return out;
}

nlohmann::json class_to_json(const FunctionClass& cls) {
  nlohmann::json j;
  j["id"] = cls.id;
  j["core"] = {cls.core.a, cls.core.b};
  j["uncore"] = {cls.uncore.a, cls.uncore.b};
  j["dram"] = {cls.dram.a, cls.dram.b};
  j["core_mix"] = cls.core_mix;
  j["uncore_mix"] = cls.uncore_mix;
  j["dram_mix"] = cls.dram_mix;
  nlohmann::json v = nlohmann::json::object();
  for (const auto& [k, wv] : cls.variants) {
    v[k] = {{"core_scale", wv.core_scale}, {"memory_scale", wv.memory_scale}};
  }
  j["variants"] = v;
  return j;
}

FunctionClass class_from_json(const nlohmann::json& j) {
  try {
    FunctionClass c;
    c.id = j.at("id").get<std::string>();
    const auto read_law = [&](const char* key) {
      const auto& a = j.at(key);
      if (!a.is_array() || a.size() != 2) {
        throw Error(ErrorKind::kConfig,
                    "class '" + c.id + "': '" + key + "' must be [a, b]");
      }
      return CycleLaw{a[0].get<double>(), a[1].get<double>()};
    };
    c.core = read_law("core");
    c.uncore = read_law("uncore");
    c.dram = read_law("dram");
    c.core_mix = j.at("core_mix").get<std::vector<double>>();
    c.uncore_mix = j.at("uncore_mix").get<std::vector<double>>();
    c.dram_mix = j.at("dram_mix").get<std::vector<double>>();
    if (j.contains("variants")) {
      for (const auto& [k, v] : j.at("variants").items()) {
        c.variants[k] = {v.value("core_scale", 1.0), v.value("memory_scale", 1.0)};
      }
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("bad function class: ") + e.what());
  }
}

const FunctionClass& find_class(const std::vector<FunctionClass>& classes,
                                const std::string& id) {
  for (const auto& c : classes) {
    if (c.id == id) return c;
  }
  throw Error(ErrorKind::kConfig, "unknown function class '" + id + "'");
}

}  // namespace okypous::sim
