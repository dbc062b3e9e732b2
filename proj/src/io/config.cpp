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

#include "okypous/io/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>

#include "okypous/catalog.hpp"
#include "okypous/error.hpp"
#include "okypous/trace.hpp"

namespace okypous::io {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Reader {
 public:
  Reader(const json& obj, std::string where, std::string source)
      : obj_(obj), where_(std::move(where)), source_(std::move(source)) {
    if (!obj_.is_object()) fail("", "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : obj_.items()) {
      if (!ok.count(k)) fail(k, "unknown key");
    }
  }

  bool has(const char* key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }

  template <typename T>
  T get(const char* key, T fallback) const {
    if (!has(key)) return fallback;
    return as<T>(key);
  }

  template <typename T>
  T need(const char* key) const {
    if (!has(key)) fail(key, "is required");
    return as<T>(key);
  }

  const json& sub(const char* key) const { return obj_.at(key); }
  std::string path(const char* key) const { return where_.empty() ? key : where_ + "." + key; }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    const std::string field = key.empty() ? where_ : (where_.empty() ? key : where_ + "." + key);
    throw Error(ErrorKind::kConfig,
                source_ + ": " + (field.empty() ? "" : "field '" + field + "' ") + why);
  }

 private:
  template <typename T>
  T as(const char* key) const {
    try {
      return obj_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(key, "has the wrong type");
    }
  }

  const json& obj_;
  std::string where_;
  std::string source_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, path.string() + ": " + e.what());
  }
}

ExperimentConfig parse_config(const json& doc, const fs::path& base_dir,
                              const std::string& source) {
  const Reader top(doc, "", source);
  top.allow({"catalog", "trace", "classes", "policy", "seed", "grids", "gains", "pid", "noise",
             "power", "cap_w", "cluster", "budget_mode", "profile_samples",
             "pretrain_samples_per_class", "switch_reserve_ms", "online_updates",
             "output_dir"});

  ExperimentConfig cfg;
  cfg.source = source;
  cfg.raw = doc;
  cfg.catalog = resolve(base_dir, top.need<std::string>("catalog"));
  cfg.trace = resolve(base_dir, top.need<std::string>("trace"));
  if (top.has("classes")) cfg.classes = resolve(base_dir, top.need<std::string>("classes"));
  if (top.has("output_dir")) {
    cfg.output_dir = resolve(base_dir, top.need<std::string>("output_dir"));
  }

  auto& s = cfg.sim;
  try {
    s.policy = sim::parse_policy(top.need<std::string>("policy"));
    s.budget_mode = sim::parse_budget_mode(top.get<std::string>("budget_mode", "greedy"));
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, source + ": " + e.what());
  }
  s.seed = top.need<std::uint64_t>("seed");
  s.profile_samples = top.get<std::size_t>("profile_samples", s.profile_samples);
  s.pretrain_samples_per_class =
      top.get<std::size_t>("pretrain_samples_per_class", s.pretrain_samples_per_class);
  s.switch_reserve_ms = top.get<double>("switch_reserve_ms", s.switch_reserve_ms);
  s.online_updates = top.get<bool>("online_updates", s.online_updates);
  if (top.has("cap_w")) s.cap_w = top.need<double>("cap_w");

  if (top.has("grids")) {
    const Reader g(top.sub("grids"), "grids", source);
    g.allow({"core", "uncore", "dram_ghz"});
    const auto defaults = FreqGrids::defaults();
    try {
      s.grids = FreqGrids(g.get<std::vector<double>>("core", defaults.core()),
                          g.get<std::vector<double>>("uncore", defaults.uncore()),
                          g.get<double>("dram_ghz", defaults.dram_ghz()));
    } catch (const Error& e) {
      g.fail("", e.what());
    }
  }
  if (top.has("gains")) {
    const Reader g(top.sub("gains"), "gains", source);
    g.allow({"k_neg", "k_min", "k_max", "ref_budget_ms"});
    s.gains.k_neg = g.get("k_neg", s.gains.k_neg);
    s.gains.k_min = g.get("k_min", s.gains.k_min);
    s.gains.k_max = g.get("k_max", s.gains.k_max);
    s.gains.ref_budget_ms = g.get("ref_budget_ms", s.gains.ref_budget_ms);
  }
  if (top.has("pid")) {
    const Reader g(top.sub("pid"), "pid", source);
    g.allow({"kp", "ki", "kd"});
    s.pid.kp = g.get("kp", s.pid.kp);
    s.pid.ki = g.get("ki", s.pid.ki);
    s.pid.kd = g.get("kd", s.pid.kd);
  }
  if (top.has("noise")) {
    const Reader g(top.sub("noise"), "noise", source);
    g.allow({"latency_sigma", "spike_prob", "spike_factor", "pmc_sigma", "power_sigma",
             "interference_prob", "interference_frac"});
    auto& n = s.noise;
    n.latency_sigma = g.get("latency_sigma", n.latency_sigma);
    n.spike_prob = g.get("spike_prob", n.spike_prob);
    n.spike_factor = g.get("spike_factor", n.spike_factor);
    n.pmc_sigma = g.get("pmc_sigma", n.pmc_sigma);
    n.power_sigma = g.get("power_sigma", n.power_sigma);
    n.interference_prob = g.get("interference_prob", n.interference_prob);
    n.interference_frac = g.get("interference_frac", n.interference_frac);
  }
  if (top.has("power")) {
    const Reader g(top.sub("power"), "power", source);
    g.allow({"coefficients", "idle_fraction", "socket_static_w"});
    auto& p = s.power_truth;
    if (g.has("coefficients")) {
      const auto a = g.need<std::vector<double>>("coefficients");
      if (a.size() != 6) g.fail("coefficients", "must have six entries");
      std::copy(a.begin(), a.end(), p.a.begin());
    }
    p.idle_fraction = g.get("idle_fraction", p.idle_fraction);
    p.socket_static_w = g.get("socket_static_w", p.socket_static_w);
  }
  if (top.has("cluster")) {
    const Reader g(top.sub("cluster"), "cluster", source);
    g.allow({"sockets", "cores_per_socket", "core_switch_us", "uncore_switch_us",
             "governor_tick_ms", "power_sample_ms", "pool_interval_ms", "horizon_ms"});
    auto& c = s.cluster;
    c.sockets = g.get("sockets", c.sockets);
    c.cores_per_socket = g.get("cores_per_socket", c.cores_per_socket);
    c.core_switch_us = g.get("core_switch_us", c.core_switch_us);
    c.uncore_switch_us = g.get("uncore_switch_us", c.uncore_switch_us);
    c.governor_tick_ms = g.get("governor_tick_ms", c.governor_tick_ms);
    c.power_sample_ms = g.get("power_sample_ms", c.power_sample_ms);
    c.pool_interval_ms = g.get("pool_interval_ms", c.pool_interval_ms);
    c.horizon_ms = g.get("horizon_ms", c.horizon_ms);
  }
  try {
    s.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, source + ": " + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  const json doc = read_json_file(path);
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_config(doc, base, path.string());
}

void apply_seed_override(ExperimentConfig& config) {
  const char* env = std::getenv("OKY_SEED");
  if (!env || !*env) return;
  std::uint64_t seed = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto [ptr, ec] = std::from_chars(env, end, seed);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::kConfig, std::string("OKY_SEED is not an unsigned integer: ") + env);
  }
  config.sim.seed = seed;
  config.raw["seed"] = seed;
}

std::vector<sim::FunctionClass> load_classes(const fs::path& path) {
  const json doc = read_json_file(path);
  if (!doc.is_object() || !doc.contains("classes") || !doc.at("classes").is_array()) {
    throw Error(ErrorKind::kConfig, path.string() + ": expected {\"classes\": [...]}");
  }
  std::vector<sim::FunctionClass> out;
  for (const auto& c : doc.at("classes")) out.push_back(sim::class_from_json(c));
  return out;
}

void save_classes(const fs::path& path, const std::vector<sim::FunctionClass>& classes) {
  json doc;
  doc["classes"] = json::array();
  for (const auto& c : classes) doc["classes"].push_back(sim::class_to_json(c));
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kConfig, "cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

sim::SimInput load_inputs(const ExperimentConfig& config) {
  sim::SimInput in;
  in.classes = config.classes ? load_classes(*config.classes)
                              : sim::default_classes(4, config.sim.grids.dram_ghz());
  in.workflows = load_catalog(config.catalog);
  in.trace = load_trace(config.trace);
  return in;
}

}  // namespace okypous::io
