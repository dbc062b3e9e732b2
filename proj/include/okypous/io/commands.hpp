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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "okypous/error.hpp"
#include "okypous/grey_box_model.hpp"
#include "okypous/io/config.hpp"
#include "okypous/power_model.hpp"
#include "okypous/sim/metrics.hpp"

namespace okypous::io {

/// Runs one experiment and writes summary.json, invocations.csv,
/// decisions.csv and power.csv into `out_dir` (or the config's output_dir).
sim::MetricsReport cmd_run(const std::filesystem::path& config_path,
                           const std::optional<std::filesystem::path>& out_dir,
                           std::ostream& log);

void write_reports(const sim::MetricsReport& report, const std::filesystem::path& dir);

inline constexpr const char* kCompareHeader =
    "policy,completed,violation_rate,mean_power_w,energy_j,ratio_p50,ratio_p95,ratio_p99";

/// Throws Error(kConfig) listing every differing field when the configs
/// differ in anything besides policy and output_dir.
void check_comparable(const std::vector<ExperimentConfig>& configs);

/// Runs each config and writes one comparison row per policy.
std::vector<sim::MetricsReport> cmd_compare(const std::vector<std::filesystem::path>& configs,
                                            std::ostream& table);

void write_compare_table(std::ostream& out, const std::vector<sim::MetricsReport>& reports);

enum class ModelKind { kLatency, kPower };
ModelKind parse_model_kind(const std::string& name);

struct FitReport {
  std::size_t train = 0;
  std::size_t held_out = 0;
  double mape_percent = 0.0;
  nlohmann::json model;
  // Latency fits: mean share of each counter term on the held-out set.
  std::vector<double> counter_shares;
  DomainShares domain_shares;
};

/// Latency samples CSV: core_ghz,uncore_ghz,latency_ms,pmc_c0..,pmc_u0..,pmc_d0..
/// Power samples CSV: core_ghz,uncore_ghz,watts
/// Every fifth row is held out. Malformed or empty files throw Error(kParse).
FitReport cmd_fit(ModelKind kind, const std::filesystem::path& samples,
                  const std::optional<std::filesystem::path>& out);

std::vector<LatencySample> load_latency_samples(const std::filesystem::path& path);
void write_latency_samples(std::ostream& out, const std::vector<LatencySample>& samples);
std::vector<PowerSample> load_power_samples(const std::filesystem::path& path);
void write_power_samples(std::ostream& out, const std::vector<PowerSample>& samples);

struct GenOptions {
  std::uint64_t seed = 7;
  std::size_t workflows = 50;
  std::size_t invocations = 2000;
  double slo_scale = 1.5;
  double utilization = 0.35;
  bool noise = true;
  std::string policy = "okypous";
};

/// Writes a synthetic experiment into `dir`: classes.json, catalog.json,
/// trace.csv, config.json, latency_samples.csv and power_samples.csv.
void cmd_gen(const std::filesystem::path& dir, const GenOptions& options);

/// Process exit code for a library error.
int exit_code_for(ErrorKind kind);

}  // namespace okypous::io
