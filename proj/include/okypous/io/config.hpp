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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "okypous/sim/simulator.hpp"

namespace okypous::io {

/// One experiment: input files plus simulator settings. Relative paths are
/// resolved against the directory of the config file.
struct ExperimentConfig {
  std::filesystem::path source;
  std::filesystem::path catalog;
  std::filesystem::path trace;
  std::optional<std::filesystem::path> classes;
  std::optional<std::filesystem::path> output_dir;
  sim::SimConfig sim;
  // The document as read, used to compare experiments field by field.
  nlohmann::json raw;
};

/// Validates a config document. Unknown keys, wrong types and bad values
/// throw Error(kConfig) naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& doc,
                              const std::filesystem::path& base_dir,
                              const std::string& source);

/// Reads and validates a config file. A missing file throws Error(kConfig)
/// naming the path; malformed JSON throws Error(kParse) with the line.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies the OKY_SEED environment variable, if set.
void apply_seed_override(ExperimentConfig& config);

std::vector<sim::FunctionClass> load_classes(const std::filesystem::path& path);
void save_classes(const std::filesystem::path& path,
                  const std::vector<sim::FunctionClass>& classes);

/// Loads catalog, trace and class library (the built-in one when the config
/// names none).
sim::SimInput load_inputs(const ExperimentConfig& config);

/// Reads a JSON file; Error(kConfig) if missing, Error(kParse) if malformed.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace okypous::io
