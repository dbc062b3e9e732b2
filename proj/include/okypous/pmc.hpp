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
#include <vector>

#include <json.hpp>

namespace okypous {

/// Performance-counter observation taken at the maximum Core/Uncore
/// configuration, split by the domain each counter characterizes.
struct PmcVector {
  std::vector<double> core;
  std::vector<double> uncore;
  std::vector<double> dram;

  std::size_t total_size() const { return core.size() + uncore.size() + dram.size(); }
  bool same_shape(const PmcVector& other) const;
  /// Throws Error(kConfig) on negative or non-finite counts.
  void validate() const;

  PmcVector scaled(double factor) const;

  friend bool operator==(const PmcVector&, const PmcVector&) = default;
};

nlohmann::json to_json(const PmcVector& pmcs);
PmcVector pmcs_from_json(const nlohmann::json& j);

}  // namespace okypous
