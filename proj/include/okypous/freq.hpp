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

namespace okypous {

/// One operating point: a Core frequency and an Uncore frequency, in GHz.
///
/// A FreqConfig obtained from FreqGrids::config() is guaranteed to lie on the
/// grid. Plain aggregate construction is allowed for operating points that
/// are not grid-bound (e.g. the effective frequencies of a training sample).
struct FreqConfig {
  double core_ghz = 0.0;
  double uncore_ghz = 0.0;

  friend bool operator==(const FreqConfig&, const FreqConfig&) = default;
};

/// Discrete Core and Uncore frequency grids plus the fixed DRAM frequency.
class FreqGrids {
 public:
  /// Throws Error(kConfig) unless both grids are strictly ascending with at
  /// least two entries and all frequencies are positive.
  FreqGrids(std::vector<double> core_grid, std::vector<double> uncore_grid,
            double dram_ghz);

  /// Core 1.2..2.5 GHz (8 steps), Uncore 1.2..2.9 GHz (7 steps), DRAM 2.4 GHz.
  static FreqGrids defaults();

  const std::vector<double>& core() const { return core_; }
  const std::vector<double>& uncore() const { return uncore_; }
  double dram_ghz() const { return dram_ghz_; }

  /// Validated construction; throws Error(kOffGrid) for values not on the grid.
  FreqConfig config(double core_ghz, double uncore_ghz) const;
  bool contains(const FreqConfig& cfg) const;

  FreqConfig max_config() const { return {core_.back(), uncore_.back()}; }
  FreqConfig min_config() const { return {core_.front(), uncore_.front()}; }

  /// Every grid point, core-major, both axes ascending.
  const std::vector<FreqConfig>& all_configs() const { return all_; }

  std::size_t core_index(double ghz) const;
  std::size_t uncore_index(double ghz) const;

  /// Smallest core grid value >= ghz, saturating at the grid maximum.
  double core_ceil(double ghz) const;

 private:
  std::vector<double> core_;
  std::vector<double> uncore_;
  double dram_ghz_;
  std::vector<FreqConfig> all_;
};

}  // namespace okypous
