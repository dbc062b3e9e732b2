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

#include "okypous/freq.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "okypous/error.hpp"

namespace okypous {
namespace {

constexpr double kGridTolerance = 1e-9;

void validate_grid(const std::vector<double>& grid, const char* name) {
  if (grid.size() < 2) {
    throw Error(ErrorKind::kConfig,
                std::string(name) + " grid needs at least two frequencies");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) {
      throw Error(ErrorKind::kConfig,
                  std::string(name) + " grid frequencies must be positive");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw Error(ErrorKind::kConfig,
                  std::string(name) + " grid must be strictly ascending");
    }
  }
}

std::ptrdiff_t find_on_grid(const std::vector<double>& grid, double ghz) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid[i] - ghz) <= kGridTolerance) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

}  // namespace

FreqGrids::FreqGrids(std::vector<double> core_grid,
                     std::vector<double> uncore_grid, double dram_ghz)
    : core_(std::move(core_grid)),
      uncore_(std::move(uncore_grid)),
      dram_ghz_(dram_ghz) {
  validate_grid(core_, "core");
  validate_grid(uncore_, "uncore");
  if (!(dram_ghz_ > 0.0)) {
    throw Error(ErrorKind::kConfig, "dram_ghz must be positive");
  }
  all_.reserve(core_.size() * uncore_.size());
  for (double c : core_) {
    for (double u : uncore_) all_.push_back({c, u});
  }
}

FreqGrids FreqGrids::defaults() {
  return FreqGrids({1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.4, 2.5},
                   {1.2, 1.5, 1.8, 2.1, 2.4, 2.7, 2.9}, 2.4);
}

FreqConfig FreqGrids::config(double core_ghz, double uncore_ghz) const {
  const auto ci = find_on_grid(core_, core_ghz);
  const auto ui = find_on_grid(uncore_, uncore_ghz);
  if (ci < 0 || ui < 0) {
    std::ostringstream msg;
    msg << "frequency pair (" << core_ghz << ", " << uncore_ghz
        << ") GHz is not on the configured grids";
    throw Error(ErrorKind::kOffGrid, msg.str());
  }
  return {core_[static_cast<std::size_t>(ci)], uncore_[static_cast<std::size_t>(ui)]};
}

bool FreqGrids::contains(const FreqConfig& cfg) const {
  return find_on_grid(core_, cfg.core_ghz) >= 0 &&
         find_on_grid(uncore_, cfg.uncore_ghz) >= 0;
}

std::size_t FreqGrids::core_index(double ghz) const {
  const auto i = find_on_grid(core_, ghz);
  if (i < 0) throw Error(ErrorKind::kOffGrid, "core frequency not on grid");
  return static_cast<std::size_t>(i);
}

std::size_t FreqGrids::uncore_index(double ghz) const {
  const auto i = find_on_grid(uncore_, ghz);
  if (i < 0) throw Error(ErrorKind::kOffGrid, "uncore frequency not on grid");
  return static_cast<std::size_t>(i);
}

double FreqGrids::core_ceil(double ghz) const {
  for (double c : core_) {
    if (c >= ghz - kGridTolerance) return c;
  }
  return core_.back();
}

}  // namespace okypous
