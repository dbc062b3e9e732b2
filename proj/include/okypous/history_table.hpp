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
#include <map>
#include <string>
#include <utility>

#include "okypous/pmc.hpp"

namespace okypous {

/// PMC observations of one function class (and request variant), indexed by
/// input size. Used to estimate the counter vector of an unseen input.
class HistoryTable {
 public:
  struct Entry {
    PmcVector pmcs;
    std::size_t count = 0;
  };

  /// Adds an observation. Repeated sizes keep the component-wise running mean.
  void record(double input_size, const PmcVector& pmcs);

  /// Stored vector at a knot; piecewise-linear between knots; linear
  /// extrapolation from the two nearest knots outside the range, clamped at
  /// zero. A single knot is returned as is. Throws Error(kNoHistory) when
  /// the table is empty.
  PmcVector interpolate(double input_size) const;

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const std::map<double, Entry>& entries() const { return entries_; }

 private:
  std::map<double, Entry> entries_;
};

/// History tables keyed by (class_id, variant_key).
class HistoryStore {
 public:
  using Key = std::pair<std::string, std::string>;

  HistoryTable& table(const std::string& class_id, const std::string& variant);
  const HistoryTable* find(const std::string& class_id, const std::string& variant) const;

 private:
  std::map<Key, HistoryTable> tables_;
};

}  // namespace okypous
