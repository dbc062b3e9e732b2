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

#include "okypous/history_table.hpp"

#include <algorithm>
#include <iterator>

#include "okypous/error.hpp"

namespace okypous {
namespace {

// Value of the line through (x0, a) and (x1, b) at x, per component.
std::vector<double> lerp(const std::vector<double>& a, const std::vector<double>& b,
                         double x0, double x1, double x) {
  std::vector<double> out(a.size());
  const double t = (x - x0) / (x1 - x0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = std::max(0.0, a[i] + t * (b[i] - a[i]));
  }
  return out;
}

PmcVector lerp(const PmcVector& a, const PmcVector& b, double x0, double x1, double x) {
  return {lerp(a.core, b.core, x0, x1, x), lerp(a.uncore, b.uncore, x0, x1, x),
          lerp(a.dram, b.dram, x0, x1, x)};
}

void running_mean(std::vector<double>& mean, const std::vector<double>& v, std::size_t n) {
  for (std::size_t i = 0; i < mean.size(); ++i) {
    mean[i] += (v[i] - mean[i]) / static_cast<double>(n);
  }
}

}  // namespace

void HistoryTable::record(double input_size, const PmcVector& pmcs) {
  pmcs.validate();
  auto [it, inserted] = entries_.try_emplace(input_size, Entry{pmcs, 1});
  if (inserted) return;
  Entry& e = it->second;
  if (!e.pmcs.same_shape(pmcs)) {
    throw Error(ErrorKind::kConfig, "PMC vector shape changed within a history table");
  }
  ++e.count;
  running_mean(e.pmcs.core, pmcs.core, e.count);
  running_mean(e.pmcs.uncore, pmcs.uncore, e.count);
  running_mean(e.pmcs.dram, pmcs.dram, e.count);
}

PmcVector HistoryTable::interpolate(double input_size) const {
  if (entries_.empty()) {
    throw Error(ErrorKind::kNoHistory, "history table is empty");
  }
  if (entries_.size() == 1) return entries_.begin()->second.pmcs;

  const auto hit = entries_.find(input_size);
  if (hit != entries_.end()) return hit->second.pmcs;

  auto upper = entries_.upper_bound(input_size);
  if (upper == entries_.begin()) {
    // Below the first knot: extend the first segment.
    auto second = std::next(upper);
    return lerp(upper->second.pmcs, second->second.pmcs, upper->first, second->first,
                input_size);
  }
  if (upper == entries_.end()) {
    auto last = std::prev(upper);
    auto before = std::prev(last);
    return lerp(before->second.pmcs, last->second.pmcs, before->first, last->first,
                input_size);
  }
  auto lower = std::prev(upper);
  return lerp(lower->second.pmcs, upper->second.pmcs, lower->first, upper->first,
              input_size);
}

HistoryTable& HistoryStore::table(const std::string& class_id, const std::string& variant) {
  return tables_[{class_id, variant}];
}

const HistoryTable* HistoryStore::find(const std::string& class_id,
                                       const std::string& variant) const {
  const auto it = tables_.find({class_id, variant});
  return it == tables_.end() ? nullptr : &it->second;
}

}  // namespace okypous
