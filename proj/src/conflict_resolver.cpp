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

#include "okypous/conflict_resolver.hpp"

#include <algorithm>
#include <set>
#include <tuple>
#include <utility>

namespace okypous {

DomainRequestSet::DomainRequestSet(std::string domain_id, double floor_ghz)
    : domain_id_(std::move(domain_id)), floor_ghz_(floor_ghz) {}

double DomainRequestSet::submit(RequestId id, double ghz) {
  auto [it, inserted] = requests_.try_emplace(id, ghz);
  if (!inserted) {
    levels_.erase(levels_.find(it->second));
    it->second = ghz;
  }
  levels_.insert(ghz);
  return applied_ghz();
}

double DomainRequestSet::release(RequestId id) {
  const auto it = requests_.find(id);
  if (it == requests_.end()) {
    ++unknown_releases_;
    return applied_ghz();
  }
  levels_.erase(levels_.find(it->second));
  requests_.erase(it);
  return applied_ghz();
}

double DomainRequestSet::applied_ghz() const {
  return levels_.empty() ? floor_ghz_ : *levels_.rbegin();
}

namespace {

struct Weighted {
  double drift;
  double weight;
};

double weighted_quantile(std::vector<Weighted> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end(),
            [](const Weighted& a, const Weighted& b) { return a.drift < b.drift; });
  double total = 0.0;
  for (const auto& w : v) total += w.weight;
  if (total <= 0.0) return v.back().drift;
  double acc = 0.0;
  for (const auto& w : v) {
    acc += w.weight;
    if (acc >= q * total - 1e-12) return w.drift;
  }
  return v.back().drift;
}

}  // namespace

DriftStats drift_report(const std::vector<RequestInterval>& intervals, int sharing_degree,
                        double floor_ghz) {
  DriftStats stats;
  stats.sharing_degree = sharing_degree;
  stats.requests = intervals.size();

  // Between two consecutive boundaries of a domain the active set is
  // constant and every holder drifts by (max - own).
  std::map<std::string, std::vector<std::size_t>> by_domain;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    by_domain[intervals[i].domain].push_back(i);
  }
  std::vector<Weighted> samples;
  double weighted_sum = 0.0;
  double total = 0.0;
  for (const auto& [domain, idx] : by_domain) {
    // (time, is_start, interval); ends sort before starts at equal times.
    std::vector<std::tuple<double, bool, std::size_t>> events;
    for (std::size_t i : idx) {
      if (intervals[i].end_ms <= intervals[i].start_ms) continue;
      events.emplace_back(intervals[i].start_ms, true, i);
      events.emplace_back(intervals[i].end_ms, false, i);
    }
    std::sort(events.begin(), events.end());
    std::set<std::size_t> active;
    std::multiset<double> levels;
    double prev = 0.0;
    for (const auto& [t, is_start, i] : events) {
      const double dt = t - prev;
      if (dt > 0.0 && !active.empty()) {
        const double applied = std::max(floor_ghz, *levels.rbegin());
        for (std::size_t j : active) {
          const double drift = applied - intervals[j].requested_ghz;
          samples.push_back({drift, dt});
          weighted_sum += drift * dt;
          total += dt;
          stats.max_ghz = std::max(stats.max_ghz, drift);
        }
      }
      prev = t;
      if (is_start) {
        active.insert(i);
        levels.insert(intervals[i].requested_ghz);
      } else {
        active.erase(i);
        levels.erase(levels.find(intervals[i].requested_ghz));
      }
    }
  }
  stats.request_seconds = total / 1000.0;
  stats.mean_ghz = total > 0.0 ? weighted_sum / total : 0.0;
  stats.p50_ghz = weighted_quantile(samples, 0.50);
  stats.p95_ghz = weighted_quantile(std::move(samples), 0.95);
  return stats;
}

void write_drift_csv(std::ostream& out, const std::vector<DriftRow>& rows) {
  out << kDriftHeader << '\n';
  for (const auto& r : rows) {
    out << r.domain_kind << ',' << r.stats.sharing_degree << ',' << r.stats.mean_ghz << ','
        << r.stats.p50_ghz << ',' << r.stats.p95_ghz << ',' << r.stats.max_ghz << ','
        << r.stats.request_seconds << '\n';
  }
}

}  // namespace okypous
