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
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace okypous {

/// Frequency requests of the functions sharing one core or uncore domain.
/// The applied frequency is the highest active request, or the idle floor
/// when there is none, so a request is never served below what it asked for.
class DomainRequestSet {
 public:
  using RequestId = std::uint64_t;

  DomainRequestSet(std::string domain_id, double floor_ghz);

  /// Records (or replaces) the request of `id`. Returns the applied GHz.
  double submit(RequestId id, double ghz);
  /// Drops the request of `id`. Unknown ids are ignored and counted.
  double release(RequestId id);

  double applied_ghz() const;
  double floor_ghz() const { return floor_ghz_; }
  const std::string& domain_id() const { return domain_id_; }
  std::size_t active() const { return requests_.size(); }
  bool contains(RequestId id) const { return requests_.count(id) != 0; }
  std::size_t unknown_releases() const { return unknown_releases_; }

 private:
  std::string domain_id_;
  double floor_ghz_;
  std::map<RequestId, double> requests_;
  std::multiset<double> levels_;
  std::size_t unknown_releases_ = 0;
};

/// A request held on a domain over [start_ms, end_ms).
struct RequestInterval {
  double start_ms = 0.0;
  double end_ms = 0.0;
  std::string domain;
  double requested_ghz = 0.0;
};

struct DriftStats {
  int sharing_degree = 0;
  double mean_ghz = 0.0;
  double p50_ghz = 0.0;
  double p95_ghz = 0.0;
  double max_ghz = 0.0;
  double request_seconds = 0.0;
  std::size_t requests = 0;
};

/// Time-weighted distribution of (applied - requested) over every request in
/// `intervals`, replaying max arbitration per domain with `floor_ghz` as the
/// idle level.
DriftStats drift_report(const std::vector<RequestInterval>& intervals, int sharing_degree,
                        double floor_ghz);

inline constexpr const char* kDriftHeader =
    "domain_kind,sharing_degree,mean_drift_ghz,p50_drift_ghz,p95_drift_ghz,max_drift_ghz,"
    "request_seconds";

struct DriftRow {
  std::string domain_kind;
  DriftStats stats;
};

void write_drift_csv(std::ostream& out, const std::vector<DriftRow>& rows);

}  // namespace okypous
