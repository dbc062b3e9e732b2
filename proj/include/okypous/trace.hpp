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
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace okypous {

struct TraceRecord {
  double timestamp_ms = 0.0;
  std::string workflow_id;
  double input_size = 0.0;
  // Empty when the request carries no metadata that separates behaviours.
  std::string variant_key;
};

inline constexpr const char* kTraceHeader = "timestamp_ms,workflow_id,input_size,variant_key";

/// Parses the trace CSV. Errors are Error(kParse) of the form
/// "<source>:<line>: <reason>"; records must be sorted by timestamp.
std::vector<TraceRecord> parse_trace(std::istream& in, const std::string& source);
std::vector<TraceRecord> load_trace(const std::filesystem::path& path);

void write_trace(std::ostream& out, const std::vector<TraceRecord>& records);
void save_trace(const std::filesystem::path& path, const std::vector<TraceRecord>& records);

/// Splits one CSV line on commas. Quoting is not supported; none of the
/// formats in this project need it.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace okypous
