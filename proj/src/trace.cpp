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

#include "okypous/trace.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "okypous/error.hpp"

namespace okypous {
namespace {

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& why) {
  throw Error(ErrorKind::kParse, source + ":" + std::to_string(line) + ": " + why);
}

double parse_number(const std::string& text, const std::string& source,
                    std::size_t line, const char* field) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    fail(source, line, std::string("invalid ") + field + " '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(value)) {
    fail(source, line, std::string("invalid ") + field + " '" + text + "'");
  }
  return value;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::vector<TraceRecord> parse_trace(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) fail(source, 1, "empty trace file");
  if (strip_cr(line) != kTraceHeader) {
    fail(source, 1, std::string("expected header '") + kTraceHeader + "'");
  }
  std::vector<TraceRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      fail(source, lineno, "expected 4 fields, got " + std::to_string(fields.size()));
    }
    TraceRecord r;
    r.timestamp_ms = parse_number(fields[0], source, lineno, "timestamp_ms");
    r.workflow_id = fields[1];
    if (r.workflow_id.empty()) fail(source, lineno, "empty workflow_id");
    r.input_size = parse_number(fields[2], source, lineno, "input_size");
    if (r.input_size < 0.0) fail(source, lineno, "input_size must be >= 0");
    r.variant_key = fields[3];
    if (!records.empty() && r.timestamp_ms < records.back().timestamp_ms) {
      fail(source, lineno, "timestamps must be nondecreasing");
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<TraceRecord> load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, "cannot open trace file: " + path.string());
  return parse_trace(in, path.string());
}

void write_trace(std::ostream& out, const std::vector<TraceRecord>& records) {
  out << kTraceHeader << '\n';
  out << std::setprecision(10);
  for (const auto& r : records) {
    out << r.timestamp_ms << ',' << r.workflow_id << ',' << r.input_size << ','
        << r.variant_key << '\n';
  }
}

void save_trace(const std::filesystem::path& path, const std::vector<TraceRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kConfig, "cannot write " + path.string());
  write_trace(out, records);
}

}  // namespace okypous
