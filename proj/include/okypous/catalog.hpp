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
#include <string>
#include <vector>

#include "okypous/workflow.hpp"

namespace okypous {

/// Workflow catalog file:
///   {"workflows": [{"id", "slo_ms", "nodes": [{"id", "class_id"}],
///                   "edges": [{"from", "to", "branch"?, "prob"?}]}]}
/// Parse failures throw Error(kParse) with the source name and, for JSON
/// syntax errors, the line number.
std::vector<WorkflowSpec> parse_catalog(std::istream& in, const std::string& source);
std::vector<WorkflowSpec> load_catalog(const std::filesystem::path& path);

std::string catalog_to_json(const std::vector<WorkflowSpec>& workflows);
void save_catalog(const std::filesystem::path& path,
                  const std::vector<WorkflowSpec>& workflows);

}  // namespace okypous
