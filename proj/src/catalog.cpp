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

#include "okypous/catalog.hpp"

#include <fstream>

#include <json.hpp>

#include "okypous/error.hpp"

namespace okypous {

using nlohmann::json;

std::vector<WorkflowSpec> parse_catalog(std::istream& in, const std::string& source) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, source + ": " + e.what());
  }
  std::vector<WorkflowSpec> out;
  try {
    if (!doc.contains("workflows") || !doc["workflows"].is_array()) {
      throw Error(ErrorKind::kParse, source + ": missing 'workflows' array");
    }
    for (const auto& w : doc["workflows"]) {
      std::vector<FunctionNode> nodes;
      for (const auto& n : w.at("nodes")) {
        nodes.push_back({n.at("id").get<std::string>(),
                         n.at("class_id").get<std::string>(), 0.0, 0.0});
      }
      std::vector<Edge> edges;
      if (w.contains("edges")) {
        for (const auto& e : w["edges"]) {
          Edge edge{e.at("from").get<std::string>(), e.at("to").get<std::string>(),
                    std::nullopt, std::nullopt};
          if (e.contains("branch") && !e["branch"].is_null()) {
            edge.branch = e["branch"].get<std::string>();
          }
          if (e.contains("prob") && !e["prob"].is_null()) {
            edge.prob = e["prob"].get<double>();
          }
          edges.push_back(std::move(edge));
        }
      }
      out.emplace_back(w.at("id").get<std::string>(), w.at("slo_ms").get<double>(),
                       std::move(nodes), std::move(edges));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, source + ": " + e.what());
  }
  return out;
}

std::vector<WorkflowSpec> load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kConfig, "cannot open workflow catalog: " + path.string());
  }
  return parse_catalog(in, path.string());
}

std::string catalog_to_json(const std::vector<WorkflowSpec>& workflows) {
  json doc;
  doc["workflows"] = json::array();
  for (const auto& wf : workflows) {
    json w;
    w["id"] = wf.id();
    w["slo_ms"] = wf.slo_ms();
    w["nodes"] = json::array();
    for (const auto& n : wf.nodes()) {
      w["nodes"].push_back({{"id", n.id}, {"class_id", n.class_id}});
    }
    w["edges"] = json::array();
    for (const auto& e : wf.edges()) {
      json je{{"from", e.from}, {"to", e.to}};
      if (e.branch) je["branch"] = *e.branch;
      if (e.prob) je["prob"] = *e.prob;
      w["edges"].push_back(std::move(je));
    }
    doc["workflows"].push_back(std::move(w));
  }
  return doc.dump(2);
}

void save_catalog(const std::filesystem::path& path,
                  const std::vector<WorkflowSpec>& workflows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kConfig, "cannot write " + path.string());
  out << catalog_to_json(workflows) << '\n';
}

}  // namespace okypous
