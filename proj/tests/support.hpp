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

// Shared fixtures for the unit and acceptance suites.

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "okypous/sim/simulator.hpp"
#include "okypous/sim/workload.hpp"
#include "okypous/workflow.hpp"

namespace okypous::testing {

inline std::string nid(std::size_t i) { return "n" + std::to_string(i); }

// Random single-entry DAG; nodes with several successors are randomly
// conditional (branch-tagged) or fan-out.
inline WorkflowSpec random_dag(std::mt19937_64& rng, std::size_t max_nodes = 10) {
  std::uniform_int_distribution<std::size_t> count(1, max_nodes);
  const std::size_t n = count(rng);
  std::vector<FunctionNode> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back({nid(i), "c", 0.0, 0.0});
  std::bernoulli_distribution extra(0.25);
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    pairs.insert({pick(rng), i});
    for (std::size_t j = 0; j < i; ++j) {
      if (extra(rng)) pairs.insert({j, i});
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> outs;
  for (const auto& [a, b] : pairs) outs[a].push_back(b);
  std::bernoulli_distribution conditional(0.5);
  std::vector<Edge> edges;
  for (const auto& [a, targets] : outs) {
    const bool cond = targets.size() > 1 && conditional(rng);
    for (std::size_t k = 0; k < targets.size(); ++k) {
      Edge e{nid(a), nid(targets[k]), std::nullopt, std::nullopt};
      if (cond) e.branch = "b" + std::to_string(k);
      edges.push_back(e);
    }
  }
  return WorkflowSpec("rand", 1000.0, nodes, edges);
}

// Every combination of branch choices, reachability from the entry, then
// dedupe. Returns sorted node-id sets.
inline std::set<std::vector<std::string>> brute_force_activations(const WorkflowSpec& spec) {
  std::vector<std::size_t> cond;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (!spec.out_edges(i).empty() && spec.edges()[spec.out_edges(i).front()].branch) {
      cond.push_back(i);
    }
  }
  std::set<std::vector<std::string>> out;
  std::vector<std::size_t> choice(cond.size(), 0);
  while (true) {
    std::map<std::size_t, std::size_t> chosen;
    for (std::size_t k = 0; k < cond.size(); ++k) chosen[cond[k]] = choice[k];
    std::vector<bool> seen(spec.size(), false);
    std::vector<std::size_t> stack{spec.entry()};
    seen[spec.entry()] = true;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      const auto& oe = spec.out_edges(v);
      for (std::size_t k = 0; k < oe.size(); ++k) {
        if (chosen.count(v) && chosen[v] != k) continue;
        const std::size_t t = spec.edge_target(oe[k]);
        if (!seen[t]) {
          seen[t] = true;
          stack.push_back(t);
        }
      }
    }
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      if (seen[i]) ids.push_back(spec.node(i).id);
    }
    std::sort(ids.begin(), ids.end());
    out.insert(ids);
    std::size_t k = 0;
    while (k < cond.size()) {
      if (++choice[k] < spec.out_edges(cond[k]).size()) break;
      choice[k] = 0;
      ++k;
    }
    if (k == cond.size()) break;
  }
  return out;
}

// Longest weighted chain inside the subgraph induced by `ids`, by plain DFS.
inline double brute_force_longest(const WorkflowSpec& spec, const std::vector<std::string>& ids,
                                  const std::map<std::string, double>& w) {
  std::set<std::string> in(ids.begin(), ids.end());
  std::function<double(std::size_t)> from = [&](std::size_t v) {
    double best = 0.0;
    for (std::size_t e : spec.out_edges(v)) {
      const std::size_t t = spec.edge_target(e);
      if (in.count(spec.node(t).id)) best = std::max(best, from(t));
    }
    return w.at(spec.node(v).id) + best;
  };
  double best = 0.0;
  for (std::size_t v = 0; v < spec.size(); ++v) {
    if (in.count(spec.node(v).id)) best = std::max(best, from(v));
  }
  return best;
}

inline WorkflowSpec chain_spec(const std::string& id, const std::vector<std::string>& classes,
                               double slo_ms) {
  std::vector<FunctionNode> nodes;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    nodes.push_back({"s" + std::to_string(i), classes[i], 0.0, 0.0});
    if (i > 0) edges.push_back({nodes[i - 1].id, nodes[i].id, std::nullopt, std::nullopt});
  }
  return WorkflowSpec(id, slo_ms, nodes, edges);
}

struct Scenario {
  sim::SimConfig config;
  sim::SimInput input;
};

// Synthetic workload plus a matching simulator config.
inline Scenario make_scenario(sim::PolicyKind policy, std::uint64_t seed,
                              const sim::WorkloadParams& params,
                              const sim::NoiseParams& noise = {}) {
  Scenario s;
  s.config.policy = policy;
  s.config.seed = seed;
  s.config.noise = noise;
  s.input.classes = sim::default_classes(4, s.config.grids.dram_ghz());
  auto w = sim::generate_workload(params, s.input.classes, s.config.grids, noise, seed);
  s.input.workflows = std::move(w.workflows);
  s.input.trace = std::move(w.trace);
  return s;
}

inline sim::WorkloadParams small_params(std::size_t workflows, std::size_t invocations) {
  sim::WorkloadParams p;
  p.workflows = workflows;
  p.invocations = invocations;
  return p;
}

}  // namespace okypous::testing
