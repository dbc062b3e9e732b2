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

#include "okypous/workflow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

#include "okypous/error.hpp"

namespace okypous {
namespace {

constexpr double kProbTolerance = 1e-9;

[[noreturn]] void structural(const std::string& wf, const std::string& what) {
  throw Error(ErrorKind::kStructural, "workflow '" + wf + "': " + what);
}

}  // namespace

WorkflowSpec::WorkflowSpec(std::string id, double slo_ms,
                           std::vector<FunctionNode> nodes,
                           std::vector<Edge> edges)
    : id_(std::move(id)),
      slo_ms_(slo_ms),
      nodes_(std::move(nodes)),
      edges_(std::move(edges)) {
  if (!(slo_ms_ > 0.0)) {
    throw Error(ErrorKind::kConfig, "workflow '" + id_ + "': slo_ms must be > 0");
  }
  if (nodes_.empty()) structural(id_, "no nodes");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!index_.emplace(nodes_[i].id, i).second) {
      structural(id_, "duplicate node id '" + nodes_[i].id + "'");
    }
  }
  out_.resize(nodes_.size());
  in_.resize(nodes_.size());
  edge_from_.reserve(edges_.size());
  edge_to_.reserve(edges_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto f = index_.find(edges_[e].from);
    const auto t = index_.find(edges_[e].to);
    if (f == index_.end() || t == index_.end()) {
      structural(id_, "edge " + edges_[e].from + "->" + edges_[e].to +
                          " references an unknown node");
    }
    edge_from_.push_back(f->second);
    edge_to_.push_back(t->second);
    out_[f->second].push_back(e);
    in_[t->second].push_back(e);
  }

  // Kahn's algorithm, lowest declaration index first for a stable order.
  std::vector<std::size_t> indegree(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) indegree[i] = in_[i].size();
  std::vector<std::size_t> entries;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (indegree[i] == 0) entries.push_back(i);
  }
  std::vector<std::size_t> ready = entries;
  while (!ready.empty()) {
    auto it = std::min_element(ready.begin(), ready.end());
    const std::size_t n = *it;
    ready.erase(it);
    topo_.push_back(n);
    for (std::size_t e : out_[n]) {
      if (--indegree[edge_to_[e]] == 0) ready.push_back(edge_to_[e]);
    }
  }
  if (topo_.size() != nodes_.size()) structural(id_, "cycle detected");
  if (entries.size() != 1) {
    structural(id_, "expected a single entry node, found " +
                        std::to_string(entries.size()));
  }
  entry_ = entries.front();

  edge_prob_.assign(edges_.size(), 1.0);
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    const auto& outs = out_[n];
    std::size_t tagged = 0;
    std::size_t with_prob = 0;
    for (std::size_t e : outs) {
      if (edges_[e].branch) ++tagged;
      if (edges_[e].prob) ++with_prob;
    }
    if (tagged == 0 && with_prob == 0) continue;
    if (tagged != outs.size()) {
      structural(id_, "node '" + nodes_[n].id +
                          "' mixes conditional and unconditional out-edges");
    }
    if (with_prob == 0) {
      for (std::size_t e : outs) edge_prob_[e] = 1.0 / static_cast<double>(outs.size());
      continue;
    }
    if (with_prob != outs.size()) {
      structural(id_, "node '" + nodes_[n].id +
                          "' gives probabilities for only some branches");
    }
    double sum = 0.0;
    for (std::size_t e : outs) {
      const double p = *edges_[e].prob;
      if (p < 0.0 || p > 1.0) {
        structural(id_, "branch probability out of [0,1] at '" + nodes_[n].id + "'");
      }
      edge_prob_[e] = p;
      sum += p;
    }
    if (std::abs(sum - 1.0) > kProbTolerance) {
      structural(id_, "branch probabilities at '" + nodes_[n].id +
                          "' sum to " + std::to_string(sum));
    }
  }
}

std::size_t WorkflowSpec::index_of(const std::string& node_id) const {
  const auto it = index_.find(node_id);
  if (it == index_.end()) {
    throw Error(ErrorKind::kStructural,
                "workflow '" + id_ + "' has no node '" + node_id + "'");
  }
  return it->second;
}

bool WorkflowSpec::is_conditional(std::size_t i) const {
  return !out_[i].empty() && edges_[out_[i].front()].branch.has_value();
}

void WorkflowSpec::set_slo_ms(double slo_ms) {
  if (!(slo_ms > 0.0)) {
    throw Error(ErrorKind::kConfig, "workflow '" + id_ + "': slo_ms must be > 0");
  }
  slo_ms_ = slo_ms;
}

std::vector<Activation> enumerate_activations(const WorkflowSpec& spec) {
  const auto& topo = spec.topo_order();
  std::vector<Activation> result;
  std::set<Activation> seen;
  // Walk the topological order; a conditional node forks the partial mask
  // once per branch.
  std::function<void(std::size_t, Activation)> walk = [&](std::size_t pos, Activation active) {
    while (pos < topo.size() && !active[topo[pos]]) ++pos;
    if (pos == topo.size()) {
      // A branch can target a node a fan-out already activated.
      if (seen.insert(active).second) result.push_back(std::move(active));
      return;
    }
    const std::size_t n = topo[pos];
    if (spec.is_conditional(n)) {
      for (std::size_t e : spec.out_edges(n)) {
        Activation branch = active;
        branch[spec.edge_target(e)] = true;
        walk(pos + 1, std::move(branch));
      }
      return;
    }
    for (std::size_t e : spec.out_edges(n)) active[spec.edge_target(e)] = true;
    walk(pos + 1, std::move(active));
  };
  Activation start(spec.size(), false);
  start[spec.entry()] = true;
  walk(0, std::move(start));
  return result;
}

double longest_chain(const WorkflowSpec& spec, const Activation& active,
                     const std::vector<double>& weights) {
  std::vector<double> finish(spec.size(), 0.0);
  double best = 0.0;
  for (std::size_t n : spec.topo_order()) {
    if (!active[n]) continue;
    double start = 0.0;
    for (std::size_t e : spec.in_edges(n)) {
      const std::size_t p = spec.edge_source(e);
      if (active[p]) start = std::max(start, finish[p]);
    }
    finish[n] = start + weights[n];
    best = std::max(best, finish[n]);
  }
  return best;
}

std::vector<ExecutionPath> enumerate_paths(
    const WorkflowSpec& spec, const std::map<std::string, double>* baselines) {
  std::vector<double> weights(spec.size(), 0.0);
  if (baselines != nullptr) {
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const auto it = baselines->find(spec.node(i).id);
      if (it == baselines->end()) {
        throw Error(ErrorKind::kMissingBaseline,
                    "no baseline latency for node '" + spec.node(i).id + "'");
      }
      weights[i] = it->second;
    }
  }
  std::vector<ExecutionPath> paths;
  for (const auto& active : enumerate_activations(spec)) {
    ExecutionPath path;
    for (std::size_t n : spec.topo_order()) {
      if (active[n]) path.node_ids.push_back(spec.node(n).id);
    }
    path.baseline_sum_ms = baselines ? longest_chain(spec, active, weights) : 0.0;
    paths.push_back(std::move(path));
  }
  return paths;
}

std::vector<std::vector<std::size_t>> enumerate_chains(const WorkflowSpec& spec) {
  std::vector<std::vector<std::size_t>> chains;
  std::vector<std::size_t> current;
  std::function<void(std::size_t)> dfs = [&](std::size_t n) {
    current.push_back(n);
    if (spec.out_edges(n).empty()) {
      chains.push_back(current);
    } else {
      for (std::size_t e : spec.out_edges(n)) dfs(spec.edge_target(e));
    }
    current.pop_back();
  };
  dfs(spec.entry());
  return chains;
}

}  // namespace okypous
