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
#include <optional>
#include <string>
#include <vector>

namespace okypous {

struct FunctionNode {
  std::string id;
  std::string class_id;
  double nominal_budget_ms = 0.0;
  double baseline_latency_ms = 0.0;
};

/// Directed edge. A node whose outgoing edges carry a branch tag is a
/// conditional: exactly one of them fires per invocation. Untagged edges out
/// of the same node fan out in parallel; a node with several active
/// predecessors waits for all of them.
struct Edge {
  std::string from;
  std::string to;
  std::optional<std::string> branch;
  std::optional<double> prob;
};

/// One combination of conditional branch choices. `node_ids` lists the
/// activated nodes in topological order. For workflows without fan-out this
/// is a plain entry-to-sink chain.
struct ExecutionPath {
  std::vector<std::string> node_ids;
  double baseline_sum_ms = 0.0;
};

class WorkflowSpec {
 public:
  /// Validates the graph. Throws Error(kStructural) on duplicate or dangling
  /// ids, cycles, zero or multiple entry nodes, mixed tagged/untagged edges
  /// on one node, or branch probabilities that do not sum to one; throws
  /// Error(kConfig) when slo_ms <= 0.
  WorkflowSpec(std::string id, double slo_ms, std::vector<FunctionNode> nodes,
               std::vector<Edge> edges);

  const std::string& id() const { return id_; }
  double slo_ms() const { return slo_ms_; }
  const std::vector<FunctionNode>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::size_t size() const { return nodes_.size(); }
  std::size_t entry() const { return entry_; }
  std::size_t index_of(const std::string& node_id) const;
  const FunctionNode& node(std::size_t i) const { return nodes_[i]; }

  /// Outgoing edges of node i as (edge index) in declaration order.
  const std::vector<std::size_t>& out_edges(std::size_t i) const { return out_[i]; }
  const std::vector<std::size_t>& in_edges(std::size_t i) const { return in_[i]; }
  std::size_t edge_target(std::size_t e) const { return edge_to_[e]; }
  std::size_t edge_source(std::size_t e) const { return edge_from_[e]; }
  /// Resolved firing probability of edge e (1 for unconditional edges).
  double edge_probability(std::size_t e) const { return edge_prob_[e]; }
  bool is_conditional(std::size_t i) const;

  const std::vector<std::size_t>& topo_order() const { return topo_; }

  void set_slo_ms(double slo_ms);

 private:
  std::string id_;
  double slo_ms_;
  std::vector<FunctionNode> nodes_;
  std::vector<Edge> edges_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
  std::vector<std::size_t> edge_from_;
  std::vector<std::size_t> edge_to_;
  std::vector<double> edge_prob_;
  std::vector<std::size_t> topo_;
  std::size_t entry_ = 0;
};

/// Activation mask (indexed by node) for one branch combination.
using Activation = std::vector<bool>;

/// Every mutually exclusive branch combination, as activation masks.
std::vector<Activation> enumerate_activations(const WorkflowSpec& spec);

/// Every mutually exclusive path. When `baselines` is given, each path's
/// baseline_sum_ms is the longest baseline chain through its activated nodes
/// (parallel arms contribute their maximum).
std::vector<ExecutionPath> enumerate_paths(
    const WorkflowSpec& spec,
    const std::map<std::string, double>* baselines = nullptr);

/// Every entry-to-sink chain taking one outgoing edge at each node. A budget
/// assignment keeps every path within the SLO iff it keeps every chain
/// within the SLO.
std::vector<std::vector<std::size_t>> enumerate_chains(const WorkflowSpec& spec);

/// Longest weighted chain through the activated sub-DAG.
double longest_chain(const WorkflowSpec& spec, const Activation& active,
                     const std::vector<double>& weights);

}  // namespace okypous
