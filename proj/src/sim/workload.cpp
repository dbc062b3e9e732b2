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

#include "okypous/sim/workload.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <numbers>
#include <set>

#include "okypous/budgeting.hpp"
#include "okypous/error.hpp"
#include "okypous/sim/metrics.hpp"

namespace okypous::sim {

Activation sample_activation(const WorkflowSpec& spec, std::mt19937_64& rng,
                             std::vector<bool>* taken_edges) {
  Activation active(spec.size(), false);
  if (taken_edges) taken_edges->assign(spec.edges().size(), false);
  const auto take = [&](std::size_t e) {
    active[spec.edge_target(e)] = true;
    if (taken_edges) (*taken_edges)[e] = true;
  };
  active[spec.entry()] = true;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (std::size_t n : spec.topo_order()) {
    if (!active[n]) continue;
    const auto& outs = spec.out_edges(n);
    if (outs.empty()) continue;
    if (!spec.is_conditional(n)) {
      for (std::size_t e : outs) take(e);
      continue;
    }
    const double u = uni(rng);
    double acc = 0.0;
    std::size_t pick = outs.back();
    for (std::size_t e : outs) {
      acc += spec.edge_probability(e);
      if (u < acc) {
        pick = e;
        break;
      }
    }
    take(pick);
  }
  return active;
}

std::vector<InputSample> workflow_inputs(const std::vector<TraceRecord>& trace,
                                         const std::string& workflow_id) {
  std::vector<InputSample> out;
  for (const auto& r : trace) {
    if (r.workflow_id == workflow_id) out.push_back({r.input_size, r.variant_key});
  }
  if (out.empty()) out.push_back({1.0, ""});
  return out;
}

std::string effective_variant(const FunctionClass& cls, const std::string& variant) {
  return cls.has_variant(variant) ? variant : std::string();
}

std::map<std::string, double> profile_baselines(const WorkflowSpec& spec,
                                                const std::vector<FunctionClass>& classes,
                                                const std::vector<InputSample>& inputs,
                                                const FreqGrids& grids,
                                                const NoiseParams& noise, std::size_t samples,
                                                std::mt19937_64& rng, HistoryStore* history) {
  if (inputs.empty() || samples == 0) {
    throw Error(ErrorKind::kConfig, "profiling needs at least one input and one sample");
  }
  std::uniform_int_distribution<std::size_t> pick(0, inputs.size() - 1);
  std::map<std::string, double> out;
  for (const auto& node : spec.nodes()) {
    const auto& cls = find_class(classes, node.class_id);
    std::vector<double> lat;
    lat.reserve(samples);
    for (std::size_t s = 0; s < samples; ++s) {
      const auto& in = inputs[pick(rng)];
      const Work w = work_of(cls, in.size, in.variant);
      const double base = true_latency_ms(w, grids.max_config(), grids.dram_ghz());
      lat.push_back(base * draw_latency_factor(noise, rng));
      const PmcVector observed = draw_observed_pmcs(pmcs_of(cls, w), noise, rng);
      if (history) {
        history->table(cls.id, effective_variant(cls, in.variant)).record(in.size, observed);
      }
    }
    out[node.id] = percentile(std::move(lat), 0.95);
  }
  return out;
}

void WorkloadParams::validate() const {
  if (workflows == 0) throw Error(ErrorKind::kConfig, "workload needs at least one workflow");
  if (min_stages < 2 || max_stages < min_stages) {
    throw Error(ErrorKind::kConfig, "stage counts must satisfy 2 <= min <= max");
  }
  if (conditional_fraction < 0.0 || fanout_fraction < 0.0 ||
      conditional_fraction + fanout_fraction > 1.0) {
    throw Error(ErrorKind::kConfig, "branch fractions must be nonnegative and sum to <= 1");
  }
  if (!(size_lo >= 0.0 && size_hi >= size_lo)) {
    throw Error(ErrorKind::kConfig, "input size range must satisfy 0 <= lo <= hi");
  }
  if (!(target_utilization > 0.0) || total_cores <= 0) {
    throw Error(ErrorKind::kConfig, "target utilization and core count must be positive");
  }
  if (rate_amplitude < 0.0 || rate_amplitude >= 1.0) {
    throw Error(ErrorKind::kConfig, "rate_amplitude must lie in [0, 1)");
  }
  if (!(slo_scale >= 1.0)) throw Error(ErrorKind::kConfig, "slo_scale must be >= 1");
}

namespace {

double round_to(double x, double step) { return std::round(x / step) * step; }

WorkflowSpec make_workflow(std::size_t index, const std::vector<FunctionClass>& classes,
                           const WorkloadParams& p, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> stages(p.min_stages, p.max_stages);
  std::uniform_int_distribution<std::size_t> cls(0, classes.size() - 1);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  const std::size_t len = stages(rng);
  std::vector<FunctionNode> nodes;
  for (std::size_t i = 0; i < len; ++i) {
    nodes.push_back({"f" + std::to_string(i), classes[cls(rng)].id, 0.0, 0.0});
  }
  const double kind = uni(rng);
  const std::size_t at = std::uniform_int_distribution<std::size_t>(0, len - 2)(rng);
  const bool conditional = kind < p.conditional_fraction;
  const bool fanout = !conditional && kind < p.conditional_fraction + p.fanout_fraction;

  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < len; ++i) {
    Edge e{nodes[i].id, nodes[i + 1].id, std::nullopt, std::nullopt};
    if (conditional && i == at) {
      const double prob = round_to(0.3 + 0.4 * uni(rng), 0.05);
      e.branch = "a";
      e.prob = prob;
      edges.push_back(e);
      edges.push_back({nodes[i].id, "g0", std::string("b"), 1.0 - prob});
      continue;
    }
    edges.push_back(e);
    if (fanout && i == at) edges.push_back({nodes[i].id, "g0", std::nullopt, std::nullopt});
  }
  if (conditional || fanout) {
    nodes.push_back({"g0", classes[cls(rng)].id, 0.0, 0.0});
    if (at + 2 < len) edges.push_back({"g0", nodes[at + 2].id, std::nullopt, std::nullopt});
  }
  char id[32];
  std::snprintf(id, sizeof id, "wf-%02zu", index);
  return WorkflowSpec(id, 1.0, std::move(nodes), std::move(edges));
}

}  // namespace

Workload generate_workload(const WorkloadParams& params,
                           const std::vector<FunctionClass>& classes, const FreqGrids& grids,
                           const NoiseParams& noise, std::uint64_t seed) {
  params.validate();
  noise.validate();
  if (classes.empty()) throw Error(ErrorKind::kConfig, "workload needs function classes");

  std::seed_seq structure_seed{seed, std::uint64_t{1}};
  std::seed_seq trace_seed{seed, std::uint64_t{2}};
  std::seed_seq profile_seed{seed, std::uint64_t{3}};
  std::mt19937_64 structure_rng(structure_seed);
  std::mt19937_64 trace_rng(trace_seed);
  std::mt19937_64 profile_rng(profile_seed);

  Workload out;
  for (std::size_t w = 0; w < params.workflows; ++w) {
    out.workflows.push_back(make_workflow(w, classes, params, structure_rng));
  }

  // Expected core time per invocation at max config, for the arrival rate.
  const double mid = 0.5 * (params.size_lo + params.size_hi);
  double mean_core_ms = 0.0;
  for (const auto& spec : out.workflows) {
    double acc = 0.0;
    constexpr int kDraws = 200;
    for (int k = 0; k < kDraws; ++k) {
      const auto active = sample_activation(spec, profile_rng);
      for (std::size_t n = 0; n < spec.size(); ++n) {
        if (!active[n]) continue;
        const Work wk = work_of(find_class(classes, spec.node(n).class_id), mid, "");
        acc += true_latency_ms(wk, grids.max_config(), grids.dram_ghz());
      }
    }
    mean_core_ms += acc / kDraws;
  }
  mean_core_ms /= static_cast<double>(out.workflows.size());
  const double rate_per_ms =
      params.target_utilization * params.total_cores / std::max(mean_core_ms, 1e-9);

  std::uniform_int_distribution<std::size_t> pick_wf(0, out.workflows.size() - 1);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::exponential_distribution<double> gap(rate_per_ms * (1.0 + params.rate_amplitude));
  const double period_ms =
      std::max(1.0, static_cast<double>(params.invocations) / rate_per_ms / 4.0);
  double t = 0.0;
  while (out.trace.size() < params.invocations) {
    t += gap(trace_rng);
    const double accept =
        (1.0 + params.rate_amplitude * std::sin(2.0 * std::numbers::pi * t / period_ms)) /
        (1.0 + params.rate_amplitude);
    if (uni(trace_rng) >= accept) continue;
    TraceRecord r;
    r.timestamp_ms = round_to(t, 1e-3);
    const auto& spec = out.workflows[pick_wf(trace_rng)];
    r.workflow_id = spec.id();
    r.input_size =
        round_to(params.size_lo + (params.size_hi - params.size_lo) * uni(trace_rng), 1e-4);
    std::set<std::string> keys;
    for (const auto& node : spec.nodes()) {
      for (const auto& [k, v] : find_class(classes, node.class_id).variants) keys.insert(k);
    }
    const double v = uni(trace_rng);
    if (!keys.empty() && v < params.variant_fraction) {
      auto it = keys.begin();
      std::advance(it, static_cast<std::ptrdiff_t>(
                           std::min(keys.size() - 1,
                                    static_cast<std::size_t>(v / params.variant_fraction *
                                                             static_cast<double>(keys.size())))));
      r.variant_key = *it;
    }
    out.trace.push_back(std::move(r));
  }

  for (auto& spec : out.workflows) {
    const auto inputs = workflow_inputs(out.trace, spec.id());
    const auto baselines = profile_baselines(spec, classes, inputs, grids, noise,
                                             params.profile_samples, profile_rng);
    const auto cp = compute_critical_path(spec, baselines);
    spec.set_slo_ms(std::ceil(params.slo_scale * cp.cp_ms * 1000.0) / 1000.0);
  }
  return out;
}

}  // namespace okypous::sim
