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

#include "okypous/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <queue>
#include <random>
#include <sstream>
#include <tuple>

#include "okypous/budgeting.hpp"
#include "okypous/conflict_resolver.hpp"
#include "okypous/error.hpp"
#include "okypous/grey_box_model.hpp"
#include "okypous/history_table.hpp"
#include "okypous/power_model.hpp"
#include "okypous/sim/workload.hpp"
#include "okypous/units.hpp"

namespace okypous::sim {

BudgetMode parse_budget_mode(const std::string& name) {
  if (name == "greedy") return BudgetMode::kGreedy;
  if (name == "equal") return BudgetMode::kEqual;
  throw Error(ErrorKind::kConfig, "unknown budget_mode '" + name + "'");
}

std::string to_string(BudgetMode mode) {
  return mode == BudgetMode::kGreedy ? "greedy" : "equal";
}

void ClusterParams::validate() const {
  if (sockets <= 0 || cores_per_socket <= 0) {
    throw Error(ErrorKind::kConfig, "cluster needs at least one socket and one core");
  }
  if (core_switch_us < 0.0 || uncore_switch_us < 0.0) {
    throw Error(ErrorKind::kConfig, "switching latencies must be nonnegative");
  }
  if (!(governor_tick_ms > 0.0) || !(power_sample_ms > 0.0) || !(pool_interval_ms > 0.0)) {
    throw Error(ErrorKind::kConfig, "tick, sampling and pool intervals must be positive");
  }
  if (horizon_ms < 0.0) throw Error(ErrorKind::kConfig, "horizon_ms must be >= 0");
}

void SimConfig::validate() const {
  gains.validate();
  noise.validate();
  cluster.validate();
  if (profile_samples == 0 || pretrain_samples_per_class == 0) {
    throw Error(ErrorKind::kConfig, "profiling and pretraining need at least one sample");
  }
  if (cap_w && !(*cap_w > 0.0)) throw Error(ErrorKind::kConfig, "cap_w must be positive");
}

double per_core_allowance_w(const SimConfig& config, double cap_w) {
  return (cap_w - config.power_truth.socket_static_w) / config.cluster.cores_per_socket;
}

namespace {

enum EventKind : int {
  kSettle = 0,
  kComplete = 1,
  kArrival = 2,
  kStart = 3,
  kTick = 4,
  kPoolReconfig = 5,
  kPowerSample = 6,
};

struct Event {
  Micros time;
  int kind;
  std::uint64_t seq;
  std::uint64_t a;
  std::uint64_t b;
};

struct EventLater {
  bool operator()(const Event& x, const Event& y) const {
    return std::tie(x.time, x.kind, x.seq) > std::tie(y.time, y.kind, y.seq);
  }
};

// Request id reserved for governor-owned settings (ondemand, pool levels).
constexpr std::uint64_t kGovernorRequest = 0;

struct Domain {
  DomainRequestSet requests;
  double effective;
  double target;
  std::uint64_t version = 0;
};

struct Core {
  int socket = 0;
  std::optional<std::uint64_t> exec;
  Domain domain;
  Micros busy_window_us = 0;
  double pool_ghz = 0.0;
};

struct Exec {
  std::uint64_t id = 0;
  std::uint64_t inv = 0;
  std::size_t node = 0;
  std::size_t core = 0;
  Micros start_us = 0;
  Micros last_us = 0;
  double remaining = 1.0;
  double rate_per_us = 0.0;
  std::uint64_t version = 0;
  Work work;
  double noise_factor = 1.0;
  double extra_ms = 0.0;
  PmcVector observed;
  FreqConfig cur_cfg;
  std::map<std::pair<double, double>, Micros> cfg_time;
  double budget_ms = 0.0;
  bool requested_core = false;
  bool requested_uncore = false;
  FreqConfig requested;
};

struct Invocation {
  std::uint64_t id = 0;
  std::size_t wf = 0;
  Micros arrival_us = 0;
  Activation active;
  std::vector<bool> taken;
  std::vector<int> pending;
  std::vector<double> target_start_ms;
  std::size_t remaining = 0;
  std::size_t started = 0;
  std::size_t stages = 0;
  double size = 1.0;
  std::string variant;
};

struct EcoProfile {
  double a = 0.0;  // ms * GHz
  double b = 0.0;  // ms
};

class Simulator {
 public:
  Simulator(const SimConfig& config, const SimInput& input)
      : cfg_(config), in_(input), grids_(config.grids) {}

  MetricsReport run();

 private:
  // Setup.
  void resolve_references();
  void train_models();
  void plan_budgets();
  void build_cluster();
  void fit_eco_profiles();

  // Event handling.
  void push(Micros t, int kind, std::uint64_t a = 0, std::uint64_t b = 0);
  void advance_to(Micros now);
  void on_arrival(std::size_t trace_index);
  void on_start(std::uint64_t inv_id, std::size_t node);
  void dispatch();
  void start_exec(std::uint64_t inv_id, std::size_t node, std::size_t core);
  void on_complete(std::uint64_t exec_id, std::uint64_t version);
  void on_settle(std::size_t domain, std::uint64_t version);
  void on_tick();
  void on_pool_reconfig();
  void on_power_sample();

  // Helpers.
  Domain& domain(std::size_t index);
  void retarget(std::size_t domain_index);
  void refresh_rates(std::size_t domain_index);
  void progress(Exec& e);
  void reschedule(Exec& e);
  FreqConfig effective(std::size_t core) const;
  double exec_latency_ms(const Exec& e, const FreqConfig& c) const;
  double socket_power_w(int socket) const;
  std::optional<std::size_t> pick_core(double desired_core_ghz, double* assigned_ghz);
  double clamp_core(double ghz) const;
  bool finished() const;
  const FunctionClass& node_class(std::size_t wf, std::size_t node) const;

  const SimConfig& cfg_;
  const SimInput& in_;
  const FreqGrids& grids_;

  std::vector<const FunctionClass*> class_of_;  // flattened per (wf, node)
  std::vector<std::size_t> class_offset_;
  std::map<std::string, std::size_t> wf_index_;

  std::optional<GreyBoxModel> latency_;
  PowerModel power_;
  HistoryStore history_;
  std::vector<BudgetPlan> plans_;
  // Per node: profiled p95 at max over the model's prediction there.
  std::vector<std::map<std::string, double>> tails_;
  std::vector<DvfaasPid> pids_;
  std::optional<EcoFaasPools> pools_;
  std::map<std::string, EcoProfile> eco_;
  std::optional<double> allowance_w_;
  FreqConfig ceiling_;
  double core_floor_ = 0.0;
  double uncore_floor_ = 0.0;

  std::vector<Core> cores_;
  std::vector<Domain> uncores_;
  std::map<std::uint64_t, Exec> execs_;
  std::map<std::uint64_t, Invocation> invs_;
  std::deque<std::pair<std::uint64_t, std::size_t>> ready_;

  std::priority_queue<Event, std::vector<Event>, EventLater> queue_;
  std::uint64_t seq_ = 0;
  std::uint64_t next_exec_ = 1;
  Micros now_ = 0;
  Micros energy_time_ = 0;
  // Per-socket energy and the time of the last power reading.
  std::vector<double> socket_energy_j_;
  std::vector<double> sampled_energy_j_;
  Micros sampled_time_ = 0;
  std::size_t arrivals_total_ = 0;
  std::size_t arrivals_seen_ = 0;

  std::mt19937_64 branch_rng_;
  std::mt19937_64 noise_rng_;
  std::mt19937_64 pmc_rng_;
  std::mt19937_64 setup_rng_;

  std::vector<RequestInterval> core_intervals_;
  std::vector<RequestInterval> uncore_intervals_;
  std::size_t missing_history_ = 0;
  MetricsReport report_;
};

const FunctionClass& Simulator::node_class(std::size_t wf, std::size_t node) const {
  return *class_of_[class_offset_[wf] + node];
}

void Simulator::resolve_references() {
  for (std::size_t w = 0; w < in_.workflows.size(); ++w) {
    const auto& spec = in_.workflows[w];
    if (!wf_index_.emplace(spec.id(), w).second) {
      throw Error(ErrorKind::kConfig, "duplicate workflow id '" + spec.id() + "'");
    }
    class_offset_.push_back(class_of_.size());
    for (const auto& node : spec.nodes()) {
      class_of_.push_back(&find_class(in_.classes, node.class_id));
    }
  }
  for (std::size_t i = 0; i < in_.trace.size(); ++i) {
    if (!wf_index_.count(in_.trace[i].workflow_id)) {
      std::ostringstream msg;
      msg << "trace record " << i + 1 << " references unknown workflow '"
          << in_.trace[i].workflow_id << "'";
      throw Error(ErrorKind::kConfig, msg.str());
    }
  }
  if (in_.classes.empty()) throw Error(ErrorKind::kConfig, "no function classes defined");
  const auto& c0 = in_.classes.front();
  for (const auto& c : in_.classes) {
    if (c.core_mix.size() != c0.core_mix.size() ||
        c.uncore_mix.size() != c0.uncore_mix.size() ||
        c.dram_mix.size() != c0.dram_mix.size()) {
      throw Error(ErrorKind::kConfig,
                  "class '" + c.id + "' has a different counter layout than '" + c0.id + "'");
    }
  }
}

void Simulator::train_models() {
  // Warm profiling: no cold-start spikes or interference in the corpus.
  NoiseParams warm = cfg_.noise;
  warm.spike_prob = 0.0;
  std::uniform_real_distribution<double> size(0.75, 1.25);
  std::uniform_int_distribution<std::size_t> pick(0, grids_.all_configs().size() - 1);
  std::vector<LatencySample> corpus;
  for (const auto& cls : in_.classes) {
    std::vector<std::string> variants{""};
    for (const auto& [k, v] : cls.variants) variants.push_back(k);
    for (const auto& var : variants) {
      for (std::size_t s = 0; s < cfg_.pretrain_samples_per_class; ++s) {
        const Work w = work_of(cls, size(setup_rng_), var);
        const FreqConfig c = grids_.all_configs()[pick(setup_rng_)];
        const double l =
            true_latency_ms(w, c, grids_.dram_ghz()) * draw_latency_factor(warm, setup_rng_);
        corpus.push_back({draw_observed_pmcs(pmcs_of(cls, w), warm, setup_rng_), c, l});
      }
    }
  }
  latency_ = GreyBoxModel::fit(corpus);

  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<PowerSample> power;
  for (int rep = 0; rep < 2; ++rep) {
    for (const auto& c : grids_.all_configs()) {
      power.push_back(
          {c, cfg_.power_truth.busy_w(c) * (1.0 + cfg_.noise.power_sigma * normal(setup_rng_))});
    }
  }
  power_ = PowerModel::fit(power, grids_);
}

void Simulator::plan_budgets() {
  for (std::size_t w = 0; w < in_.workflows.size(); ++w) {
    const auto& spec = in_.workflows[w];
    const auto inputs = workflow_inputs(in_.trace, spec.id());
    const auto baselines = profile_baselines(spec, in_.classes, inputs, grids_, cfg_.noise,
                                             cfg_.profile_samples, setup_rng_, &history_);
    std::vector<double> sizes;
    for (const auto& i : inputs) sizes.push_back(i.size);
    const double median = percentile(sizes, 0.5);
    const auto predictor = [&](const std::string& node_id, const FreqConfig& c) {
      const auto& cls = node_class(w, spec.index_of(node_id));
      const HistoryTable* t = history_.find(cls.id, "");
      const PmcVector p = t && !t->empty() ? t->interpolate(median)
                                           : pmcs_of(cls, work_of(cls, median, ""));
      return latency_->predict(p, c);
    };
    std::map<std::string, double> tail;
    for (const auto& [id, b] : baselines) {
      const double m = predictor(id, grids_.max_config());
      tail[id] = m > 0.0 ? std::max(1.0, b / m) : 1.0;
    }
    tails_.push_back(std::move(tail));
    if (cfg_.budget_mode == BudgetMode::kGreedy) {
      plans_.push_back(
          assign_budgets(spec, baselines, spec.slo_ms(), predictor, power_, grids_));
    } else {
      plans_.push_back(assign_equal_budgets(spec, baselines, spec.slo_ms()));
    }
    pids_.emplace_back(grids_, cfg_.pid);
  }
}

void Simulator::fit_eco_profiles() {
  // Latency against core frequency at max uncore, l(F) = A / F + B.
  NoiseParams warm = cfg_.noise;
  warm.spike_prob = 0.0;
  for (const auto& cls : in_.classes) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (double f : grids_.core()) {
      for (int r = 0; r < 5; ++r) {
        const Work w = work_of(cls, 1.0, "");
        const double l = true_latency_ms(w, {f, grids_.uncore().back()}, grids_.dram_ghz()) *
                         draw_latency_factor(warm, setup_rng_);
        const double x = 1.0 / f;
        sx += x;
        sy += l;
        sxx += x * x;
        sxy += x * l;
        n += 1;
      }
    }
    const double a = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    eco_[cls.id] = {std::max(a, 0.0), (sy - a * sx) / n};
  }
}

void Simulator::build_cluster() {
  const bool okypous = cfg_.policy == PolicyKind::kOkypous;
  ceiling_ = grids_.max_config();
  if (cfg_.cap_w) {
    const double idle = cfg_.power_truth.socket_static_w +
                        cfg_.cluster.cores_per_socket *
                            cfg_.power_truth.idle_w(grids_.min_config());
    if (*cfg_.cap_w < idle) {
      std::ostringstream msg;
      msg << "power cap " << *cfg_.cap_w << " W is below idle socket power " << idle << " W";
      throw Error(ErrorKind::kConfig, msg.str());
    }
    allowance_w_ = per_core_allowance_w(cfg_, *cfg_.cap_w) + 1e-9;
    if (*allowance_w_ < power_.predict(grids_.min_config())) {
      throw Error(ErrorKind::kConfig, "power cap leaves no feasible frequency config");
    }
    ceiling_ = clamp_to_cap(
        grids_, [&](const FreqConfig& c) { return power_.predict(c); }, grids_.max_config(),
        *allowance_w_);
  }
  core_floor_ = cfg_.policy == PolicyKind::kPerformance ? ceiling_.core_ghz
                                                        : grids_.core().front();
  uncore_floor_ = okypous ? grids_.uncore().front() : ceiling_.uncore_ghz;

  std::vector<std::size_t> split;
  if (cfg_.policy == PolicyKind::kEcofaasPools) {
    pools_ = EcoFaasPools::with_default_levels(grids_);
    split = pools_->even_split(static_cast<std::size_t>(cfg_.cluster.cores_per_socket));
  }
  for (int s = 0; s < cfg_.cluster.sockets; ++s) {
    uncores_.push_back({DomainRequestSet("uncore" + std::to_string(s), uncore_floor_),
                        uncore_floor_, uncore_floor_});
    std::size_t pool = 0;
    std::size_t used = 0;
    for (int c = 0; c < cfg_.cluster.cores_per_socket; ++c) {
      const std::size_t idx = cores_.size();
      Core core{s, std::nullopt,
                {DomainRequestSet("core" + std::to_string(idx), core_floor_), core_floor_,
                 core_floor_},
                0, 0.0};
      double gov = -1.0;
      if (pools_) {
        while (pool < split.size() && used >= split[pool]) {
          ++pool;
          used = 0;
        }
        core.pool_ghz = clamp_core(pools_->levels()[std::min(pool, split.size() - 1)]);
        ++used;
        gov = core.pool_ghz;
      } else if (cfg_.policy == PolicyKind::kOndemand) {
        gov = clamp_core(grids_.core().front());
      }
      if (gov > 0.0) {
        core.domain.requests.submit(kGovernorRequest, gov);
        core.domain.effective = core.domain.target = gov;
      }
      cores_.push_back(std::move(core));
    }
  }
}

double Simulator::clamp_core(double ghz) const { return std::min(ghz, ceiling_.core_ghz); }

void Simulator::push(Micros t, int kind, std::uint64_t a, std::uint64_t b) {
  queue_.push({t, kind, seq_++, a, b});
}

Domain& Simulator::domain(std::size_t index) {
  return index < cores_.size() ? cores_[index].domain : uncores_[index - cores_.size()];
}

FreqConfig Simulator::effective(std::size_t core) const {
  return {cores_[core].domain.effective,
          uncores_[static_cast<std::size_t>(cores_[core].socket)].effective};
}

double Simulator::exec_latency_ms(const Exec& e, const FreqConfig& c) const {
  return true_latency_ms(e.work, c, grids_.dram_ghz()) * e.noise_factor + e.extra_ms;
}

double Simulator::socket_power_w(int socket) const {
  double p = cfg_.power_truth.socket_static_w;
  for (std::size_t i = 0; i < cores_.size(); ++i) {
    if (cores_[i].socket != socket) continue;
    const FreqConfig c = effective(i);
    p += cores_[i].exec ? cfg_.power_truth.busy_w(c) : cfg_.power_truth.idle_w(c);
  }
  return p;
}

void Simulator::advance_to(Micros now) {
  const Micros dt = now - energy_time_;
  if (dt > 0) {
    const double dt_ms = static_cast<double>(dt) / 1000.0;
    for (int s = 0; s < cfg_.cluster.sockets; ++s) {
      const double j = socket_power_w(s) * dt_ms / 1000.0;
      report_.energy_j += j;
      socket_energy_j_[static_cast<std::size_t>(s)] += j;
    }
    for (std::size_t i = 0; i < cores_.size(); ++i) {
      const FreqConfig c = effective(i);
      report_.residency_ms[{cores_[i].exec.has_value(), c.core_ghz, c.uncore_ghz}] += dt_ms;
      if (cores_[i].exec) cores_[i].busy_window_us += dt;
    }
  }
  energy_time_ = now;
}

void Simulator::progress(Exec& e) {
  const Micros dt = now_ - e.last_us;
  if (dt > 0) {
    e.remaining -= static_cast<double>(dt) * e.rate_per_us;
    e.cfg_time[{e.cur_cfg.core_ghz, e.cur_cfg.uncore_ghz}] += dt;
  }
  e.last_us = now_;
}

void Simulator::reschedule(Exec& e) {
  e.cur_cfg = effective(e.core);
  e.rate_per_us = 1.0 / (exec_latency_ms(e, e.cur_cfg) * 1000.0);
  ++e.version;
  const double left = std::max(0.0, e.remaining) / e.rate_per_us;
  push(now_ + static_cast<Micros>(std::ceil(left - 1e-6)), kComplete, e.id, e.version);
}

void Simulator::refresh_rates(std::size_t domain_index) {
  for (auto& [id, e] : execs_) {
    const bool hit = domain_index < cores_.size()
                         ? e.core == domain_index
                         : static_cast<std::size_t>(cores_[e.core].socket) ==
                               domain_index - cores_.size();
    if (!hit) continue;
    progress(e);
    reschedule(e);
  }
}

void Simulator::retarget(std::size_t domain_index) {
  Domain& d = domain(domain_index);
  const double want = d.requests.applied_ghz();
  if (want == d.target) return;
  d.target = want;
  ++d.version;
  if (want == d.effective) return;
  const double us = domain_index < cores_.size() ? cfg_.cluster.core_switch_us
                                                 : cfg_.cluster.uncore_switch_us;
  push(now_ + static_cast<Micros>(std::llround(us)), kSettle, domain_index, d.version);
}

void Simulator::on_settle(std::size_t domain_index, std::uint64_t version) {
  Domain& d = domain(domain_index);
  if (d.version != version || d.effective == d.target) return;
  advance_to(now_);
  d.effective = d.target;
  refresh_rates(domain_index);
}

void Simulator::on_arrival(std::size_t trace_index) {
  const auto& rec = in_.trace[trace_index];
  const std::size_t w = wf_index_.at(rec.workflow_id);
  const auto& spec = in_.workflows[w];
  Invocation inv;
  inv.id = trace_index;
  inv.wf = w;
  inv.arrival_us = now_;
  inv.active = sample_activation(spec, branch_rng_, &inv.taken);
  inv.pending.assign(spec.size(), 0);
  inv.target_start_ms.assign(spec.size(), 0.0);
  for (std::size_t e = 0; e < spec.edges().size(); ++e) {
    if (inv.taken[e]) ++inv.pending[spec.edge_target(e)];
  }
  for (std::size_t n = 0; n < spec.size(); ++n) inv.remaining += inv.active[n] ? 1 : 0;
  inv.stages = inv.remaining;
  inv.size = rec.input_size;
  inv.variant = rec.variant_key;
  invs_.emplace(inv.id, std::move(inv));
  push(now_, kStart, trace_index, spec.entry());
}

void Simulator::on_start(std::uint64_t inv_id, std::size_t node) {
  ready_.emplace_back(inv_id, node);
  dispatch();
}

std::optional<std::size_t> Simulator::pick_core(double desired, double* assigned) {
  // Sockets by free cores, most first; ties to the lower index.
  std::vector<std::pair<int, int>> order;
  for (int s = 0; s < cfg_.cluster.sockets; ++s) {
    int free = 0;
    for (const auto& c : cores_) free += (c.socket == s && !c.exec) ? 1 : 0;
    order.emplace_back(-free, s);
  }
  std::sort(order.begin(), order.end());
  if (order.front().first == 0) return std::nullopt;

  if (!pools_) {
    const int s = order.front().second;
    for (std::size_t i = 0; i < cores_.size(); ++i) {
      if (cores_[i].socket == s && !cores_[i].exec) return i;
    }
    return std::nullopt;
  }
  // Cheapest free pool at or above the desired level, else the fastest
  // free core below it.
  std::optional<std::size_t> best;
  for (const auto& [neg_free, s] : order) {
    if (neg_free == 0) continue;
    for (std::size_t i = 0; i < cores_.size(); ++i) {
      if (cores_[i].socket != s || cores_[i].exec) continue;
      if (!best) {
        best = i;
        continue;
      }
      const double a = cores_[i].pool_ghz;
      const double b = cores_[*best].pool_ghz;
      const bool a_ok = a >= desired - 1e-9;
      const bool b_ok = b >= desired - 1e-9;
      if ((a_ok && !b_ok) || (a_ok && b_ok && a < b) || (!a_ok && !b_ok && a > b)) best = i;
    }
  }
  if (best) *assigned = cores_[*best].pool_ghz;
  return best;
}

void Simulator::dispatch() {
  while (!ready_.empty()) {
    const auto [inv_id, node] = ready_.front();
    const auto& inv = invs_.at(inv_id);
    double desired = 0.0;
    if (pools_) {
      const auto& cls = node_class(inv.wf, node);
      const auto& prof = eco_.at(cls.id);
      const auto& id = in_.workflows[inv.wf].node(node).id;
      const double t = plans_[inv.wf].budgets_ms.at(id) / tails_[inv.wf].at(id);
      desired = t > prof.b ? prof.a / (t - prof.b) : grids_.core().back();
    }
    double assigned = 0.0;
    const auto core = pick_core(desired, &assigned);
    if (!core) return;
    ready_.pop_front();
    if (pools_) {
      pools_->record_demand(desired);
      report_.overshoot_sum_ghz += std::max(0.0, assigned - desired);
      ++report_.overshoot_count;
    }
    start_exec(inv_id, node, *core);
  }
}

void Simulator::start_exec(std::uint64_t inv_id, std::size_t node, std::size_t core) {
  advance_to(now_);
  auto& inv = invs_.at(inv_id);
  const auto& spec = in_.workflows[inv.wf];
  const auto& cls = node_class(inv.wf, node);
  const std::string var = effective_variant(cls, inv.variant);
  const double nominal = plans_[inv.wf].budgets_ms.at(spec.node(node).id);

  Exec e;
  e.id = next_exec_++;
  e.inv = inv_id;
  e.node = node;
  e.core = core;
  e.start_us = now_;
  e.last_us = now_;
  e.work = work_of(cls, inv.size, inv.variant);
  e.noise_factor = draw_latency_factor(cfg_.noise, noise_rng_);
  {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double u = uni(noise_rng_);
    const double v = uni(noise_rng_);
    if (u < cfg_.noise.interference_prob) {
      e.extra_ms = v * cfg_.noise.interference_frac *
                   true_latency_ms(e.work, grids_.max_config(), grids_.dram_ghz());
    }
  }
  e.observed = draw_observed_pmcs(pmcs_of(cls, e.work), cfg_.noise, pmc_rng_);
  e.budget_ms = nominal;

  SlackState state;
  state.target_ms = inv.target_start_ms[node];
  state.observed_ms = us_to_ms(now_ - inv.arrival_us);
  state.stage = inv.started;

  DecisionRecord rec;
  rec.invocation_id = inv_id;
  rec.stage = inv.started++;
  rec.slack_ms = state.slack_ms();
  rec.budget_ms = nominal;
  rec.feasible = true;

  FreqConfig want = ceiling_;
  switch (cfg_.policy) {
    case PolicyKind::kOkypous: {
      const HistoryTable* t = history_.find(cls.id, var);
      if (!t || t->empty()) {
        ++missing_history_;
        want = grids_.max_config();
        rec.feasible = false;
      } else {
        const ControlContext ctx{*latency_,   power_, grids_, cfg_.gains, allowance_w_,
                                 cfg_.switch_reserve_ms >= 0.0
                                     ? cfg_.switch_reserve_ms
                                     : (cfg_.cluster.core_switch_us +
                                        cfg_.cluster.uncore_switch_us) / 1000.0,
                                 tails_[inv.wf].at(spec.node(node).id)};
        const auto d = on_function_boundary(state, nominal, t->interpolate(inv.size), ctx);
        want = d.chosen;
        rec.budget_ms = d.updated_budget_ms;
        rec.pred_latency_ms = d.predicted_latency_ms;
        rec.pred_power_w = d.predicted_power_w;
        rec.feasible = d.feasible;
      }
      e.requested_core = e.requested_uncore = true;
      ++report_.overshoot_count;  // requests go out exactly as decided
      break;
    }
    case PolicyKind::kPerformance:
      e.requested_core = e.requested_uncore = true;
      break;
    case PolicyKind::kOndemand:
      want = {cores_[core].domain.target, ceiling_.uncore_ghz};
      e.requested_uncore = true;
      break;
    case PolicyKind::kDvfaasPid:
      want = {clamp_core(pids_[inv.wf].core_ghz()), ceiling_.uncore_ghz};
      e.requested_core = e.requested_uncore = true;
      break;
    case PolicyKind::kEcofaasPools:
      want = {cores_[core].pool_ghz, ceiling_.uncore_ghz};
      e.requested_uncore = true;
      break;
  }
  e.requested = want;
  rec.cfg = want;
  report_.decisions.push_back(rec);

  cores_[core].exec = e.id;
  const std::size_t uncore_index = cores_.size() + static_cast<std::size_t>(cores_[core].socket);
  if (e.requested_core) {
    cores_[core].domain.requests.submit(e.id, want.core_ghz);
    retarget(core);
  }
  if (e.requested_uncore) {
    uncores_[static_cast<std::size_t>(cores_[core].socket)].requests.submit(e.id,
                                                                         want.uncore_ghz);
    retarget(uncore_index);
  }
  auto [it, ok] = execs_.emplace(e.id, std::move(e));
  reschedule(it->second);
}

void Simulator::on_complete(std::uint64_t exec_id, std::uint64_t version) {
  const auto it = execs_.find(exec_id);
  if (it == execs_.end() || it->second.version != version) return;
  advance_to(now_);
  Exec& e = it->second;
  progress(e);
  auto& inv = invs_.at(e.inv);
  const auto& spec = in_.workflows[inv.wf];
  const auto& cls = node_class(inv.wf, e.node);
  const double start_ms = us_to_ms(e.start_us);
  const double end_ms = us_to_ms(now_);
  const double observed_ms = end_ms - start_ms;
  report_.stages.push_back({inv.id, spec.node(e.node).id, start_ms, end_ms});

  const int socket = cores_[e.core].socket;
  if (e.requested_core) {
    cores_[e.core].domain.requests.release(e.id);
    core_intervals_.push_back({start_ms, end_ms, "core" + std::to_string(e.core),
                               e.requested.core_ghz});
  }
  if (e.requested_uncore) {
    uncores_[static_cast<std::size_t>(socket)].requests.release(e.id);
    uncore_intervals_.push_back({start_ms, end_ms, "uncore" + std::to_string(socket),
                                 e.requested.uncore_ghz});
  }
  cores_[e.core].exec.reset();
  if (pools_) {
    auto& d = cores_[e.core].domain;
    d.requests.submit(kGovernorRequest, cores_[e.core].pool_ghz);
  }
  retarget(e.core);
  retarget(cores_.size() + static_cast<std::size_t>(socket));

  switch (cfg_.policy) {
    case PolicyKind::kOkypous: {
      const std::string var = effective_variant(cls, inv.variant);
      history_.table(cls.id, var).record(inv.size, e.observed);
      if (cfg_.online_updates) {
        // Train only on executions that ran (almost) entirely at one config,
        // and skip cold-start-like outliers.
        Micros total = 0;
        std::pair<double, double> dominant{0.0, 0.0};
        Micros longest = 0;
        for (const auto& [c, t] : e.cfg_time) {
          total += t;
          if (t > longest) {
            longest = t;
            dominant = c;
          }
        }
        const FreqConfig c{dominant.first, dominant.second};
        if (total > 0 && static_cast<double>(longest) >= 0.95 * static_cast<double>(total)) {
          const double predicted = latency_->predict(e.observed, c);
          if (observed_ms <= 2.0 * predicted) {
            latency_->update({e.observed, c, observed_ms});
            ++report_.model_updates;
          }
        }
      }
      break;
    }
    case PolicyKind::kDvfaasPid:
      pids_[inv.wf].observe(observed_ms,
                            e.budget_ms / tails_[inv.wf].at(spec.node(e.node).id));
      break;
    default:
      break;
  }

  const double done_target = inv.target_start_ms[e.node] + e.budget_ms;
  for (std::size_t edge : spec.out_edges(e.node)) {
    if (!inv.taken[edge]) continue;
    const std::size_t next = spec.edge_target(edge);
    inv.target_start_ms[next] = std::max(inv.target_start_ms[next], done_target);
    if (--inv.pending[next] == 0) push(now_, kStart, inv.id, next);
  }
  execs_.erase(it);
  if (--inv.remaining == 0) {
    InvocationRecord r;
    r.id = inv.id;
    r.workflow_id = spec.id();
    r.arrival_ms = us_to_ms(inv.arrival_us);
    r.completion_ms = end_ms;
    r.slo_ms = spec.slo_ms();
    r.stages = inv.stages;
    report_.invocations.push_back(std::move(r));
    invs_.erase(inv.id);
  }
  dispatch();
}

void Simulator::on_tick() {
  advance_to(now_);
  const double tick_us = cfg_.cluster.governor_tick_ms * 1000.0;
  for (std::size_t i = 0; i < cores_.size(); ++i) {
    const double util = static_cast<double>(cores_[i].busy_window_us) / tick_us;
    cores_[i].busy_window_us = 0;
    cores_[i].domain.requests.submit(kGovernorRequest,
                                     clamp_core(ondemand_core_ghz(grids_, util)));
    retarget(i);
  }
}

void Simulator::on_pool_reconfig() {
  const auto split =
      pools_->rebalance(static_cast<std::size_t>(cfg_.cluster.cores_per_socket));
  for (int s = 0; s < cfg_.cluster.sockets; ++s) {
    std::size_t pool = 0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < cores_.size(); ++i) {
      if (cores_[i].socket != s) continue;
      while (pool + 1 < split.size() && used >= split[pool]) {
        ++pool;
        used = 0;
      }
      ++used;
      cores_[i].pool_ghz = clamp_core(pools_->levels()[pool]);
      // Busy cores move to their new level when their function completes.
      if (!cores_[i].exec) {
        cores_[i].domain.requests.submit(kGovernorRequest, cores_[i].pool_ghz);
        retarget(i);
      }
    }
  }
}

// Average power over the interval since the previous reading.
void Simulator::on_power_sample() {
  advance_to(now_);
  if (now_ <= sampled_time_) return;
  const double interval_s = static_cast<double>(now_ - sampled_time_) / 1e6;
  for (std::size_t s = 0; s < socket_energy_j_.size(); ++s) {
    const double j = socket_energy_j_[s] - sampled_energy_j_[s];
    report_.power_readings.push_back({us_to_ms(now_), static_cast<int>(s), j / interval_s});
    sampled_energy_j_[s] = socket_energy_j_[s];
  }
  sampled_time_ = now_;
}

bool Simulator::finished() const { return arrivals_seen_ == arrivals_total_ && invs_.empty(); }

MetricsReport Simulator::run() {
  cfg_.validate();
  std::seed_seq s1{cfg_.seed, std::uint64_t{11}};
  std::seed_seq s2{cfg_.seed, std::uint64_t{12}};
  std::seed_seq s3{cfg_.seed, std::uint64_t{13}};
  std::seed_seq s4{cfg_.seed, std::uint64_t{14}};
  branch_rng_.seed(s1);
  noise_rng_.seed(s2);
  pmc_rng_.seed(s3);
  setup_rng_.seed(s4);

  report_.policy = to_string(cfg_.policy);
  report_.seed = cfg_.seed;
  report_.sockets = cfg_.cluster.sockets;
  socket_energy_j_.assign(static_cast<std::size_t>(cfg_.cluster.sockets), 0.0);
  sampled_energy_j_ = socket_energy_j_;
  report_.cores_per_socket = cfg_.cluster.cores_per_socket;

  resolve_references();
  train_models();
  plan_budgets();
  fit_eco_profiles();
  build_cluster();

  std::size_t dropped = 0;
  for (std::size_t i = 0; i < in_.trace.size(); ++i) {
    const double t = in_.trace[i].timestamp_ms;
    if (cfg_.cluster.horizon_ms > 0.0 && t > cfg_.cluster.horizon_ms) {
      ++dropped;
      continue;
    }
    push(ms_to_us(t), kArrival, i);
    ++arrivals_total_;
  }
  if (dropped) {
    report_.warnings.push_back(std::to_string(dropped) +
                               " arrivals beyond the horizon were truncated");
  }
  if (arrivals_total_ > 0) {
    push(ms_to_us(cfg_.cluster.power_sample_ms), kPowerSample);
    if (cfg_.policy == PolicyKind::kOndemand) push(ms_to_us(cfg_.cluster.governor_tick_ms), kTick);
    if (pools_) push(ms_to_us(cfg_.cluster.pool_interval_ms), kPoolReconfig);
  }

  while (!queue_.empty() && !finished()) {
    const Event ev = queue_.top();
    queue_.pop();
    now_ = ev.time;
    switch (ev.kind) {
      case kSettle: on_settle(ev.a, ev.b); break;
      case kComplete: on_complete(ev.a, ev.b); break;
      case kArrival:
        ++arrivals_seen_;
        on_arrival(ev.a);
        break;
      case kStart: on_start(ev.a, ev.b); break;
      case kTick:
        on_tick();
        push(now_ + ms_to_us(cfg_.cluster.governor_tick_ms), kTick);
        break;
      case kPoolReconfig:
        on_pool_reconfig();
        push(now_ + ms_to_us(cfg_.cluster.pool_interval_ms), kPoolReconfig);
        break;
      case kPowerSample:
        on_power_sample();
        push(now_ + ms_to_us(cfg_.cluster.power_sample_ms), kPowerSample);
        break;
    }
  }
  on_power_sample();
  report_.duration_ms = us_to_ms(now_);

  report_.core_drift = drift_report(core_intervals_, 1, core_floor_);
  report_.uncore_drift =
      drift_report(uncore_intervals_, cfg_.cluster.cores_per_socket, uncore_floor_);
  if (missing_history_) {
    report_.warnings.push_back(std::to_string(missing_history_) +
                               " functions ran at max frequency without history");
  }
  std::sort(report_.invocations.begin(), report_.invocations.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  return std::move(report_);
}

}  // namespace

MetricsReport run(const SimConfig& config, const SimInput& input) {
  Simulator sim(config, input);
  return sim.run();
}

}  // namespace okypous::sim
