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

// Prints one PASS/FAIL line per acceptance criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "okypous/conflict_resolver.hpp"
#include "okypous/controller.hpp"
#include "okypous/grey_box_model.hpp"
#include "okypous/io/commands.hpp"
#include "okypous/power_model.hpp"
#include "okypous/sim/simulator.hpp"
#include "support.hpp"

namespace {

using namespace okypous;
using okypous::testing::make_scenario;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const FreqGrids& grids() {
  static const FreqGrids g = FreqGrids::defaults();
  return g;
}

// Noisy observations of default classes; spikes off (they are outliers, not
// measurement noise).
std::vector<LatencySample> draw_latency(const std::vector<sim::FunctionClass>& classes,
                                        std::size_t n, const sim::NoiseParams& noise,
                                        std::mt19937_64& rng) {
  std::uniform_real_distribution<double> size(0.5, 1.5);
  std::uniform_int_distribution<std::size_t> cls(0, classes.size() - 1);
  std::uniform_int_distribution<std::size_t> pick(0, grids().all_configs().size() - 1);
  std::vector<LatencySample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = classes[cls(rng)];
    const auto w = sim::work_of(c, size(rng), "");
    const auto cfg = grids().all_configs()[pick(rng)];
    out.push_back({sim::draw_observed_pmcs(sim::pmcs_of(c, w), noise, rng), cfg,
                   sim::true_latency_ms(w, cfg, grids().dram_ghz()) *
                       sim::draw_latency_factor(noise, rng)});
  }
  return out;
}

sim::NoiseParams measurement_noise() {
  sim::NoiseParams n;
  n.spike_prob = 0.0;
  return n;
}

Outcome latency_recovery() {
  const auto classes = sim::default_classes(4, grids().dram_ghz());
  std::mt19937_64 rng(1001);
  const auto noise = measurement_noise();
  const auto train = draw_latency(classes, 200, noise, rng);
  const auto test = draw_latency(classes, 2000, noise, rng);
  const double mape = mean_absolute_percentage_error(GreyBoxModel::fit(train), test);

  // Zero noise: random counters, known weights.
  const std::vector<double> c{0.9, 0.4, 1.3, 0.2}, u{0.7, 0.1, 0.5, 0.8}, d{0.3, 0.05, 0.6, 0.2};
  const auto truth = GreyBoxModel::from_coefficients(c, u, d);
  std::uniform_real_distribution<double> count(10.0, 500.0);
  std::uniform_int_distribution<std::size_t> pick(0, grids().all_configs().size() - 1);
  std::vector<LatencySample> exact;
  for (int k = 0; k < 200; ++k) {
    PmcVector p;
    for (int i = 0; i < 4; ++i) {
      p.core.push_back(count(rng));
      p.uncore.push_back(count(rng));
      p.dram.push_back(count(rng));
    }
    const auto cfg = grids().all_configs()[pick(rng)];
    exact.push_back({p, cfg, truth.predict(p, cfg)});
  }
  const auto m = GreyBoxModel::fit(exact);
  double worst = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    worst = std::max(worst, std::abs(m.core_coefficients()[i] - c[i]) / c[i]);
    worst = std::max(worst, std::abs(m.uncore_coefficients()[i] - u[i]) / u[i]);
    worst = std::max(worst, std::abs(m.dram_coefficients()[i] - d[i]) / d[i]);
  }
  return {mape <= 5.0 && worst <= 1e-6,
          "held-out MAPE " + fmt("%.2f%%", mape) + ", zero-noise coef error " + fmt("%.1e", worst)};
}

Outcome few_shot() {
  const auto classes = sim::default_classes(4, grids().dram_ghz());
  const auto noise = measurement_noise();
  std::mt19937_64 rng(2002);
  double sum1 = 0.0, sum5 = 0.0, worst5 = 0.0;
  for (std::size_t h = 0; h < classes.size(); ++h) {
    std::vector<sim::FunctionClass> others;
    for (std::size_t k = 0; k < classes.size(); ++k) {
      if (k != h) others.push_back(classes[k]);
    }
    const std::vector<sim::FunctionClass> held{classes[h]};
    auto model = GreyBoxModel::fit(draw_latency(others, 200, noise, rng));
    const auto test = draw_latency(held, 500, noise, rng);
    const auto updates = draw_latency(held, 5, noise, rng);
    model.update(updates[0]);
    const double m1 = mean_absolute_percentage_error(model, test);
    for (std::size_t k = 1; k < 5; ++k) model.update(updates[k]);
    const double m5 = mean_absolute_percentage_error(model, test);
    sum1 += m1;
    sum5 += m5;
    worst5 = std::max(worst5, m5);
  }
  const double n = static_cast<double>(classes.size());
  const double mean1 = sum1 / n, mean5 = sum5 / n;
  return {worst5 <= 5.0 && mean5 <= mean1 + 1e-9,
          "leave-one-class-out over " + std::to_string(classes.size()) + " classes: MAPE after 1 " +
              fmt("%.2f%%", mean1) + ", after 5 " + fmt("%.2f%%", mean5) + " (worst " +
              fmt("%.2f%%", worst5) + ")"};
}

Outcome power_model() {
  const sim::PowerTruth truth;
  std::mt19937_64 rng(3003);
  std::normal_distribution<double> n(0.0, 0.02);
  std::vector<PowerSample> train, test;
  for (int rep = 0; rep < 6; ++rep) {
    for (const auto& c : grids().all_configs()) {
      (rep < 3 ? train : test).push_back({c, truth.busy_w(c) * (1.0 + n(rng))});
    }
  }
  const auto m = PowerModel::fit(train, grids());
  const double mape = mean_absolute_percentage_error(m, test);
  bool monotone = true;
  const auto& cg = grids().core();
  const auto& ug = grids().uncore();
  for (std::size_t i = 0; i < cg.size(); ++i) {
    for (std::size_t j = 0; j < ug.size(); ++j) {
      const double here = m.predict({cg[i], ug[j]});
      if (here <= 0.0) monotone = false;
      if (i + 1 < cg.size() && m.predict({cg[i + 1], ug[j]}) < here) monotone = false;
      if (j + 1 < ug.size() && m.predict({cg[i], ug[j + 1]}) < here) monotone = false;
    }
  }
  return {mape <= 2.0 && monotone, "held-out MAPE " + fmt("%.2f%%", mape) +
                                       (monotone ? ", monotone" : ", NOT monotone")};
}

Outcome selection_oracle() {
  std::mt19937_64 rng(4004);
  std::uniform_real_distribution<double> w(0.0, 2.0), cnt(0.5, 20.0), a(0.0, 1.0), f(0.0, 1.0);
  int agree = 0;
  constexpr int kTrials = 1000;
  for (int t = 0; t < kTrials; ++t) {
    const auto lat = GreyBoxModel::from_coefficients({w(rng), w(rng)}, {w(rng), w(rng)}, {w(rng)});
    const auto pow = PowerModel::from_coefficients({1.0 + a(rng), a(rng), a(rng), a(rng), a(rng), a(rng)});
    const PmcVector p{{cnt(rng), cnt(rng)}, {cnt(rng), cnt(rng)}, {cnt(rng)}};
    const double lo = lat.predict(p, grids().max_config());
    const double hi = lat.predict(p, grids().min_config());
    const double budget = lo * 0.9 + (hi * 1.1 - lo * 0.9) * f(rng);
    std::optional<double> cap;
    if (t % 3 == 0) {
      const double pl = pow.predict(grids().min_config());
      const double ph = pow.predict(grids().max_config());
      cap = pl * 0.95 + (ph - pl * 0.95) * f(rng);
    }
    // Exhaustive argmin with the documented tie and fallback order.
    using Key = std::tuple<double, double, double, double>;
    std::optional<Key> best, fastest, cheapest;
    for (const auto& c : grids().all_configs()) {
      const double l = lat.predict(p, c), pw = pow.predict(c);
      const Key byp{pw, l, c.core_ghz, c.uncore_ghz}, byl{l, pw, c.core_ghz, c.uncore_ghz};
      if (!cheapest || byp < *cheapest) cheapest = byp;
      if (cap && pw > *cap) continue;
      if (!fastest || byl < *fastest) fastest = byl;
      if (l <= budget && (!best || byp < *best)) best = byp;
    }
    FreqConfig want;
    if (best) {
      want = {std::get<2>(*best), std::get<3>(*best)};
    } else if (!cap) {
      want = grids().max_config();
    } else if (fastest) {
      want = {std::get<2>(*fastest), std::get<3>(*fastest)};
    } else {
      want = {std::get<2>(*cheapest), std::get<3>(*cheapest)};
    }
    const auto d = select_config(lat, pow, grids(), p, budget, cap);
    if (d.chosen == want && d.feasible == best.has_value()) ++agree;
  }
  return {agree == kTrials, std::to_string(agree) + "/" + std::to_string(kTrials) + " agree"};
}

double median_ratio(const sim::MetricsReport& r) {
  std::vector<double> v;
  for (const auto& inv : r.invocations) v.push_back(inv.ratio());
  return sim::percentile(v, 0.5);
}

Outcome zero_noise() {
  sim::WorkloadParams p;
  p.slo_scale = 1.25;
  p.target_utilization = 0.2;
  const auto s = make_scenario(sim::PolicyKind::kOkypous, 7, p, sim::NoiseParams::none());
  const auto r = sim::run(s.config, s.input);
  const double med = median_ratio(r);
  return {r.violations() == 0 && med >= 0.85 && !r.invocations.empty(),
          std::to_string(s.input.workflows.size()) + " workflows, " +
              std::to_string(r.invocations.size()) + " invocations: " +
              std::to_string(r.violations()) + " violations, median latency/SLO " +
              fmt("%.3f", med)};
}

std::map<sim::PolicyKind, sim::MetricsReport>& compare_runs() {
  static std::map<sim::PolicyKind, sim::MetricsReport> runs;
  if (runs.empty()) {
    for (auto k : {sim::PolicyKind::kPerformance, sim::PolicyKind::kOndemand,
                   sim::PolicyKind::kDvfaasPid, sim::PolicyKind::kEcofaasPools,
                   sim::PolicyKind::kOkypous}) {
      const auto s = make_scenario(k, 7, sim::WorkloadParams{});
      runs.emplace(k, sim::run(s.config, s.input));
    }
  }
  return runs;
}

Outcome comparison() {
  auto& r = compare_runs();
  const auto pw = [&](sim::PolicyKind k) { return r.at(k).mean_power_w(); };
  using K = sim::PolicyKind;
  const double perf = pw(K::kPerformance), ond = pw(K::kOndemand), pid = pw(K::kDvfaasPid),
               eco = pw(K::kEcofaasPools), oky = pw(K::kOkypous);
  const double viol = r.at(K::kOkypous).violation_rate();
  const bool order = perf > ond && ond > std::max(pid, eco) && std::min(pid, eco) > oky;
  std::ostringstream d;
  d.precision(4);
  for (auto k : {K::kPerformance, K::kOndemand, K::kDvfaasPid, K::kEcofaasPools, K::kOkypous}) {
    d << sim::to_string(k) << ' ' << pw(k) << " W/" << 100.0 * r.at(k).violation_rate()
      << "% ";
  }
  const std::size_t n = r.at(K::kOkypous).invocations.size();
  return {order && viol <= 0.03 && n >= 2000,
          d.str() + "(" + std::to_string(n) + " invocations)"};
}

Outcome power_caps() {
  auto s = make_scenario(sim::PolicyKind::kOkypous, 7, sim::WorkloadParams{});
  const auto& t = s.config.power_truth;
  const double top = t.socket_static_w +
                     s.config.cluster.cores_per_socket * t.busy_w(s.config.grids.max_config());
  bool ok = true;
  std::ostringstream d;
  d.precision(4);
  for (double frac : {0.90, 0.85, 0.80}) {
    s.config.cap_w = frac * top;
    const auto r = sim::run(s.config, s.input);
    ok = ok && r.violation_rate() <= 0.035;
    d << *s.config.cap_w << " W: " << 100.0 * r.violation_rate() << "%  ";
  }
  return {ok, d.str()};
}

Outcome resolver() {
  const auto& grid = grids().core();
  std::mt19937_64 rng(8008);
  std::uniform_int_distribution<int> id(0, 31), level(0, static_cast<int>(grid.size()) - 1),
      op(0, 2);
  DomainRequestSet set("core0", grid.front());
  std::map<int, double> active;
  long broken = 0;
  constexpr int kOps = 100000;
  for (int k = 0; k < kOps; ++k) {
    const int who = id(rng);
    double applied;
    if (op(rng) < 2) {
      const double g = grid[level(rng)];
      active[who] = g;
      applied = set.submit(who, g);
    } else {
      active.erase(who);
      applied = set.release(who);
    }
    double want = grid.front();
    if (!active.empty()) {
      want = 0.0;
      for (const auto& [w, g] : active) want = std::max(want, g);
    }
    if (applied != want) ++broken;
  }
  auto& r = compare_runs();
  const double eco = r.at(sim::PolicyKind::kEcofaasPools).mean_overshoot_ghz();
  const double oky = r.at(sim::PolicyKind::kOkypous).mean_overshoot_ghz();
  return {broken == 0 && eco > 0.0 && oky == 0.0,
          std::to_string(broken) + " invariant breaks in " + std::to_string(kOps) +
              " ops; pool overshoot " + fmt("%.3f GHz", eco) + ", controller " +
              fmt("%.3f GHz", oky)};
}

Outcome overhead() {
  std::mt19937_64 rng(9009);
  std::uniform_real_distribution<double> w(0.1, 2.0), cnt(10.0, 500.0);
  std::vector<double> c, u, d;
  PmcVector p;
  for (int i = 0; i < 4; ++i) {
    c.push_back(w(rng));
    u.push_back(w(rng));
    d.push_back(w(rng));
    p.core.push_back(cnt(rng));
    p.uncore.push_back(cnt(rng));
    p.dram.push_back(cnt(rng));
  }
  const auto lat = GreyBoxModel::from_coefficients(c, u, d);
  const auto pow = PowerModel::from_coefficients(sim::PowerTruth{}.a, &grids());
  const double budget = lat.predict(p, grids().config(1.8, 2.1));
  double worst = 0.0, total = 0.0;
  constexpr int kRuns = 1000;
  for (int k = 0; k < kRuns; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto dec = select_config(lat, pow, grids(), p, budget, std::nullopt);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (!dec.feasible) return {false, "unexpected infeasible decision"};
    worst = std::max(worst, ms);
    total += ms;
  }
  return {worst < 5.0, "select over " + std::to_string(grids().all_configs().size()) +
                           " configs: mean " + fmt("%.4f ms", total / kRuns) + ", worst " +
                           fmt("%.4f ms", worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const auto dir = fs::temp_directory_path() / "okypous_acceptance_determinism";
  fs::remove_all(dir);
  io::GenOptions o;
  o.seed = 7;
  io::cmd_gen(dir, o);
  std::ostringstream log;
  io::cmd_run(dir / "config.json", dir / "a", log);
  io::cmd_run(dir / "config.json", dir / "b", log);
  bool same = true;
  std::string detail;
  for (const char* f : {"summary.json", "decisions.csv"}) {
    const auto a = slurp(dir / "a" / f), b = slurp(dir / "b" / f);
    const bool eq = !a.empty() && a == b;
    same = same && eq;
    detail += std::string(f) + (eq ? " identical (" : " DIFFERS (") + std::to_string(a.size()) +
              " bytes) ";
  }
  fs::remove_all(dir);
  return {same, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"latency model recovery", latency_recovery},
      {"few-shot convergence", few_shot},
      {"power model", power_model},
      {"selection oracle", selection_oracle},
      {"zero-noise control", zero_noise},
      {"policy comparison", comparison},
      {"power capping", power_caps},
      {"conflict resolver", resolver},
      {"decision overhead", overhead},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("criterion %2zu %s: %s [%s] (%.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), o.detail.c_str(), s);
    std::fflush(stdout);
  }
  return failed;
}
