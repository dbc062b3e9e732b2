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

#include "okypous/io/commands.hpp"

#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

#include "okypous/catalog.hpp"
#include "okypous/error.hpp"
#include "okypous/sim/simulator.hpp"
#include "okypous/sim/workload.hpp"
#include "okypous/trace.hpp"

namespace okypous::io {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kConfig, "cannot write '" + path.string() + "'");
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, "cannot open '" + path.string() + "'");
  return in;
}

double parse_number(const std::string& text, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::kParse, where + ": '" + text + "' is not a number");
  }
}

std::string location(const fs::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  return kind == ErrorKind::kConfig || kind == ErrorKind::kParse ? 2 : 1;
}

void write_reports(const sim::MetricsReport& report, const fs::path& dir) {
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "summary.json");
    out << report.summary().dump(2) << '\n';
  }
  {
    auto out = open_out(dir / "invocations.csv");
    sim::write_invocations_csv(out, report);
  }
  {
    auto out = open_out(dir / "decisions.csv");
    write_decision_log(out, report.decisions);
  }
  {
    auto out = open_out(dir / "power.csv");
    sim::write_power_csv(out, report);
  }
}

sim::MetricsReport cmd_run(const fs::path& config_path,
                           const std::optional<fs::path>& out_dir, std::ostream& log) {
  auto config = load_config(config_path);
  apply_seed_override(config);
  const fs::path dir = out_dir ? *out_dir
                               : config.output_dir ? *config.output_dir
                                                   : throw Error(ErrorKind::kConfig,
                                                                 config_path.string() +
                                                                     ": no output directory "
                                                                     "(pass --out or set "
                                                                     "output_dir)");
  const auto input = load_inputs(config);
  auto report = sim::run(config.sim, input);
  write_reports(report, dir);
  log << report.policy << ": " << report.invocations.size() << " invocations, "
      << report.violations() << " violations (" << std::fixed << std::setprecision(2)
      << 100.0 * report.violation_rate() << "%), mean power " << report.mean_power_w()
      << " W, energy " << report.energy_j << " J\n";
  for (const auto& w : report.warnings) log << "warning: " << w << '\n';
  return report;
}

void check_comparable(const std::vector<ExperimentConfig>& configs) {
  if (configs.size() < 2) return;
  const auto normalised = [](const ExperimentConfig& c) {
    json j = c.raw;
    j.erase("policy");
    j.erase("output_dir");
    j["catalog"] = fs::absolute(c.catalog).lexically_normal().string();
    j["trace"] = fs::absolute(c.trace).lexically_normal().string();
    if (c.classes) j["classes"] = fs::absolute(*c.classes).lexically_normal().string();
    return j;
  };
  const json first = normalised(configs.front());
  std::ostringstream msg;
  bool differ = false;
  for (std::size_t i = 1; i < configs.size(); ++i) {
    const json patch = json::diff(first, normalised(configs[i]));
    if (patch.empty()) continue;
    differ = true;
    msg << "\n  " << configs.front().source.string() << " vs " << configs[i].source.string()
        << ":";
    for (const auto& op : patch) {
      msg << ' ' << op.at("op").get<std::string>() << ' ' << op.at("path").get<std::string>();
    }
  }
  if (differ) {
    throw Error(ErrorKind::kConfig,
                "configs differ in more than policy and output_dir:" + msg.str());
  }
}

void write_compare_table(std::ostream& out, const std::vector<sim::MetricsReport>& reports) {
  out << kCompareHeader << '\n' << std::setprecision(10);
  for (const auto& r : reports) {
    std::vector<double> ratios;
    for (const auto& inv : r.invocations) ratios.push_back(inv.ratio());
    out << r.policy << ',' << r.invocations.size() << ',' << r.violation_rate() << ','
        << r.mean_power_w() << ',' << r.energy_j << ',' << sim::percentile(ratios, 0.5) << ','
        << sim::percentile(ratios, 0.95) << ',' << sim::percentile(ratios, 0.99) << '\n';
  }
}

std::vector<sim::MetricsReport> cmd_compare(const std::vector<fs::path>& paths,
                                            std::ostream& table) {
  std::vector<ExperimentConfig> configs;
  for (const auto& p : paths) {
    configs.push_back(load_config(p));
    apply_seed_override(configs.back());
  }
  check_comparable(configs);
  std::vector<sim::MetricsReport> reports;
  for (const auto& c : configs) reports.push_back(sim::run(c.sim, load_inputs(c)));
  write_compare_table(table, reports);
  return reports;
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "latency") return ModelKind::kLatency;
  if (name == "power") return ModelKind::kPower;
  throw Error(ErrorKind::kConfig, "unknown model kind '" + name + "'");
}

std::vector<LatencySample> load_latency_samples(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line.empty()) {
    throw Error(ErrorKind::kParse, location(path, 1) + ": empty file, expected a header");
  }
  const auto header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "core_ghz" || header[1] != "uncore_ghz" ||
      header[2] != "latency_ms") {
    throw Error(ErrorKind::kParse,
                location(path, 1) + ": header must start with core_ghz,uncore_ghz,latency_ms");
  }
  // Counter columns grouped core, then uncore, then dram.
  std::size_t nc = 0, nu = 0, nd = 0;
  int phase = 0;
  for (std::size_t i = 3; i < header.size(); ++i) {
    const auto& h = header[i];
    const int p = h.rfind("pmc_c", 0) == 0 ? 0 : h.rfind("pmc_u", 0) == 0 ? 1
                                           : h.rfind("pmc_d", 0) == 0   ? 2
                                                                        : -1;
    if (p < 0 || p < phase) {
      throw Error(ErrorKind::kParse, location(path, 1) + ": unexpected column '" + h + "'");
    }
    phase = p;
    (p == 0 ? nc : p == 1 ? nu : nd) += 1;
  }
  std::vector<LatencySample> out;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    const std::string where = location(path, n);
    if (f.size() != header.size()) {
      throw Error(ErrorKind::kParse, where + ": expected " + std::to_string(header.size()) +
                                         " fields, got " + std::to_string(f.size()));
    }
    LatencySample s;
    s.cfg = {parse_number(f[0], where), parse_number(f[1], where)};
    s.latency_ms = parse_number(f[2], where);
    std::size_t k = 3;
    for (std::size_t i = 0; i < nc; ++i) s.pmcs.core.push_back(parse_number(f[k++], where));
    for (std::size_t i = 0; i < nu; ++i) s.pmcs.uncore.push_back(parse_number(f[k++], where));
    for (std::size_t i = 0; i < nd; ++i) s.pmcs.dram.push_back(parse_number(f[k++], where));
    out.push_back(std::move(s));
  }
  if (out.empty()) throw Error(ErrorKind::kParse, location(path, n) + ": no samples");
  return out;
}

void write_latency_samples(std::ostream& out, const std::vector<LatencySample>& samples) {
  out << "core_ghz,uncore_ghz,latency_ms";
  if (!samples.empty()) {
    const auto& p = samples.front().pmcs;
    for (std::size_t i = 0; i < p.core.size(); ++i) out << ",pmc_c" << i;
    for (std::size_t i = 0; i < p.uncore.size(); ++i) out << ",pmc_u" << i;
    for (std::size_t i = 0; i < p.dram.size(); ++i) out << ",pmc_d" << i;
  }
  out << '\n' << std::setprecision(12);
  for (const auto& s : samples) {
    out << s.cfg.core_ghz << ',' << s.cfg.uncore_ghz << ',' << s.latency_ms;
    for (double v : s.pmcs.core) out << ',' << v;
    for (double v : s.pmcs.uncore) out << ',' << v;
    for (double v : s.pmcs.dram) out << ',' << v;
    out << '\n';
  }
}

std::vector<PowerSample> load_power_samples(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line.empty()) {
    throw Error(ErrorKind::kParse, location(path, 1) + ": empty file, expected a header");
  }
  if (line != "core_ghz,uncore_ghz,watts") {
    throw Error(ErrorKind::kParse, location(path, 1) + ": header must be core_ghz,uncore_ghz,watts");
  }
  std::vector<PowerSample> out;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    const std::string where = location(path, n);
    if (f.size() != 3) {
      throw Error(ErrorKind::kParse, where + ": expected 3 fields, got " + std::to_string(f.size()));
    }
    out.push_back({{parse_number(f[0], where), parse_number(f[1], where)},
                   parse_number(f[2], where)});
  }
  if (out.empty()) throw Error(ErrorKind::kParse, location(path, n) + ": no samples");
  return out;
}

void write_power_samples(std::ostream& out, const std::vector<PowerSample>& samples) {
  out << "core_ghz,uncore_ghz,watts\n" << std::setprecision(12);
  for (const auto& s : samples) {
    out << s.cfg.core_ghz << ',' << s.cfg.uncore_ghz << ',' << s.watts << '\n';
  }
}

FitReport cmd_fit(ModelKind kind, const fs::path& samples, const std::optional<fs::path>& out) {
  FitReport report;
  const fs::path target = out ? *out : fs::path(samples).replace_extension(".model.json");
  const auto split = [](const auto& all, auto& train, auto& test) {
    for (std::size_t i = 0; i < all.size(); ++i) (i % 5 == 4 ? test : train).push_back(all[i]);
    if (test.empty()) test = train;
  };
  if (kind == ModelKind::kLatency) {
    const auto all = load_latency_samples(samples);
    std::vector<LatencySample> train, test;
    split(all, train, test);
    const auto model = GreyBoxModel::fit(train);
    report.train = train.size();
    report.held_out = test.size();
    report.mape_percent = mean_absolute_percentage_error(model, test);
    report.model = model.to_json();
    std::size_t counted = 0;
    for (const auto& s : test) {
      try {
        const auto shares = model.counter_contributions(s.pmcs, s.cfg);
        const auto dom = model.domain_contributions(s.pmcs, s.cfg);
        if (report.counter_shares.empty()) report.counter_shares.assign(shares.size(), 0.0);
        for (std::size_t i = 0; i < shares.size(); ++i) report.counter_shares[i] += shares[i];
        report.domain_shares.core_share += dom.core_share;
        report.domain_shares.memory_share += dom.memory_share;
        ++counted;
      } catch (const Error&) {
        // Zero prediction: no shares to report for this sample.
      }
    }
    if (counted) {
      for (double& v : report.counter_shares) v /= static_cast<double>(counted);
      report.domain_shares.core_share /= static_cast<double>(counted);
      report.domain_shares.memory_share /= static_cast<double>(counted);
    }
  } else {
    const auto all = load_power_samples(samples);
    std::set<double> cores, uncores;
    for (const auto& s : all) {
      cores.insert(s.cfg.core_ghz);
      uncores.insert(s.cfg.uncore_ghz);
    }
    const FreqGrids grids =
        cores.size() >= 2 && uncores.size() >= 2 && *cores.begin() > 0.0 &&
                *uncores.begin() > 0.0
            ? FreqGrids({cores.begin(), cores.end()}, {uncores.begin(), uncores.end()},
                        FreqGrids::defaults().dram_ghz())
            : FreqGrids::defaults();
    std::vector<PowerSample> train, test;
    split(all, train, test);
    const auto model = PowerModel::fit(train, grids);
    report.train = train.size();
    report.held_out = test.size();
    report.mape_percent = mean_absolute_percentage_error(model, test);
    report.model = model.to_json();
  }
  auto file = open_out(target);
  file << report.model.dump(2) << '\n';
  return report;
}

void cmd_gen(const fs::path& dir, const GenOptions& options) {
  fs::create_directories(dir);
  const FreqGrids grids = FreqGrids::defaults();
  const sim::NoiseParams noise = options.noise ? sim::NoiseParams{} : sim::NoiseParams::none();
  const auto classes = sim::default_classes(4, grids.dram_ghz());

  sim::WorkloadParams params;
  params.workflows = options.workflows;
  params.invocations = options.invocations;
  params.slo_scale = options.slo_scale;
  params.target_utilization = options.utilization;
  const auto workload = sim::generate_workload(params, classes, grids, noise, options.seed);

  save_classes(dir / "classes.json", classes);
  save_catalog(dir / "catalog.json", workload.workflows);
  save_trace(dir / "trace.csv", workload.trace);

  json config;
  config["catalog"] = "catalog.json";
  config["trace"] = "trace.csv";
  config["classes"] = "classes.json";
  config["policy"] = options.policy;
  config["seed"] = options.seed;
  config["budget_mode"] = "greedy";
  config["noise"] = {{"latency_sigma", noise.latency_sigma},
                     {"spike_prob", noise.spike_prob},
                     {"spike_factor", noise.spike_factor},
                     {"pmc_sigma", noise.pmc_sigma},
                     {"power_sigma", noise.power_sigma},
                     {"interference_prob", noise.interference_prob},
                     {"interference_frac", noise.interference_frac}};
  config["output_dir"] = "out-" + options.policy;
  {
    auto out = open_out(dir / "config.json");
    out << config.dump(2) << '\n';
  }

  // Model-fitting corpora drawn from the same ground truth.
  std::seed_seq seq{options.seed, std::uint64_t{99}};
  std::mt19937_64 rng(seq);
  sim::NoiseParams warm = noise;
  warm.spike_prob = 0.0;
  std::uniform_real_distribution<double> size(0.5, 1.5);
  std::uniform_int_distribution<std::size_t> pick(0, grids.all_configs().size() - 1);
  std::vector<LatencySample> lat;
  for (int round = 0; round < 40; ++round) {
    for (const auto& cls : classes) {
      const auto w = sim::work_of(cls, size(rng), "");
      const FreqConfig c = grids.all_configs()[pick(rng)];
      const double l =
          sim::true_latency_ms(w, c, grids.dram_ghz()) * sim::draw_latency_factor(warm, rng);
      lat.push_back({sim::draw_observed_pmcs(sim::pmcs_of(cls, w), warm, rng), c, l});
    }
  }
  {
    auto out = open_out(dir / "latency_samples.csv");
    write_latency_samples(out, lat);
  }
  const sim::PowerTruth truth;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<PowerSample> pw;
  for (int rep = 0; rep < 3; ++rep) {
    for (const auto& c : grids.all_configs()) {
      pw.push_back({c, truth.busy_w(c) * (1.0 + noise.power_sigma * normal(rng))});
    }
  }
  auto out = open_out(dir / "power_samples.csv");
  write_power_samples(out, pw);
}

}  // namespace okypous::io
