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

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "okypous/conflict_resolver.hpp"
#include "okypous/controller.hpp"
#include "okypous/io/commands.hpp"

namespace okypous::io {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("okypous_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

// Small generated experiment shared by the tests below.
const fs::path& corpus() {
  static const fs::path dir = [] {
    auto d = scratch("corpus");
    GenOptions o;
    o.seed = 5;
    o.workflows = 6;
    o.invocations = 200;
    cmd_gen(d, o);
    return d;
  }();
  return dir;
}

json corpus_config() {
  std::ifstream in(corpus() / "config.json");
  return json::parse(in);
}

fs::path write_config(const fs::path& dir, const std::string& name, json doc) {
  // Paths stay valid from another directory.
  for (const char* k : {"catalog", "trace", "classes"}) {
    if (doc.contains(k)) doc[k] = (corpus() / doc[k].get<std::string>()).string();
  }
  const auto p = dir / name;
  std::ofstream(p) << doc.dump(2);
  return p;
}

int run_cli(const std::string& args, const fs::path& err) {
  const std::string cmd = std::string(OKYPOUS_CLI_PATH) + " " + args + " 2> " + err.string() +
                          " > /dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Config, UnknownKeyIsRejectedByName) {
  auto doc = corpus_config();
  doc["gains"] = {{"k_neg", 1.0}, {"k_mid", 0.5}};
  try {
    parse_config(doc, corpus(), "cfg.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    EXPECT_NE(std::string(e.what()).find("gains.k_mid"), std::string::npos) << e.what();
  }
}

TEST(Config, SeedIsRequired) {
  auto doc = corpus_config();
  doc.erase("seed");
  EXPECT_THROW(parse_config(doc, corpus(), "cfg.json"), Error);
}

TEST(Config, MalformedJsonNamesLine) {
  const auto dir = scratch("malformed");
  write(dir / "bad.json", "{\n  \"seed\": 1,\n  \"policy\": \n}\n");
  try {
    load_config(dir / "bad.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
}

TEST(Config, SeedOverrideFromEnvironment) {
  const auto dir = scratch("seed");
  const auto p = write_config(dir, "c.json", corpus_config());
  auto cfg = load_config(p);
  ::setenv("OKY_SEED", "4242", 1);
  apply_seed_override(cfg);
  ::unsetenv("OKY_SEED");
  EXPECT_EQ(cfg.sim.seed, 4242u);
  ::setenv("OKY_SEED", "x1", 1);
  EXPECT_THROW(apply_seed_override(cfg), Error);
  ::unsetenv("OKY_SEED");
}

TEST(Compare, RefusesConfigsThatDifferBeyondPolicy) {
  const auto dir = scratch("diff");
  auto a = corpus_config();
  auto b = corpus_config();
  b["policy"] = "performance";
  b["output_dir"] = "elsewhere";
  const auto pa = write_config(dir, "a.json", a);
  const auto pb = write_config(dir, "b.json", b);
  EXPECT_NO_THROW(check_comparable({load_config(pa), load_config(pb)}));

  b["noise"]["latency_sigma"] = 0.2;
  b["seed"] = 99;
  const auto pc = write_config(dir, "c.json", b);
  try {
    check_comparable({load_config(pa), load_config(pc)});
    FAIL();
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    EXPECT_NE(msg.find("/noise/latency_sigma"), std::string::npos) << msg;
    EXPECT_NE(msg.find("/seed"), std::string::npos) << msg;
    EXPECT_EQ(msg.find("/policy"), std::string::npos) << msg;
  }
}

TEST(Compare, SinglePolicySingleRow) {
  const auto dir = scratch("single");
  const auto p = write_config(dir, "a.json", corpus_config());
  std::ostringstream table;
  const auto reports = cmd_compare({p}, table);
  ASSERT_EQ(reports.size(), 1u);
  std::istringstream lines(table.str());
  std::string header, row, extra;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_EQ(header, kCompareHeader);
  EXPECT_EQ(row.rfind("okypous,", 0), 0u) << row;
  EXPECT_FALSE(std::getline(lines, extra) && !extra.empty());
}

TEST(Compare, ControllerDrawsLessThanPerformanceAndPools) {
  const auto dir = scratch("cmp");
  std::vector<fs::path> paths;
  for (const char* policy : {"performance", "ecofaas_pools", "okypous"}) {
    auto doc = corpus_config();
    doc["policy"] = policy;
    paths.push_back(write_config(dir, std::string(policy) + ".json", doc));
  }
  std::ostringstream table;
  const auto r = cmd_compare(paths, table);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_LT(r[2].mean_power_w(), r[0].mean_power_w());
  EXPECT_LT(r[2].mean_power_w(), r[1].mean_power_w());
}

TEST(Run, WritesFourFilesWithStableHeadersAndRerunsIdentically) {
  const auto dir = scratch("run");
  const auto p = write_config(dir, "c.json", corpus_config());
  const std::string before = slurp(p);
  const std::string trace_before = slurp(corpus() / "trace.csv");
  std::ostringstream log;
  cmd_run(p, dir / "a", log);
  cmd_run(p, dir / "b", log);
  for (const char* f : {"summary.json", "invocations.csv", "decisions.csv", "power.csv"}) {
    EXPECT_TRUE(fs::exists(dir / "a" / f)) << f;
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  EXPECT_EQ(first_line(dir / "a" / "invocations.csv"),
            "invocation_id,workflow_id,arrival_ms,completion_ms,latency_ms,slo_ms,"
            "latency_slo_ratio,violated,stages");
  EXPECT_EQ(first_line(dir / "a" / "decisions.csv"),
            "invocation_id,stage,slack_ms,budget_ms,core_ghz,uncore_ghz,pred_latency_ms,"
            "pred_power_w,feasible");
  EXPECT_EQ(first_line(dir / "a" / "power.csv"), "time_ms,socket,power_w");
  EXPECT_EQ(std::string(kCompareHeader),
            "policy,completed,violation_rate,mean_power_w,energy_j,ratio_p50,ratio_p95,"
            "ratio_p99");
  EXPECT_EQ(std::string(kDriftHeader),
            "domain_kind,sharing_degree,mean_drift_ghz,p50_drift_ghz,p95_drift_ghz,"
            "max_drift_ghz,request_seconds");
  const auto summary = json::parse(slurp(dir / "a" / "summary.json"));
  EXPECT_EQ(summary.at("policy"), "okypous");
  EXPECT_EQ(summary.at("seed"), 5);
  // Inputs untouched.
  EXPECT_EQ(slurp(p), before);
  EXPECT_EQ(slurp(corpus() / "trace.csv"), trace_before);
}

TEST(Run, OutputDirectoryIsRequired) {
  const auto dir = scratch("noout");
  auto doc = corpus_config();
  doc.erase("output_dir");
  const auto p = write_config(dir, "c.json", doc);
  std::ostringstream log;
  try {
    cmd_run(p, std::nullopt, log);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
}

TEST(Cli, MissingTraceExitsTwoNamingThePath) {
  const auto dir = scratch("missing");
  auto doc = corpus_config();
  doc["trace"] = "nowhere/trace.csv";
  const auto p = dir / "c.json";
  for (const char* k : {"catalog", "classes"}) {
    doc[k] = (corpus() / doc[k].get<std::string>()).string();
  }
  std::ofstream(p) << doc.dump();
  const auto err = dir / "err.txt";
  EXPECT_EQ(run_cli("run --config " + p.string() + " --out " + (dir / "out").string(), err), 2);
  EXPECT_NE(slurp(err).find("nowhere/trace.csv"), std::string::npos) << slurp(err);
}

TEST(Cli, RunExitsZero) {
  const auto dir = scratch("cliok");
  const auto p = write_config(dir, "c.json", corpus_config());
  EXPECT_EQ(run_cli("run --config " + p.string() + " --out " + (dir / "out").string(),
                    dir / "err.txt"),
            0)
      << slurp(dir / "err.txt");
  EXPECT_TRUE(fs::exists(dir / "out" / "summary.json"));
}

TEST(Cli, BadFlagsExitNonzero) {
  const auto dir = scratch("flags");
  EXPECT_NE(run_cli("fit --kind thermal --samples x.csv", dir / "err.txt"), 0);
  EXPECT_NE(run_cli("frobnicate", dir / "err.txt"), 0);
}

TEST(Fit, EmptyFileIsParseError) {
  const auto dir = scratch("empty");
  write(dir / "e.csv", "");
  for (auto kind : {ModelKind::kLatency, ModelKind::kPower}) {
    try {
      cmd_fit(kind, dir / "e.csv", std::nullopt);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kParse);
    }
  }
}

TEST(Fit, BadRowNamesLine) {
  const auto dir = scratch("badrow");
  write(dir / "p.csv", "core_ghz,uncore_ghz,watts\n1.2,1.2,5\n1.4,oops,6\n");
  try {
    load_power_samples(dir / "p.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    EXPECT_NE(std::string(e.what()).find("p.csv:3"), std::string::npos) << e.what();
  }
}

TEST(Fit, TooFewPowerSamples) {
  const auto dir = scratch("few");
  write(dir / "p.csv", "core_ghz,uncore_ghz,watts\n1.2,1.2,5\n1.4,1.5,6\n");
  try {
    cmd_fit(ModelKind::kPower, dir / "p.csv", std::nullopt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInsufficientCoverage);
  }
}

TEST(Fit, GeneratedLatencyCorpus) {
  const auto out = corpus() / "lat.model.json";
  const auto r = cmd_fit(ModelKind::kLatency, corpus() / "latency_samples.csv", out);
  EXPECT_LE(r.mape_percent, 5.0);
  EXPECT_GT(r.held_out, 0u);
  EXPECT_TRUE(fs::exists(out));
  const auto m = GreyBoxModel::from_json(json::parse(slurp(out)));
  EXPECT_TRUE(m.trained());
  EXPECT_NEAR(r.domain_shares.core_share + r.domain_shares.memory_share, 1.0, 1e-9);
}

TEST(Fit, GeneratedPowerCorpus) {
  const auto r = cmd_fit(ModelKind::kPower, corpus() / "power_samples.csv", std::nullopt);
  EXPECT_LE(r.mape_percent, 2.0);
  EXPECT_TRUE(fs::exists(corpus() / "power_samples.model.json"));
}

TEST(Samples, RoundTrip) {
  std::vector<LatencySample> s{{{{1, 2}, {3}, {4}}, {1.2, 1.5}, 10.5},
                               {{{5, 6}, {7}, {8}}, {2.5, 2.9}, 3.25}};
  std::ostringstream out;
  write_latency_samples(out, s);
  const auto dir = scratch("rt");
  write(dir / "l.csv", out.str());
  const auto back = load_latency_samples(dir / "l.csv");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].pmcs, s[1].pmcs);
  EXPECT_EQ(back[1].cfg, s[1].cfg);
  EXPECT_DOUBLE_EQ(back[0].latency_ms, 10.5);
}

TEST(ExitCodes, ConfigAndParseAreTwo) {
  EXPECT_EQ(exit_code_for(ErrorKind::kConfig), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::kParse), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::kInfeasibleSlo), 1);
}

}  // namespace
}  // namespace okypous::io
