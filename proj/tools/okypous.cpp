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

// okypous command-line front end: run, compare, fit, gen.

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>

#include "okypous/error.hpp"
#include "okypous/io/commands.hpp"

namespace {

using okypous::io::cmd_compare;
using okypous::io::cmd_fit;
using okypous::io::cmd_gen;
using okypous::io::cmd_run;

void print_fit(const okypous::io::FitReport& r, const std::string& target) {
  std::cout << std::fixed << std::setprecision(3) << "trained on " << r.train
            << " samples, held out " << r.held_out << ", MAPE " << r.mape_percent << "%\n";
  if (!r.counter_shares.empty()) {
    std::cout << "core share " << r.domain_shares.core_share << ", memory share "
              << r.domain_shares.memory_share << '\n';
  }
  std::cout << "model written to " << target << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"okypous: core/uncore DVFS for serverless workflows"};
  app.require_subcommand(1);

  std::string run_config, run_out;
  auto* run = app.add_subcommand("run", "simulate one experiment");
  run->add_option("--config", run_config, "experiment config JSON")->required();
  run->add_option("--out", run_out, "output directory (default: config output_dir)");

  std::vector<std::string> cmp_configs;
  std::string cmp_out;
  auto* compare = app.add_subcommand("compare", "run configs differing only in policy");
  compare->add_option("--configs", cmp_configs, "config files")->required();
  compare->add_option("--out", cmp_out, "write the table here instead of stdout");

  std::string fit_kind, fit_samples, fit_out;
  auto* fit = app.add_subcommand("fit", "fit a latency or power model from samples");
  fit->add_option("--kind", fit_kind, "latency or power")
      ->required()
      ->check(CLI::IsMember({"latency", "power"}));
  fit->add_option("--samples", fit_samples, "samples CSV")->required();
  fit->add_option("--out", fit_out, "model JSON (default: <samples>.model.json)");

  std::string gen_dir;
  okypous::io::GenOptions gen_opts;
  bool gen_quiet = false;
  auto* gen = app.add_subcommand("gen", "write a synthetic experiment");
  gen->add_option("--dir", gen_dir, "target directory")->required();
  gen->add_option("--seed", gen_opts.seed, "generator seed");
  gen->add_option("--workflows", gen_opts.workflows, "number of workflows");
  gen->add_option("--invocations", gen_opts.invocations, "trace length");
  gen->add_option("--slo-scale", gen_opts.slo_scale, "SLO over critical path");
  gen->add_option("--utilization", gen_opts.utilization, "offered load at max config");
  gen->add_option("--policy", gen_opts.policy, "policy written into config.json");
  gen->add_flag("--no-noise", gen_quiet, "noise-free ground truth");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      std::optional<std::filesystem::path> out;
      if (!run_out.empty()) out = run_out;
      cmd_run(run_config, out, std::cout);
    } else if (*compare) {
      std::vector<std::filesystem::path> paths(cmp_configs.begin(), cmp_configs.end());
      if (cmp_out.empty()) {
        cmd_compare(paths, std::cout);
      } else {
        std::ofstream table(cmp_out);
        if (!table) {
          throw okypous::Error(okypous::ErrorKind::kConfig, "cannot write '" + cmp_out + "'");
        }
        cmd_compare(paths, table);
      }
    } else if (*fit) {
      std::optional<std::filesystem::path> out;
      if (!fit_out.empty()) out = fit_out;
      const auto kind = okypous::io::parse_model_kind(fit_kind);
      const auto report = cmd_fit(kind, fit_samples, out);
      print_fit(report,
                out ? out->string()
                    : std::filesystem::path(fit_samples).replace_extension(".model.json").string());
    } else if (*gen) {
      gen_opts.noise = !gen_quiet;
      cmd_gen(gen_dir, gen_opts);
      std::cout << "wrote experiment to " << gen_dir << '\n';
    }
  } catch (const okypous::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return okypous::io::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
