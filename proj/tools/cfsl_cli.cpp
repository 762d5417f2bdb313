/**
 * Copyright 2026 The CFSL Simulator Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


// Command-line front end over the C interface.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cfsl/cfsl.h"

namespace {

int exit_code(cfsl_status s) {
  switch (s) {
    case CFSL_OK: return 0;
    case CFSL_CONFIG_ERROR:
    case CFSL_INVALID_ARGUMENT: return 2;
    default: return 3;
  }
}

int report_failure(cfsl_status s, const char* what) {
  std::fprintf(stderr, "cfsl: %s: %s\n", what, cfsl_last_error());
  return exit_code(s);
}

struct ConfigOptions {
  std::string path;
  std::string profile = "desk";
  std::vector<std::string> overrides;
};

void add_config_options(CLI::App* cmd, ConfigOptions& o, bool required) {
  auto* opt = cmd->add_option("--config", o.path, "JSON configuration file");
  if (required) opt->required();
  cmd->add_option("--profile", o.profile, "Built-in profile when no file is given (desk, paper)");
  cmd->add_option("--set", o.overrides, "Override a field, e.g. --set ssl.phi=0.8")->take_all();
}

// Builds the configuration; returns an exit code (0 on success).
int build_config(const ConfigOptions& o, cfsl_config** cfg) {
  cfsl_status s = o.path.empty() ? cfsl_config_create(o.profile.c_str(), cfg)
                                 : cfsl_config_load(o.path.c_str(), cfg);
  if (s != CFSL_OK) return report_failure(s, "config");
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "cfsl: --set expects key=value, got '%s'\n", kv.c_str());
      cfsl_config_destroy(*cfg);
      return 2;
    }
    s = cfsl_config_set(*cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (s != CFSL_OK) {
      cfsl_config_destroy(*cfg);
      return report_failure(s, "config");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clustered semi-supervised federated learning simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cfsl_version()));

  ConfigOptions sim_cfg;
  std::string scenario, out_dir;
  long long seed = -1;
  auto* simulate = app.add_subcommand("simulate", "Run one scenario");
  add_config_options(simulate, sim_cfg, false);
  simulate->add_option("--scenario", scenario, "Scenario name (e.g. BMSPGS, HFSL)");
  simulate->add_option("--seed", seed, "Run seed")->check(CLI::NonNegativeNumber);
  simulate->add_option("--out", out_dir, "Output directory")->required();

  ConfigOptions sweep_cfg;
  std::string grid, sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Run a grid of configurations");
  add_config_options(sweep, sweep_cfg, false);
  sweep->add_option("--grid", grid, "Grid JSON file")->required();
  sweep->add_option("--out", sweep_out, "Output directory")->required();

  std::string report_in, baseline;
  auto* report = app.add_subcommand("report", "Summarize runs against a baseline");
  report->add_option("--in", report_in, "Run or sweep directory")->required();
  report->add_option("--baseline", baseline, "Baseline scenario name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*simulate) {
    cfsl_config* cfg = nullptr;
    if (int rc = build_config(sim_cfg, &cfg)) return rc;
    cfsl_status s = CFSL_OK;
    if (!scenario.empty()) s = cfsl_config_set(cfg, "scenario", scenario.c_str());
    if (s == CFSL_OK && seed >= 0) s = cfsl_config_set(cfg, "seed", std::to_string(seed).c_str());
    if (s != CFSL_OK) {
      cfsl_config_destroy(cfg);
      return report_failure(s, "config");
    }
    cfsl_run* run = nullptr;
    s = cfsl_simulate(cfg, &run);
    cfsl_config_destroy(cfg);
    if (s != CFSL_OK) return report_failure(s, "simulate");
    s = cfsl_run_write(run, out_dir.c_str());
    cfsl_run_summary sum{};
    cfsl_run_summary_get(run, &sum);
    cfsl_run_destroy(run);
    if (s != CFSL_OK) return report_failure(s, "write");
    std::printf("rounds=%d final_acc_mean=%.4f label_accuracy=%.4f mean_energy_j=%.6g splits=%d "
                "clusters=%d audit_violations=%lld\n",
                sum.rounds_run, sum.final_acc_mean, sum.final_label_accuracy, sum.mean_energy_j,
                sum.splits, sum.final_clusters, static_cast<long long>(sum.audit_violations));
    return 0;
  }

  if (*sweep) {
    cfsl_config* cfg = nullptr;
    if (int rc = build_config(sweep_cfg, &cfg)) return rc;
    size_t cells = 0, failed = 0;
    const cfsl_status s = cfsl_sweep(cfg, grid.c_str(), sweep_out.c_str(), &cells, &failed);
    cfsl_config_destroy(cfg);
    if (s != CFSL_OK) return report_failure(s, "sweep");
    std::printf("cells=%zu failed=%zu table=%s/sweep.csv\n", cells, failed, sweep_out.c_str());
    return failed == 0 ? 0 : 3;
  }

  size_t needed = 0;
  cfsl_status s = cfsl_report(report_in.c_str(), baseline.c_str(), nullptr, 0, &needed);
  if (s != CFSL_OK) return report_failure(s, "report");
  std::string text(needed, '\0');
  s = cfsl_report(report_in.c_str(), baseline.c_str(), text.data(), text.size(), &needed);
  if (s != CFSL_OK) return report_failure(s, "report");
  std::fputs(text.c_str(), stdout);
  return 0;
}
