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


#ifndef CFSL_SIM_HPP_
#define CFSL_SIM_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "cfsl/datagen.hpp"
#include "cfsl/labeling.hpp"
#include "cfsl/scheduling.hpp"

namespace cfsl::sim {

struct SimConfig {
  std::string profile = "desk";
  std::string scenario = "BMSPGS";
  std::uint64_t seed = 0;
  int threads = 1;

  // topology
  int workers = 20;
  int edges = 2;

  // training
  int rounds = 40;
  int epochs = 10;
  int batch = 32;
  double lr = 0.01;
  std::vector<int> hidden{32, 32};

  // radio
  double bandwidth_hz = 10e6;
  double noise_w = 1e-8;
  double g0_db = -35.0;
  double d0_m = 2.0;
  double path_loss_exp = 4.0;
  double distance_min_m = 5.0;
  double distance_max_m = 25.0;
  double edge_rate_bps = 1e8;
  double edge_power_w = 1.0;
  bool fading = false;
  double fading_sigma_db = 4.0;

  // hardware
  double cycles_per_sample = 20.0;
  double capacitance = 2e-28;
  double f_min_hz = 1e9;
  double f_max_hz = 9e9;
  double p_min_dbm = -10.0;
  double p_max_dbm = 20.0;

  data::DistributionSpec data;

  // pseudo-labeling
  double phi = 0.7;
  double kappa = 0.25;
  double rho_lat = 0.1;
  double temperature = 0.1;
  double lambda = 1.0;
  double validation_fraction = 0.2;

  // clustering; eps1/eps2 of zero are derived from the first-round update norms
  double eps1 = 0.0;
  double eps2 = 0.0;
  double eps1_rel = 0.4;
  double eps2_ratio = 1.6;
  bool gamma_check = true;
  double tau_cloud = 0.5;

  // scheduling
  int n_sel = 1;
  double deadline_slack = 1.1;

  double time_budget_s = 0.0;  // 0 = unlimited
  int checkpoint_every = 1;    // 0 disables checkpoints

  // Throws ConfigError.
  void validate() const;
  std::string to_json() const;
  // Missing keys keep their defaults; unknown keys are rejected.
  static SimConfig from_json(const std::string& text);
  static SimConfig load(const std::string& path);
  static SimConfig for_profile(const std::string& profile);
  // Dotted-path override, e.g. set("ssl.phi", "0.8"). The value is parsed as JSON
  // when possible and taken as a string otherwise.
  void set(const std::string& key, const std::string& value);
};

struct Scenario {
  std::string name;
  bool ssl = true;
  bool clustering = true;   // false: one global model for all workers
  ssl::PredictionModel model = ssl::PredictionModel::best_specialized;
  ssl::PredictionTime time = ssl::PredictionTime::split_based;
  sched::Policy policy = sched::Policy::greedy;
  bool baseline = false;
};

// Throws ConfigError for unknown names.
Scenario scenario_by_name(const std::string& name);
std::vector<std::string> scenario_names();

// Column order of metrics.csv.
extern const char* const kMetricsColumns;

struct RoundMetrics {
  int round = 0;
  int clusters = 0;
  int stopped_clusters = 0;
  int participants = 0;
  double acc_min = 0.0;
  double acc_mean = 0.0;
  double acc_max = 0.0;
  double label_accuracy = 0.0;
  double label_coverage = 0.0;
  int pseudo_labels = 0;
  double energy_j = 0.0;
  double time_s = 0.0;
  double cum_energy_j = 0.0;
  double cum_time_s = 0.0;
  double deadline_s = 0.0;
  int fallbacks = 0;
  double objective = 0.0;
};

struct CostRow {
  int round = 0;
  bool edge_row = false;  // false: a worker entry; true: an edge uplink entry
  int id = 0;             // worker or edge id
  int edge = 0;
  int cluster = -1;
  double samples = 0.0;
  double share = 0.0;
  double rate_bps = 0.0;
  double t_cmp = 0.0;
  double t_com = 0.0;
  double e_cmp = 0.0;
  double e_com = 0.0;
};

struct SelectionRow {
  int round = 0;
  int cluster = 0;
  int edge = 0;
  std::string policy;  // "all" before the cluster stops
  std::vector<int> selected;
  std::vector<double> latencies;
  bool fallback = false;
};

struct ClusterRow {
  int round = 0;
  int cluster = 0;
  int edge = 0;
  std::string status;
  int members = 0;
  int participants = 0;
  double aggregated_norm = 0.0;
  double max_norm = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  std::string decision;
  int cloud_group = -1;
  double acc_mean = 0.0;
};

struct AuditRow {
  int round = 0;
  int worker = 0;
  data::SampleId sample = 0;
  int label = 0;
  double confidence = 0.0;
  int producer = -1;
  bool correct = false;
};

struct SplitEvent {
  int round = 0;
  int cluster = 0;
  int edge = 0;
  std::vector<int> first;
  std::vector<int> second;
};

struct Checkpoint {
  int round = 0;
  std::string bytes;
};

struct AuditCounters {
  long checks = 0;
  long deadline = 0;
  long beta = 0;
  long one_hot = 0;
  long simplex = 0;
  long association = 0;
  long partition = 0;
  long cost = 0;
  long violations() const {
    return deadline + beta + one_hot + simplex + association + partition + cost;
  }
};

struct Summary {
  std::string scenario;
  std::uint64_t seed = 0;
  int rounds_run = 0;
  bool budget_stop = false;
  double final_acc_min = 0.0;
  double final_acc_mean = 0.0;
  double final_acc_max = 0.0;
  double final_label_accuracy = 0.0;
  double final_label_coverage = 0.0;
  double mean_energy_j = 0.0;
  double total_energy_j = 0.0;
  double total_time_s = 0.0;
  int splits = 0;
  int first_split_round = -1;
  int final_clusters = 0;
  int fallbacks = 0;
  AuditCounters audit;
};

struct WorkerInfo {
  int id = 0;
  int edge = 0;
  int distribution = 0;  // generating distribution
  double cpu_hz = 0.0;
  double tx_power_w = 0.0;
  double distance_m = 0.0;
  double gain = 0.0;
  int labeled = 0;  // training part of the labeled set
  int validation = 0;
  int unlabeled = 0;
  int test = 0;
};

struct RunResult {
  SimConfig config;
  std::vector<WorkerInfo> workers;
  std::vector<RoundMetrics> metrics;
  std::vector<CostRow> costs;
  std::vector<SelectionRow> selection;
  std::vector<ClusterRow> cluster_log;
  std::vector<AuditRow> pseudo_audit;
  std::vector<SplitEvent> splits;
  std::vector<Checkpoint> checkpoints;
  std::string clusters_json;
  Summary summary;
};

// Full round loop. Throws ConfigError before round 1 for an invalid config and
// RuntimeFailure when the built-in constraint audit detects a violation.
RunResult run(const SimConfig& config);

// metrics.csv, workers.csv, costs.csv, selection.csv, cluster_metrics.csv, pseudo_audit.csv,
// clusters.json, config.json, summary.json and checkpoints/round_<r>.bin.
void write_artifacts(const RunResult& result, const std::string& dir);

std::string metrics_csv(const RunResult& result);
std::string summary_json(const Summary& s);
Summary summary_from_json(const std::string& text);

struct SweepGrid {
  std::vector<double> phi;
  std::vector<double> labeled_fraction;
  std::vector<std::string> scenario;
  std::vector<std::uint64_t> seeds;  // empty: the base config seed
  static SweepGrid load(const std::string& path);
  static SweepGrid from_json(const std::string& text);
};

struct SweepCell {
  std::string dir;
  double phi = 0.0;
  double labeled_fraction = 0.0;
  std::string scenario;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  Summary summary;
};

// One run per grid cell written to <out>/<cell>/ plus a merged <out>/sweep.csv.
// A failing cell is recorded and the sweep continues.
std::vector<SweepCell> sweep(const SimConfig& base, const SweepGrid& grid, const std::string& out);

struct ReportRow {
  std::string run;
  std::string scenario;
  std::uint64_t seed = 0;
  int rounds = 0;
  double final_acc_min = 0.0;
  double final_acc_mean = 0.0;
  double final_acc_max = 0.0;
  double final_label_accuracy = 0.0;
  double mean_energy_j = 0.0;  // mean of the per-round energy column
  double baseline_energy_j = 0.0;
  double savings_pct = 0.0;
};

// Reads `in` (one run directory or a directory of runs), summarizes each
// metrics.csv and compares its mean per-round energy against the run of scenario
// `baseline` whose config.json matches in every field except the scenario.
// Throws ConfigError when a run has no comparable baseline.
std::vector<ReportRow> report(const std::string& in, const std::string& baseline);
std::string report_csv(const std::vector<ReportRow>& rows);

inline double savings_pct(double baseline_energy, double energy) {
  return (baseline_energy - energy) / baseline_energy * 100.0;
}

}  // namespace cfsl::sim

#endif  // CFSL_SIM_HPP_
