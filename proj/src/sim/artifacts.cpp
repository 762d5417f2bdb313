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


#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cfsl/common.hpp"
#include "cfsl/sim.hpp"
#include "json.hpp"

namespace cfsl::sim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& v, char sep) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += sep;
    if constexpr (std::is_floating_point_v<T>) out += num(v[k]);
    else out += std::to_string(v[k]);
  }
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure("cannot write " + path.string());
  out << text;
  if (!out) throw RuntimeFailure("write failed for " + path.string());
}

}  // namespace

std::string metrics_csv(const RunResult& result) {
  std::ostringstream out;
  out << kMetricsColumns << '\n';
  for (const auto& m : result.metrics) {
    out << m.round << ',' << m.clusters << ',' << m.stopped_clusters << ',' << m.participants << ','
        << num(m.acc_min) << ',' << num(m.acc_mean) << ',' << num(m.acc_max) << ','
        << num(m.label_accuracy) << ',' << num(m.label_coverage) << ',' << m.pseudo_labels << ','
        << num(m.energy_j) << ',' << num(m.time_s) << ',' << num(m.cum_energy_j) << ','
        << num(m.cum_time_s) << ',' << num(m.deadline_s) << ',' << m.fallbacks << ','
        << num(m.objective) << '\n';
  }
  return out.str();
}

std::string summary_json(const Summary& s) {
  json j;
  j["scenario"] = s.scenario;
  j["seed"] = s.seed;
  j["rounds_run"] = s.rounds_run;
  j["budget_stop"] = s.budget_stop;
  j["final_acc_min"] = s.final_acc_min;
  j["final_acc_mean"] = s.final_acc_mean;
  j["final_acc_max"] = s.final_acc_max;
  j["final_label_accuracy"] = s.final_label_accuracy;
  j["final_label_coverage"] = s.final_label_coverage;
  j["mean_energy_j"] = s.mean_energy_j;
  j["total_energy_j"] = s.total_energy_j;
  j["total_time_s"] = s.total_time_s;
  j["splits"] = s.splits;
  j["first_split_round"] = s.first_split_round;
  j["final_clusters"] = s.final_clusters;
  j["fallbacks"] = s.fallbacks;
  j["audit"] = {{"checks", s.audit.checks},         {"deadline", s.audit.deadline},
                {"beta", s.audit.beta},             {"one_hot", s.audit.one_hot},
                {"simplex", s.audit.simplex},       {"association", s.audit.association},
                {"partition", s.audit.partition},   {"cost", s.audit.cost},
                {"violations", s.audit.violations()}};
  return j.dump(2);
}

Summary summary_from_json(const std::string& text) {
  const auto j = json::parse(text);
  Summary s;
  s.scenario = j.at("scenario");
  s.seed = j.at("seed");
  s.rounds_run = j.at("rounds_run");
  s.budget_stop = j.at("budget_stop");
  s.final_acc_min = j.at("final_acc_min");
  s.final_acc_mean = j.at("final_acc_mean");
  s.final_acc_max = j.at("final_acc_max");
  s.final_label_accuracy = j.at("final_label_accuracy");
  s.final_label_coverage = j.at("final_label_coverage");
  s.mean_energy_j = j.at("mean_energy_j");
  s.total_energy_j = j.at("total_energy_j");
  s.total_time_s = j.at("total_time_s");
  s.splits = j.at("splits");
  s.first_split_round = j.at("first_split_round");
  s.final_clusters = j.at("final_clusters");
  s.fallbacks = j.at("fallbacks");
  const auto& a = j.at("audit");
  s.audit.checks = a.at("checks");
  s.audit.deadline = a.at("deadline");
  s.audit.beta = a.at("beta");
  s.audit.one_hot = a.at("one_hot");
  s.audit.simplex = a.at("simplex");
  s.audit.association = a.at("association");
  s.audit.partition = a.at("partition");
  s.audit.cost = a.at("cost");
  return s;
}

void write_artifacts(const RunResult& result, const std::string& dir) {
  const fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root / "checkpoints", ec);
  if (ec) throw RuntimeFailure("cannot create output directory " + dir + ": " + ec.message());

  write_file(root / "metrics.csv", metrics_csv(result));

  {
    std::ostringstream out;
    out << "worker,edge,distribution,cpu_hz,tx_power_w,distance_m,gain,labeled,validation,"
           "unlabeled,test\n";
    for (const auto& w : result.workers)
      out << w.id << ',' << w.edge << ',' << w.distribution << ',' << num(w.cpu_hz) << ','
          << num(w.tx_power_w) << ',' << num(w.distance_m) << ',' << num(w.gain) << ','
          << w.labeled << ',' << w.validation << ',' << w.unlabeled << ',' << w.test << '\n';
    write_file(root / "workers.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "round,kind,id,edge,cluster,samples,share,rate_bps,t_cmp_s,t_com_s,e_cmp_j,e_com_j,"
           "time_s,energy_j\n";
    for (const auto& c : result.costs) {
      out << c.round << ',' << (c.edge_row ? "edge" : "worker") << ',' << c.id << ',' << c.edge
          << ',' << c.cluster << ',' << num(c.samples) << ',' << num(c.share) << ','
          << num(c.rate_bps) << ',' << num(c.t_cmp) << ',' << num(c.t_com) << ',' << num(c.e_cmp)
          << ',' << num(c.e_com) << ',' << num(c.t_cmp + c.t_com) << ',' << num(c.e_cmp + c.e_com)
          << '\n';
    }
    write_file(root / "costs.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "round,cluster,edge,policy,selected,latencies_s,fallback\n";
    for (const auto& s : result.selection)
      out << s.round << ',' << s.cluster << ',' << s.edge << ',' << s.policy << ','
          << join(s.selected, ';') << ',' << join(s.latencies, ';') << ',' << (s.fallback ? 1 : 0)
          << '\n';
    write_file(root / "selection.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "round,cluster,edge,status,members,participants,aggregated_norm,max_norm,eps1,eps2,"
           "decision,cloud_group,acc_mean\n";
    for (const auto& c : result.cluster_log)
      out << c.round << ',' << c.cluster << ',' << c.edge << ',' << c.status << ',' << c.members
          << ',' << c.participants << ',' << num(c.aggregated_norm) << ',' << num(c.max_norm) << ','
          << num(c.eps1) << ',' << num(c.eps2) << ',' << c.decision << ',' << c.cloud_group << ','
          << num(c.acc_mean) << '\n';
    write_file(root / "cluster_metrics.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "round,worker,sample_id,label,confidence,producer,oracle_correct\n";
    for (const auto& a : result.pseudo_audit)
      out << a.round << ',' << a.worker << ',' << a.sample << ',' << a.label << ','
          << num(a.confidence) << ',' << a.producer << ',' << (a.correct ? 1 : 0) << '\n';
    write_file(root / "pseudo_audit.csv", out.str());
  }
  write_file(root / "clusters.json", result.clusters_json + "\n");
  write_file(root / "config.json", result.config.to_json() + "\n");
  write_file(root / "summary.json", summary_json(result.summary) + "\n");
  for (const auto& c : result.checkpoints)
    write_file(root / "checkpoints" / ("round_" + std::to_string(c.round) + ".bin"), c.bytes);
}

}  // namespace cfsl::sim
