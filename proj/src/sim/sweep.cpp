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


#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
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

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

SweepGrid SweepGrid::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("grid is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("grid: top level must be an object");
  SweepGrid g;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    if (!it.value().is_array()) throw ConfigError("grid: '" + k + "' must be an array");
    try {
      if (k == "phi") g.phi = it.value().get<std::vector<double>>();
      else if (k == "labeled_fraction") g.labeled_fraction = it.value().get<std::vector<double>>();
      else if (k == "scenario") g.scenario = it.value().get<std::vector<std::string>>();
      else if (k == "seeds") g.seeds = it.value().get<std::vector<std::uint64_t>>();
      else throw ConfigError("grid: unknown axis '" + k + "'");
    } catch (const json::exception& e) {
      throw ConfigError("grid: bad values for '" + k + "': " + e.what());
    }
  }
  if (g.phi.empty() && g.labeled_fraction.empty() && g.scenario.empty() && g.seeds.empty())
    throw ConfigError("grid: at least one nonempty axis is required");
  for (const auto& s : g.scenario) scenario_by_name(s);
  return g;
}

SweepGrid SweepGrid::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open grid file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::vector<SweepCell> sweep(const SimConfig& base, const SweepGrid& grid, const std::string& out) {
  base.validate();
  const auto phis = grid.phi.empty() ? std::vector<double>{base.phi} : grid.phi;
  const auto lfs = grid.labeled_fraction.empty() ? std::vector<double>{base.data.labeled_fraction}
                                                 : grid.labeled_fraction;
  const auto scenarios =
      grid.scenario.empty() ? std::vector<std::string>{base.scenario} : grid.scenario;
  const auto seeds = grid.seeds.empty() ? std::vector<std::uint64_t>{base.seed} : grid.seeds;
  // Every cell must be a valid configuration before anything runs.
  for (double phi : phis)
    for (double lf : lfs) {
      SimConfig c = base;
      c.phi = phi;
      c.data.labeled_fraction = lf;
      c.validate();
    }

  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw RuntimeFailure("cannot create sweep directory " + out + ": " + ec.message());

  std::vector<SweepCell> cells;
  for (const auto& scenario : scenarios)
    for (double phi : phis)
      for (double lf : lfs)
        for (auto seed : seeds) {
          SweepCell cell;
          cell.scenario = scenario;
          cell.phi = phi;
          cell.labeled_fraction = lf;
          cell.seed = seed;
          cell.dir = scenario + "_phi" + short_num(phi) + "_lf" + short_num(lf) + "_s" +
                     std::to_string(seed);
          SimConfig c = base;
          c.scenario = scenario;
          c.phi = phi;
          c.data.labeled_fraction = lf;
          c.seed = seed;
          try {
            const auto result = run(c);
            write_artifacts(result, (fs::path(out) / cell.dir).string());
            cell.summary = result.summary;
            cell.ok = true;
          } catch (const std::exception& e) {
            cell.error = e.what();
          }
          cells.push_back(std::move(cell));
        }

  std::ostringstream csv;
  csv << "cell,scenario,phi,labeled_fraction,seed,ok,rounds_run,final_acc_min,final_acc_mean,"
         "final_acc_max,final_label_accuracy,final_label_coverage,mean_energy_j,total_energy_j,"
         "total_time_s,splits,final_clusters,fallbacks,audit_violations,error\n";
  for (const auto& c : cells) {
    const auto& s = c.summary;
    csv << c.dir << ',' << c.scenario << ',' << num(c.phi) << ',' << num(c.labeled_fraction) << ','
        << c.seed << ',' << (c.ok ? 1 : 0) << ',' << s.rounds_run << ',' << num(s.final_acc_min)
        << ',' << num(s.final_acc_mean) << ',' << num(s.final_acc_max) << ','
        << num(s.final_label_accuracy) << ',' << num(s.final_label_coverage) << ','
        << num(s.mean_energy_j) << ',' << num(s.total_energy_j) << ',' << num(s.total_time_s) << ','
        << s.splits << ',' << s.final_clusters << ',' << s.fallbacks << ','
        << s.audit.violations() << ',' << csv_field(c.error) << '\n';
  }
  std::ofstream f(fs::path(out) / "sweep.csv", std::ios::binary);
  if (!f) throw RuntimeFailure("cannot write sweep.csv in " + out);
  f << csv.str();
  return cells;
}

namespace {

struct LoadedRun {
  std::string name;
  json config;  // without the scenario field
  ReportRow row;
};

LoadedRun load_run(const fs::path& dir) {
  LoadedRun r;
  r.name = dir.filename().string();
  json cfg;
  try {
    cfg = json::parse(slurp(dir / "config.json"));
  } catch (const json::parse_error& e) {
    throw ConfigError("bad config.json in " + dir.string() + ": " + e.what());
  }
  r.row.run = r.name;
  r.row.scenario = cfg.value("scenario", "");
  cfg.erase("scenario");
  r.config = cfg;

  std::istringstream metrics(slurp(dir / "metrics.csv"));
  std::string line;
  std::getline(metrics, line);
  if (line != kMetricsColumns) throw ConfigError("unexpected metrics.csv header in " + dir.string());
  double energy = 0.0;
  std::vector<double> last;
  while (std::getline(metrics, line)) {
    if (line.empty()) continue;
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(std::stod(cell));
    if (cells.size() != 17) throw ConfigError("malformed metrics.csv row in " + dir.string());
    energy += cells[10];
    last = std::move(cells);
    ++r.row.rounds;
  }
  if (r.row.rounds > 0) {
    r.row.final_acc_min = last[4];
    r.row.final_acc_mean = last[5];
    r.row.final_acc_max = last[6];
    r.row.final_label_accuracy = last[7];
    r.row.mean_energy_j = energy / r.row.rounds;
  }
  try {
    r.row.seed = r.config.at("seed").get<std::uint64_t>();
  } catch (const json::exception&) {
    throw ConfigError("config.json without a seed in " + dir.string());
  }
  return r;
}

}  // namespace

std::vector<ReportRow> report(const std::string& in, const std::string& baseline) {
  scenario_by_name(baseline);
  const fs::path root(in);
  if (!fs::is_directory(root)) throw ConfigError("report: not a directory: " + in);
  std::vector<fs::path> dirs;
  if (fs::exists(root / "metrics.csv")) {
    dirs.push_back(root);
  } else {
    for (const auto& e : fs::directory_iterator(root))
      if (e.is_directory() && fs::exists(e.path() / "metrics.csv")) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
  }
  if (dirs.empty()) throw ConfigError("report: no runs found under " + in);

  std::vector<LoadedRun> runs;
  for (const auto& d : dirs) runs.push_back(load_run(d));
  std::vector<ReportRow> rows;
  for (const auto& r : runs) {
    const LoadedRun* base = nullptr;
    for (const auto& b : runs)
      if (b.row.scenario == baseline && b.config == r.config) {
        base = &b;
        break;
      }
    if (!base)
      throw ConfigError("report: run '" + r.name + "' has no baseline '" + baseline +
                        "' run with a matching configuration");
    if (!(base->row.mean_energy_j > 0.0))
      throw ConfigError("report: baseline run '" + base->name + "' has no energy to compare");
    ReportRow row = r.row;
    row.baseline_energy_j = base->row.mean_energy_j;
    row.savings_pct = savings_pct(base->row.mean_energy_j, row.mean_energy_j);
    rows.push_back(row);
  }
  return rows;
}

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "run,scenario,seed,rounds,final_acc_min,final_acc_mean,final_acc_max,"
         "final_label_accuracy,mean_energy_j,baseline_energy_j,savings_pct\n";
  for (const auto& r : rows)
    out << r.run << ',' << r.scenario << ',' << r.seed << ',' << r.rounds << ','
        << num(r.final_acc_min) << ',' << num(r.final_acc_mean) << ',' << num(r.final_acc_max)
        << ',' << num(r.final_label_accuracy) << ',' << num(r.mean_energy_j) << ','
        << num(r.baseline_energy_j) << ',' << num(r.savings_pct) << '\n';
  return out.str();
}

}  // namespace cfsl::sim
