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


#include "cfsl/cfsl.h"

#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "cfsl/common.hpp"
#include "cfsl/sim.hpp"

struct cfsl_config {
  cfsl::sim::SimConfig value;
};

struct cfsl_run {
  cfsl::sim::RunResult value;
};

namespace {

thread_local std::string g_error;

cfsl_status fail(cfsl_status s, const std::string& msg) {
  g_error = msg;
  return s;
}

template <typename Fn>
cfsl_status guarded(Fn&& fn) {
  try {
    g_error.clear();
    return fn();
  } catch (const cfsl::ConfigError& e) {
    return fail(CFSL_CONFIG_ERROR, e.what());
  } catch (const cfsl::RuntimeFailure& e) {
    return fail(CFSL_RUNTIME_ERROR, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(CFSL_IO_ERROR, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(CFSL_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CFSL_RUNTIME_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(CFSL_RUNTIME_ERROR, e.what());
  }
}

cfsl_status copy_out(const std::string& text, char* buf, std::size_t size, std::size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (!buf) return CFSL_OK;
  if (size < text.size() + 1) return fail(CFSL_INVALID_ARGUMENT, "buffer too small");
  std::memcpy(buf, text.data(), text.size());
  buf[text.size()] = '\0';
  return CFSL_OK;
}

cfsl_status make_config(cfsl::sim::SimConfig c, cfsl_config** out) {
  *out = new cfsl_config{std::move(c)};
  return CFSL_OK;
}

}  // namespace

extern "C" {

const char* cfsl_last_error(void) { return g_error.c_str(); }

const char* cfsl_version(void) { return "1.0.0"; }

cfsl_status cfsl_config_create(const char* profile, cfsl_config** out) {
  if (!out) return fail(CFSL_INVALID_ARGUMENT, "out is NULL");
  return guarded([&] {
    return make_config(cfsl::sim::SimConfig::for_profile(profile ? profile : "desk"), out);
  });
}

cfsl_status cfsl_config_load(const char* path, cfsl_config** out) {
  if (!path || !out) return fail(CFSL_INVALID_ARGUMENT, "path or out is NULL");
  return guarded([&] { return make_config(cfsl::sim::SimConfig::load(path), out); });
}

cfsl_status cfsl_config_parse(const char* json_text, cfsl_config** out) {
  if (!json_text || !out) return fail(CFSL_INVALID_ARGUMENT, "text or out is NULL");
  return guarded([&] { return make_config(cfsl::sim::SimConfig::from_json(json_text), out); });
}

cfsl_status cfsl_config_set(cfsl_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(CFSL_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    cfg->value.set(key, value);
    return CFSL_OK;
  });
}

cfsl_status cfsl_config_to_json(const cfsl_config* cfg, char* buf, size_t size, size_t* needed) {
  if (!cfg) return fail(CFSL_INVALID_ARGUMENT, "cfg is NULL");
  return guarded([&] { return copy_out(cfg->value.to_json(), buf, size, needed); });
}

void cfsl_config_destroy(cfsl_config* cfg) { delete cfg; }

cfsl_status cfsl_simulate(const cfsl_config* cfg, cfsl_run** out) {
  if (!cfg || !out) return fail(CFSL_INVALID_ARGUMENT, "cfg or out is NULL");
  return guarded([&] {
    *out = new cfsl_run{cfsl::sim::run(cfg->value)};
    return CFSL_OK;
  });
}

cfsl_status cfsl_run_write(const cfsl_run* run, const char* dir) {
  if (!run || !dir) return fail(CFSL_INVALID_ARGUMENT, "run or dir is NULL");
  return guarded([&] {
    try {
      cfsl::sim::write_artifacts(run->value, dir);
    } catch (const cfsl::RuntimeFailure& e) {
      return fail(CFSL_IO_ERROR, e.what());
    }
    return CFSL_OK;
  });
}

cfsl_status cfsl_run_round_count(const cfsl_run* run, size_t* count) {
  if (!run || !count) return fail(CFSL_INVALID_ARGUMENT, "run or count is NULL");
  *count = run->value.metrics.size();
  return CFSL_OK;
}

cfsl_status cfsl_run_round(const cfsl_run* run, size_t index, cfsl_round_metrics* out) {
  if (!run || !out) return fail(CFSL_INVALID_ARGUMENT, "run or out is NULL");
  if (index >= run->value.metrics.size()) return fail(CFSL_INVALID_ARGUMENT, "round index out of range");
  const auto& m = run->value.metrics[index];
  *out = cfsl_round_metrics{m.round,          m.clusters,   m.stopped_clusters, m.participants,
                            m.acc_min,        m.acc_mean,   m.acc_max,          m.label_accuracy,
                            m.label_coverage, m.pseudo_labels, m.energy_j,      m.time_s,
                            m.cum_energy_j,   m.cum_time_s, m.deadline_s,       m.fallbacks,
                            m.objective};
  return CFSL_OK;
}

cfsl_status cfsl_run_summary_get(const cfsl_run* run, cfsl_run_summary* out) {
  if (!run || !out) return fail(CFSL_INVALID_ARGUMENT, "run or out is NULL");
  const auto& s = run->value.summary;
  *out = cfsl_run_summary{s.rounds_run,
                          s.budget_stop ? 1 : 0,
                          s.final_acc_min,
                          s.final_acc_mean,
                          s.final_acc_max,
                          s.final_label_accuracy,
                          s.final_label_coverage,
                          s.mean_energy_j,
                          s.total_energy_j,
                          s.total_time_s,
                          s.splits,
                          s.first_split_round,
                          s.final_clusters,
                          s.fallbacks,
                          s.audit.checks,
                          s.audit.violations()};
  return CFSL_OK;
}

cfsl_status cfsl_run_metrics_csv(const cfsl_run* run, char* buf, size_t size, size_t* needed) {
  if (!run) return fail(CFSL_INVALID_ARGUMENT, "run is NULL");
  return guarded([&] { return copy_out(cfsl::sim::metrics_csv(run->value), buf, size, needed); });
}

void cfsl_run_destroy(cfsl_run* run) { delete run; }

cfsl_status cfsl_sweep(const cfsl_config* base, const char* grid_path, const char* out_dir,
                       size_t* cells, size_t* failed_cells) {
  if (!base || !grid_path || !out_dir) return fail(CFSL_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    const auto grid = cfsl::sim::SweepGrid::load(grid_path);
    const auto result = cfsl::sim::sweep(base->value, grid, out_dir);
    std::size_t failed = 0;
    for (const auto& c : result)
      if (!c.ok) ++failed;
    if (cells) *cells = result.size();
    if (failed_cells) *failed_cells = failed;
    return CFSL_OK;
  });
}

cfsl_status cfsl_report(const char* in_dir, const char* baseline, char* buf, size_t size,
                        size_t* needed) {
  if (!in_dir || !baseline) return fail(CFSL_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    return copy_out(cfsl::sim::report_csv(cfsl::sim::report(in_dir, baseline)), buf, size, needed);
  });
}

}  // extern "C"
