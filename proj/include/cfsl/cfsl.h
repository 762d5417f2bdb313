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


/* C interface to the CFSL simulator. All functions return a cfsl_status; on
 * failure cfsl_last_error() describes the problem for the calling thread. */

#ifndef CFSL_CFSL_H_
#define CFSL_CFSL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CFSL_API __declspec(dllexport)
#else
#define CFSL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cfsl_status {
  CFSL_OK = 0,
  CFSL_INVALID_ARGUMENT = 1,
  CFSL_CONFIG_ERROR = 2,
  CFSL_RUNTIME_ERROR = 3,
  CFSL_IO_ERROR = 4
} cfsl_status;

typedef struct cfsl_config cfsl_config;
typedef struct cfsl_run cfsl_run;

typedef struct cfsl_round_metrics {
  int32_t round;
  int32_t clusters;
  int32_t stopped_clusters;
  int32_t participants;
  double acc_min;
  double acc_mean;
  double acc_max;
  double label_accuracy;
  double label_coverage;
  int32_t pseudo_labels;
  double energy_j;
  double time_s;
  double cum_energy_j;
  double cum_time_s;
  double deadline_s;
  int32_t fallbacks;
  double objective;
} cfsl_round_metrics;

typedef struct cfsl_run_summary {
  int32_t rounds_run;
  int32_t budget_stop;
  double final_acc_min;
  double final_acc_mean;
  double final_acc_max;
  double final_label_accuracy;
  double final_label_coverage;
  double mean_energy_j;
  double total_energy_j;
  double total_time_s;
  int32_t splits;
  int32_t first_split_round;
  int32_t final_clusters;
  int32_t fallbacks;
  int64_t audit_checks;
  int64_t audit_violations;
} cfsl_run_summary;

/* Message for the most recent failure on this thread; never NULL. */
CFSL_API const char* cfsl_last_error(void);
CFSL_API const char* cfsl_version(void);

/* profile: "desk" or "paper"; NULL selects "desk". */
CFSL_API cfsl_status cfsl_config_create(const char* profile, cfsl_config** out);
CFSL_API cfsl_status cfsl_config_load(const char* path, cfsl_config** out);
CFSL_API cfsl_status cfsl_config_parse(const char* json_text, cfsl_config** out);
/* Dotted override such as ("ssl.phi", "0.8"). */
CFSL_API cfsl_status cfsl_config_set(cfsl_config* cfg, const char* key, const char* value);
/* Copies the JSON form into buf (NUL-terminated). *needed receives the required
 * size including the terminator; pass buf = NULL to query it. */
CFSL_API cfsl_status cfsl_config_to_json(const cfsl_config* cfg, char* buf, size_t size,
                                         size_t* needed);
CFSL_API void cfsl_config_destroy(cfsl_config* cfg);

CFSL_API cfsl_status cfsl_simulate(const cfsl_config* cfg, cfsl_run** out);
CFSL_API cfsl_status cfsl_run_write(const cfsl_run* run, const char* dir);
CFSL_API cfsl_status cfsl_run_round_count(const cfsl_run* run, size_t* count);
CFSL_API cfsl_status cfsl_run_round(const cfsl_run* run, size_t index, cfsl_round_metrics* out);
CFSL_API cfsl_status cfsl_run_summary_get(const cfsl_run* run, cfsl_run_summary* out);
CFSL_API cfsl_status cfsl_run_metrics_csv(const cfsl_run* run, char* buf, size_t size,
                                          size_t* needed);
CFSL_API void cfsl_run_destroy(cfsl_run* run);

/* Runs every grid cell; *failed_cells receives the number of cells that failed. */
CFSL_API cfsl_status cfsl_sweep(const cfsl_config* base, const char* grid_path, const char* out_dir,
                                size_t* cells, size_t* failed_cells);
/* Writes the comparison table (CSV) into buf with the same size protocol as
 * cfsl_config_to_json. */
CFSL_API cfsl_status cfsl_report(const char* in_dir, const char* baseline, char* buf, size_t size,
                                 size_t* needed);

#ifdef __cplusplus
}
#endif

#endif /* CFSL_CFSL_H_ */
