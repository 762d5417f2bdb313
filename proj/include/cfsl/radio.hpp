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


#ifndef CFSL_RADIO_HPP_
#define CFSL_RADIO_HPP_

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace cfsl::radio {

struct WorkerHardware {
  double cpu_hz = 1e9;             // f_i
  double capacitance = 2e-28;      // effective switched capacitance
  double tx_power_w = 0.1;         // P_i
  double cycles_per_sample = 20.0; // Psi
};

struct ChannelParams {
  double bandwidth_hz = 10e6;  // B
  double noise_w = 1e-8;       // N0
  double g0_db = -35.0;
  double d0_m = 2.0;
  double path_loss_exp = 4.0;
};

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

// epochs * samples * cycles / f. Throws std::invalid_argument for f <= 0.
double comp_time(double samples, double cycles_per_sample, double cpu_hz, int epochs);

// (capacitance / 2) * epochs * f^2 * samples * cycles.
double comp_energy(double samples, double cycles_per_sample, double cpu_hz, int epochs,
                   double capacitance);

struct Gain {
  double linear = 0.0;
  bool clamped = false;  // d was below d0 and was raised to d0
};

// 10^(g0/10) * (d0/d)^exponent
Gain channel_gain(double distance_m, double g0_db, double d0_m, double exponent);

// share * B * log2(1 + gain * P / N0)
double data_rate(double share, double bandwidth_hz, double gain, double tx_power_w,
                 double noise_w);

struct CommCost {
  double time_s = 0.0;
  double energy_j = 0.0;
};

// time = bits / rate, energy = time * P. Throws std::invalid_argument for rate <= 0.
CommCost comm_time_energy(double bits, double rate_bps, double tx_power_w);

// Equal split of an edge's bandwidth among its scheduled workers.
inline double equal_share(std::size_t scheduled) {
  return scheduled == 0 ? 0.0 : 1.0 / static_cast<double>(scheduled);
}

struct WorkerCostInput {
  int worker = 0;
  int edge = 0;
  double samples = 0.0;  // D_eff
  double share = 1.0;    // beta
  double gain = 0.0;
  WorkerHardware hw;
};

struct EdgeUplink {
  double rate_bps = 1e8;  // delta_j
  double tx_power_w = 1.0;
  double bits = 0.0;      // payload sent to the cloud this round
};

struct WorkerCost {
  int worker = 0;
  int edge = 0;
  double share = 0.0;
  double rate_bps = 0.0;
  double t_cmp = 0.0;
  double t_com = 0.0;
  double e_cmp = 0.0;
  double e_com = 0.0;
  double latency() const { return t_cmp + t_com; }
  double energy() const { return e_cmp + e_com; }
};

struct EdgeCost {
  int edge = 0;
  int scheduled = 0;
  double share_sum = 0.0;
  double worker_time = 0.0;    // max over scheduled workers
  double worker_energy = 0.0;  // sum over scheduled workers
  double t_cld = 0.0;
  double e_cld = 0.0;
  double time() const { return t_cld + worker_time; }
  double energy() const { return worker_energy + e_cld; }
};

struct CostReport {
  std::vector<WorkerCost> workers;
  std::vector<EdgeCost> edges;
  double round_time = 0.0;    // max_j (T_cld + edge worker time)
  double round_energy = 0.0;  // sum_j (edge worker energy + uplink energy)

  // Recomputes the round totals from the per-worker entries.
  bool consistent(double rel_tol = 1e-12) const;
};

// Edges with no scheduled workers upload nothing and contribute zero cost.
CostReport round_costs(std::span<const WorkerCostInput> workers, std::span<const EdgeUplink> edges,
                       int epochs, double model_bits, const ChannelParams& channel);

class BudgetTracker {
 public:
  explicit BudgetTracker(double budget_s) : budget_s_(budget_s) {}
  void add(double time_s, double energy_j) {
    time_s_ += time_s;
    energy_j_ += energy_j;
  }
  double time() const { return time_s_; }
  double energy() const { return energy_j_; }
  // A budget of zero or less is unlimited.
  bool exhausted() const { return budget_s_ > 0.0 && time_s_ >= budget_s_; }

 private:
  double budget_s_ = 0.0;
  double time_s_ = 0.0;
  double energy_j_ = 0.0;
};

}  // namespace cfsl::radio

#endif  // CFSL_RADIO_HPP_
