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


#include "cfsl/radio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cfsl::radio {

double comp_time(double samples, double cycles_per_sample, double cpu_hz, int epochs) {
  if (!(cpu_hz > 0.0)) throw std::invalid_argument("comp_time: cpu frequency must be > 0");
  return epochs * samples * cycles_per_sample / cpu_hz;
}

double comp_energy(double samples, double cycles_per_sample, double cpu_hz, int epochs,
                   double capacitance) {
  return capacitance / 2.0 * epochs * cpu_hz * cpu_hz * samples * cycles_per_sample;
}

Gain channel_gain(double distance_m, double g0_db, double d0_m, double exponent) {
  if (!(d0_m > 0.0)) throw std::invalid_argument("channel_gain: reference distance must be > 0");
  Gain g;
  double d = distance_m;
  if (d < d0_m) {
    d = d0_m;
    g.clamped = true;
  }
  g.linear = std::pow(10.0, g0_db / 10.0) * std::pow(d0_m / d, exponent);
  return g;
}

double data_rate(double share, double bandwidth_hz, double gain, double tx_power_w,
                 double noise_w) {
  // log1p keeps full precision at the low SNRs of distant, low-power workers.
  return share * bandwidth_hz * std::log1p(gain * tx_power_w / noise_w) / std::numbers::ln2;
}

CommCost comm_time_energy(double bits, double rate_bps, double tx_power_w) {
  if (!(rate_bps > 0.0)) throw std::invalid_argument("comm_time_energy: rate must be > 0");
  CommCost c;
  c.time_s = bits / rate_bps;
  c.energy_j = c.time_s * tx_power_w;
  return c;
}

CostReport round_costs(std::span<const WorkerCostInput> workers, std::span<const EdgeUplink> edges,
                       int epochs, double model_bits, const ChannelParams& channel) {
  CostReport r;
  r.edges.resize(edges.size());
  for (std::size_t j = 0; j < edges.size(); ++j) r.edges[j].edge = static_cast<int>(j);
  for (const auto& in : workers) {
    if (in.edge < 0 || static_cast<std::size_t>(in.edge) >= edges.size())
      throw std::invalid_argument("round_costs: worker edge out of range");
    WorkerCost c;
    c.worker = in.worker;
    c.edge = in.edge;
    c.share = in.share;
    c.rate_bps = data_rate(in.share, channel.bandwidth_hz, in.gain, in.hw.tx_power_w, channel.noise_w);
    c.t_cmp = comp_time(in.samples, in.hw.cycles_per_sample, in.hw.cpu_hz, epochs);
    c.e_cmp = comp_energy(in.samples, in.hw.cycles_per_sample, in.hw.cpu_hz, epochs, in.hw.capacitance);
    const auto com = comm_time_energy(model_bits, c.rate_bps, in.hw.tx_power_w);
    c.t_com = com.time_s;
    c.e_com = com.energy_j;
    auto& e = r.edges[in.edge];
    ++e.scheduled;
    e.share_sum += in.share;
    e.worker_time = std::max(e.worker_time, c.latency());
    e.worker_energy += c.energy();
    r.workers.push_back(c);
  }
  for (std::size_t j = 0; j < edges.size(); ++j) {
    auto& e = r.edges[j];
    if (e.scheduled > 0 && edges[j].bits > 0.0) {
      const auto up = comm_time_energy(edges[j].bits, edges[j].rate_bps, edges[j].tx_power_w);
      e.t_cld = up.time_s;
      e.e_cld = up.energy_j;
    }
    r.round_time = std::max(r.round_time, e.time());
    r.round_energy += e.energy();
  }
  return r;
}

bool CostReport::consistent(double rel_tol) const {
  std::vector<double> time(edges.size(), 0.0);
  std::vector<double> energy(edges.size(), 0.0);
  for (const auto& w : workers) {
    if (w.t_cmp < 0 || w.t_com < 0 || w.e_cmp < 0 || w.e_com < 0) return false;
    if (w.edge < 0 || static_cast<std::size_t>(w.edge) >= edges.size()) return false;
    time[w.edge] = std::max(time[w.edge], w.t_cmp + w.t_com);
    energy[w.edge] += w.e_cmp + w.e_com;
  }
  auto close = [rel_tol](double a, double b) {
    return a == b || std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
  };
  double t = 0.0;
  double e = 0.0;
  for (std::size_t j = 0; j < edges.size(); ++j) {
    if (edges[j].t_cld < 0 || edges[j].e_cld < 0) return false;
    if (!close(time[j], edges[j].worker_time) || !close(energy[j], edges[j].worker_energy))
      return false;
    t = std::max(t, edges[j].t_cld + time[j]);
    e += energy[j] + edges[j].e_cld;
  }
  return close(t, round_time) && close(e, round_energy);
}

}  // namespace cfsl::radio
