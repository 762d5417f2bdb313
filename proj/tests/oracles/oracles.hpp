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


// Straight-line reference implementations used as test oracles. They share no
// code with the library and favor obviousness over speed.

#ifndef CFSL_TESTS_ORACLES_HPP_
#define CFSL_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <random>
#include <vector>

namespace oracle {

inline bool rel_close(double a, double b, double tol) {
  if (a == b) return true;
  return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b));
}

// Eq. set for compute/communication costs written from first principles.
inline double updates_per_epoch(double d, double b) { return std::ceil(d / b); }
inline double t_cmp(double epochs, double d, double psi, double f) { return epochs * d * psi / f; }
inline double e_cmp(double cap, double epochs, double f, double d, double psi) {
  return 0.5 * cap * epochs * f * f * d * psi;
}
inline double path_gain(double d, double g0_db, double d0, double ups) {
  // dB to linear via exp/log rather than pow(10, x).
  const double g0 = std::exp(g0_db / 10.0 * std::log(10.0));
  double ratio = 1.0;
  for (int k = 0; k < static_cast<int>(ups); ++k) ratio *= d0 / d;
  const double frac = ups - std::floor(ups);
  if (frac > 0.0) ratio *= std::exp(frac * std::log(d0 / d));
  return g0 * ratio;
}
inline double rate(double beta, double bw, double h2, double p, double n0) {
  return beta * bw * std::log1p(h2 * p / n0) / std::log(2.0);
}
inline double t_com(double sigma, double r) { return sigma / r; }
inline double e_com(double t, double p) { return t * p; }
inline double dbm_to_w(double dbm) { return 1e-3 * std::exp(dbm / 10.0 * std::log(10.0)); }

struct OracleWorker {
  int edge;
  double d, psi, f, cap, beta, h2, p;
};

struct OracleRound {
  double time = 0.0;
  double energy = 0.0;
  std::vector<double> edge_time;
  std::vector<double> edge_energy;
};

inline OracleRound round_totals(const std::vector<OracleWorker>& ws, int edges, double epochs,
                                double sigma, double bw, double n0,
                                const std::vector<double>& uplink_bits,
                                const std::vector<double>& uplink_rate,
                                const std::vector<double>& uplink_power) {
  OracleRound r;
  r.edge_time.assign(edges, 0.0);
  r.edge_energy.assign(edges, 0.0);
  std::vector<int> count(edges, 0);
  for (const auto& w : ws) {
    const double tc = t_cmp(epochs, w.d, w.psi, w.f);
    const double ec = e_cmp(w.cap, epochs, w.f, w.d, w.psi);
    const double rr = rate(w.beta, bw, w.h2, w.p, n0);
    const double tm = t_com(sigma, rr);
    const double em = e_com(tm, w.p);
    if (tc + tm > r.edge_time[w.edge]) r.edge_time[w.edge] = tc + tm;
    r.edge_energy[w.edge] += ec + em;
    count[w.edge] += 1;
  }
  for (int j = 0; j < edges; ++j) {
    double tcld = 0.0, ecld = 0.0;
    if (count[j] > 0 && uplink_bits[j] > 0.0) {
      tcld = uplink_bits[j] / uplink_rate[j];
      ecld = tcld * uplink_power[j];
    }
    if (tcld + r.edge_time[j] > r.time) r.time = tcld + r.edge_time[j];
    r.energy += r.edge_energy[j] + ecld;
  }
  return r;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ab += a[k] * b[k];
    aa += a[k] * a[k];
    bb += b[k] * b[k];
  }
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

struct Split {
  std::vector<std::size_t> first, second;
  double value = std::numeric_limits<double>::infinity();
};

// Exhaustive search over all 2^(n-1) - 1 bipartitions with worker 0 in the first group.
inline Split brute_force_bipartition(const std::vector<std::vector<double>>& sim) {
  const std::size_t n = sim.size();
  Split best;
  for (unsigned long mask = 0; mask < (1ul << (n - 1)); ++mask) {
    std::vector<std::size_t> a{0}, b;
    for (std::size_t i = 1; i < n; ++i) ((mask >> (i - 1)) & 1ul ? b : a).push_back(i);
    if (b.empty()) continue;
    double worst = -std::numeric_limits<double>::infinity();
    for (auto i : a)
      for (auto j : b) worst = std::max(worst, sim[i][j]);
    if (worst < best.value) {
      best.value = worst;
      best.first = a;
      best.second = b;
    }
  }
  return best;
}

// Connected components of the graph { (i, j) : sim(i, j) >= tau } by BFS.
inline std::vector<int> components(const std::vector<std::vector<double>>& sim, double tau) {
  const std::size_t n = sim.size();
  std::vector<int> label(n, -1);
  int next = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] >= 0) continue;
    std::queue<std::size_t> q;
    q.push(s);
    label[s] = next;
    while (!q.empty()) {
      const auto u = q.front();
      q.pop();
      for (std::size_t v = 0; v < n; ++v)
        if (label[v] < 0 && v != u && sim[u][v] >= tau) {
          label[v] = next;
          q.push(v);
        }
    }
    ++next;
  }
  return label;
}

inline std::vector<double> softmax(const std::vector<double>& u, double temp) {
  std::vector<double> out(u.size());
  double z = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) z += std::exp(u[k] / temp);
  for (std::size_t k = 0; k < u.size(); ++k) out[k] = std::exp(u[k] / temp) / z;
  return out;
}

// Row-major dense MLP forward pass with ReLU hidden layers and softmax output.
// params are laid out per layer as W (out x in) followed by b.
inline std::vector<double> mlp_forward(const std::vector<int>& dims, const std::vector<double>& p,
                                       const std::vector<double>& x) {
  std::vector<double> a = x;
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int in = dims[l], out = dims[l + 1];
    std::vector<double> z(out, 0.0);
    for (int o = 0; o < out; ++o) {
      double s = 0.0;
      for (int i = 0; i < in; ++i) s += p[off + o * in + i] * a[i];
      z[o] = s;
    }
    off += static_cast<std::size_t>(in) * out;
    for (int o = 0; o < out; ++o) z[o] += p[off + o];
    off += out;
    if (l + 2 < dims.size())
      for (auto& v : z) v = v > 0.0 ? v : 0.0;
    a = z;
  }
  double m = a[0];
  for (double v : a) m = std::max(m, v);
  double s = 0.0;
  for (auto& v : a) {
    v = std::exp(v - m);
    s += v;
  }
  for (auto& v : a) v /= s;
  return a;
}

}  // namespace oracle

#endif  // CFSL_TESTS_ORACLES_HPP_
