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

#include "cfsl/hfl.hpp"

#include <stdexcept>

namespace cfsl::hfl {

namespace {

nn::ParamVector weighted_mean(std::span<const Weighted> items, const char* who) {
  if (items.empty()) throw std::invalid_argument(std::string(who) + ": empty input");
  double total = 0.0;
  for (const auto& it : items) {
    if (!it.value) throw std::invalid_argument(std::string(who) + ": null entry");
    if (!(it.weight > 0.0)) throw std::invalid_argument(std::string(who) + ": weights must be > 0");
    total += it.weight;
  }
  auto out = nn::ParamVector::zeros_like(*items.front().value);
  for (const auto& it : items) out.axpy(it.weight / total, *it.value);
  return out;
}

}  // namespace

nn::ParamVector edge_aggregate(std::span<const Weighted> updates) {
  return weighted_mean(updates, "edge_aggregate");
}

nn::ParamVector cloud_aggregate(std::span<const Weighted> models) {
  return weighted_mean(models, "cloud_aggregate");
}

BroadcastResult broadcast(const nn::ParamVector& model, std::size_t targets) {
  BroadcastResult r;
  if (targets == 0) {
    r.warnings = 1;
    return r;
  }
  r.copies.assign(targets, model);
  return r;
}

Topology::Topology(int edges, std::vector<int> edge_of_worker)
    : edges_(edges), edge_of_(std::move(edge_of_worker)) {
  if (edges_ < 1) throw std::invalid_argument("Topology: at least one edge");
  for (int e : edge_of_)
    if (e < 0 || e >= edges_) throw std::invalid_argument("Topology: edge index out of range");
  rebuild();
}

Topology Topology::round_robin(int workers, int edges) {
  if (workers < 1 || edges < 1) throw std::invalid_argument("Topology: workers and edges >= 1");
  std::vector<int> e(workers);
  for (int i = 0; i < workers; ++i) e[i] = i % edges;
  return Topology(edges, std::move(e));
}

void Topology::reassign(int worker, int edge) {
  if (edge < 0 || edge >= edges_) throw std::invalid_argument("Topology: edge index out of range");
  edge_of_.at(worker) = edge;
  rebuild();
}

void Topology::rebuild() {
  members_.assign(edges_, {});
  for (int i = 0; i < workers(); ++i) members_[edge_of_[i]].push_back(i);
}

std::vector<std::vector<int>> Topology::association() const {
  std::vector<std::vector<int>> a(edges_, std::vector<int>(edge_of_.size(), 0));
  for (std::size_t i = 0; i < edge_of_.size(); ++i) a[edge_of_[i]][i] = 1;
  return a;
}

bool Topology::association_valid() const {
  const auto a = association();
  for (std::size_t i = 0; i < edge_of_.size(); ++i) {
    int sum = 0;
    for (int j = 0; j < edges_; ++j) {
      if (a[j][i] != 0 && a[j][i] != 1) return false;
      sum += a[j][i];
    }
    if (sum != 1) return false;
  }
  std::size_t listed = 0;
  for (const auto& m : members_) listed += m.size();
  return listed == edge_of_.size();
}

}  // namespace cfsl::hfl
