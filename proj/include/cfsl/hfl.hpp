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

#ifndef CFSL_HFL_HPP_
#define CFSL_HFL_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "cfsl/nn.hpp"

namespace cfsl::hfl {

struct Weighted {
  const nn::ParamVector* value = nullptr;
  double weight = 0.0;
};

// FedAvg over worker updates: sum(w_i * u_i) / sum(w_i). Callers pass entries in
// ascending worker id so the floating-point reduction order is fixed.
nn::ParamVector edge_aggregate(std::span<const Weighted> updates);

// Same reduction over edge (or cluster) models, weighted by total effective data.
nn::ParamVector cloud_aggregate(std::span<const Weighted> models);

struct BroadcastResult {
  std::vector<nn::ParamVector> copies;
  int warnings = 0;  // incremented for an empty target list
};

BroadcastResult broadcast(const nn::ParamVector& model, std::size_t targets);

// Worker-to-edge association. Every worker belongs to exactly one edge.
class Topology {
 public:
  Topology() = default;
  Topology(int edges, std::vector<int> edge_of_worker);
  // Worker i is attached to edge i mod edges.
  static Topology round_robin(int workers, int edges);

  int edges() const { return edges_; }
  int workers() const { return static_cast<int>(edge_of_.size()); }
  int edge_of(int worker) const { return edge_of_.at(worker); }
  const std::vector<int>& members(int edge) const { return members_.at(edge); }
  void reassign(int worker, int edge);

  // Binary matrix A[j][i] = 1 iff worker i is attached to edge j.
  std::vector<std::vector<int>> association() const;
  // Every column of the association matrix sums to one.
  bool association_valid() const;

 private:
  void rebuild();

  int edges_ = 0;
  std::vector<int> edge_of_;
  std::vector<std::vector<int>> members_;
};

}  // namespace cfsl::hfl

#endif  // CFSL_HFL_HPP_
