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

#ifndef CFSL_CLUSTERING_HPP_
#define CFSL_CLUSTERING_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cfsl/hfl.hpp"
#include "cfsl/nn.hpp"

namespace cfsl::cluster {

inline constexpr double kDegenerateNorm = 1e-12;

struct Similarity {
  double value = 0.0;
  bool degenerate = false;  // one side had norm below kDegenerateNorm; value is 0
};

Similarity cosine_similarity(const nn::ParamVector& u, const nn::ParamVector& v);

class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  explicit SimilarityMatrix(std::size_t n);
  static SimilarityMatrix from_updates(std::span<const nn::ParamVector> updates);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  // Sets both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double v);
  std::size_t degenerate_pairs() const { return degenerate_; }
  // Symmetric, unit diagonal, entries in [-1, 1].
  bool valid() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
  std::size_t degenerate_ = 0;
};

enum class SplitDecision { no_split, split, stop };
const char* to_string(SplitDecision d);

struct SplitCheck {
  SplitDecision decision = SplitDecision::no_split;
  double aggregated_norm = 0.0;  // ||sum w_i g_i|| / sum w_i
  double max_norm = 0.0;         // max_i ||g_i||
};

// split iff aggregated < eps1 and max > eps2; stop iff max < eps2.
SplitCheck check_split(std::span<const nn::ParamVector> updates, std::span<const double> weights,
                       double eps1, double eps2);

struct Bipartition {
  std::vector<std::size_t> first;   // always contains index 0
  std::vector<std::size_t> second;
  double max_cross_similarity = 0.0;
};

double max_cross_similarity(const SimilarityMatrix& sim, std::span<const std::size_t> a,
                            std::span<const std::size_t> b);

// Minimises the largest cross-group similarity. Exact for every size: the
// optimum is the two components left when a maximum spanning tree on the
// similarity graph loses its weakest edge (single-linkage cut).
Bipartition bipartition(const SimilarityMatrix& sim);

struct GammaCheck {
  bool accepted = false;
  double max_gamma = 0.0;
  double bound = 0.0;  // sqrt((1 - max_cross) / 2)
  bool degenerate_mean = false;
};

// gamma_i = ||mean_g - u_i|| / ||mean_g|| with mean_g the weighted mean update of
// the proposed subgroup containing i; accepts iff max gamma_i < bound.
GammaCheck gamma_check(std::span<const nn::ParamVector> updates, std::span<const double> weights,
                       const Bipartition& split);

// Transitive closure of { (a, b) : sim(a, b) >= tau }. Labels are dense and
// numbered in order of first appearance.
std::vector<int> cloud_similarity_grouping(std::span<const nn::ParamVector> cluster_updates,
                                           double tau);

enum class ClusterStatus { active, stationary, stopped };
const char* to_string(ClusterStatus s);

inline constexpr int kCloudMerged = -1;

struct ClusterState {
  int id = 0;
  int parent = -1;
  std::vector<int> children;
  std::vector<int> members;  // ascending worker ids
  int edge = kCloudMerged;
  ClusterStatus status = ClusterStatus::active;
  nn::ParamVector model;
  int created_round = 0;
  int split_round = -1;
  int stop_round = -1;
  bool retired = false;  // replaced by its children
  double eps1 = 0.0;
  double eps2 = 0.0;
  bool eps_set = false;
  int cloud_group = -1;
  double last_aggregated_norm = 0.0;
  double last_max_norm = 0.0;
};

class ClusterRegistry {
 public:
  int add_root(std::vector<int> members, int edge, nn::ParamVector model);
  // Retires `id` and creates two children that inherit its model and thresholds.
  std::pair<int, int> split(int id, std::vector<int> first, std::vector<int> second, int round);

  ClusterState& at(int id) { return clusters_.at(id); }
  const ClusterState& at(int id) const { return clusters_.at(id); }
  std::vector<int> active() const;
  std::size_t active_count() const;
  std::size_t stopped_count() const;
  const std::vector<ClusterState>& all() const { return clusters_; }
  // Active cluster that currently owns a worker (or -1).
  int cluster_of(int worker) const;

  // Edge-owned clusters partition their edge; cloud-merged clusters partition everything.
  bool partition_valid(const hfl::Topology& topology) const;

  // Split tree per root as a JSON document.
  std::string lineage_json() const;

 private:
  std::vector<ClusterState> clusters_;
};

}  // namespace cfsl::cluster

#endif  // CFSL_CLUSTERING_HPP_
