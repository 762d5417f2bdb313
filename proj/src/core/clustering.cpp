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

#include "cfsl/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>

#include "json.hpp"

namespace cfsl::cluster {

namespace {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n), components(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    --components;
    return true;
  }
  std::vector<std::size_t> parent;
  std::size_t components;
};

nn::ParamVector weighted_mean(std::span<const nn::ParamVector> updates,
                              std::span<const double> weights,
                              std::span<const std::size_t> idx) {
  auto out = nn::ParamVector::zeros_like(updates[idx.front()]);
  double total = 0.0;
  for (auto i : idx) total += weights[i];
  for (auto i : idx) out.axpy(weights[i] / total, updates[i]);
  return out;
}

}  // namespace

Similarity cosine_similarity(const nn::ParamVector& u, const nn::ParamVector& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu < kDegenerateNorm || nv < kDegenerateNorm) return {0.0, true};
  return {std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0), false};
}

SimilarityMatrix::SimilarityMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {
  for (std::size_t i = 0; i < n; ++i) data_[i * n + i] = 1.0;
}

SimilarityMatrix SimilarityMatrix::from_updates(std::span<const nn::ParamVector> updates) {
  SimilarityMatrix m(updates.size());
  for (std::size_t i = 0; i < updates.size(); ++i) {
    for (std::size_t j = i + 1; j < updates.size(); ++j) {
      const auto s = cosine_similarity(updates[i], updates[j]);
      m.set(i, j, s.value);
      if (s.degenerate) ++m.degenerate_;
    }
  }
  return m;
}

void SimilarityMatrix::set(std::size_t i, std::size_t j, double v) {
  data_[i * n_ + j] = v;
  data_[j * n_ + i] = v;
}

bool SimilarityMatrix::valid() const {
  for (std::size_t i = 0; i < n_; ++i) {
    if ((*this)(i, i) != 1.0) return false;
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = (*this)(i, j);
      if (!(v >= -1.0 && v <= 1.0) || v != (*this)(j, i)) return false;
    }
  }
  return true;
}

const char* to_string(SplitDecision d) {
  switch (d) {
    case SplitDecision::no_split: return "no_split";
    case SplitDecision::split: return "split";
    case SplitDecision::stop: return "stop";
  }
  return "?";
}

const char* to_string(ClusterStatus s) {
  switch (s) {
    case ClusterStatus::active: return "active";
    case ClusterStatus::stationary: return "stationary";
    case ClusterStatus::stopped: return "stopped";
  }
  return "?";
}

SplitCheck check_split(std::span<const nn::ParamVector> updates, std::span<const double> weights,
                       double eps1, double eps2) {
  if (updates.size() != weights.size())
    throw std::invalid_argument("check_split: updates/weights size mismatch");
  SplitCheck r;
  if (updates.empty()) return r;
  double total = 0.0;
  auto agg = nn::ParamVector::zeros_like(updates.front());
  for (std::size_t i = 0; i < updates.size(); ++i) {
    agg.axpy(weights[i], updates[i]);
    total += weights[i];
    r.max_norm = std::max(r.max_norm, updates[i].norm());
  }
  r.aggregated_norm = total > 0.0 ? agg.norm() / total : 0.0;
  if (r.max_norm < eps2) {
    r.decision = SplitDecision::stop;
  } else if (r.aggregated_norm < eps1 && r.max_norm > eps2) {
    r.decision = SplitDecision::split;
  }
  return r;
}

double max_cross_similarity(const SimilarityMatrix& sim, std::span<const std::size_t> a,
                            std::span<const std::size_t> b) {
  double best = -1.0;
  for (auto i : a)
    for (auto j : b) best = std::max(best, sim(i, j));
  return best;
}

Bipartition bipartition(const SimilarityMatrix& sim) {
  const std::size_t n = sim.size();
  if (n < 2) throw std::invalid_argument("bipartition: need at least two workers");

  std::vector<std::tuple<double, std::size_t, std::size_t>> edges;
  edges.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(sim(i, j), i, j);
  std::sort(edges.begin(), edges.end(), [](const auto& x, const auto& y) {
    if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) > std::get<0>(y);
    return std::make_pair(std::get<1>(x), std::get<2>(x)) <
           std::make_pair(std::get<1>(y), std::get<2>(y));
  });

  DisjointSets sets(n);
  for (const auto& [w, i, j] : edges) {
    if (sets.components == 2) break;
    sets.unite(i, j);
  }

  Bipartition out;
  const auto root0 = sets.find(0);
  for (std::size_t i = 0; i < n; ++i) (sets.find(i) == root0 ? out.first : out.second).push_back(i);
  out.max_cross_similarity = max_cross_similarity(sim, out.first, out.second);
  return out;
}

GammaCheck gamma_check(std::span<const nn::ParamVector> updates, std::span<const double> weights,
                       const Bipartition& split) {
  if (updates.size() != weights.size())
    throw std::invalid_argument("gamma_check: updates/weights size mismatch");
  if (split.first.empty() || split.second.empty())
    throw std::invalid_argument("gamma_check: both groups must be nonempty");
  GammaCheck r;
  r.bound = std::sqrt(std::max(0.0, (1.0 - split.max_cross_similarity) / 2.0));
  for (const auto* group : {&split.first, &split.second}) {
    const auto mean = weighted_mean(updates, weights, *group);
    const double mean_norm = mean.norm();
    if (mean_norm < kDegenerateNorm) {
      r.degenerate_mean = true;
      r.accepted = false;
      return r;
    }
    for (auto i : *group) r.max_gamma = std::max(r.max_gamma, (mean - updates[i]).norm() / mean_norm);
  }
  r.accepted = r.max_gamma < r.bound;
  return r;
}

std::vector<int> cloud_similarity_grouping(std::span<const nn::ParamVector> cluster_updates,
                                           double tau) {
  const std::size_t n = cluster_updates.size();
  DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (cosine_similarity(cluster_updates[i], cluster_updates[j]).value >= tau) sets.unite(i, j);
  std::vector<int> labels(n, -1);
  std::vector<int> label_of_root(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto root = sets.find(i);
    if (label_of_root[root] < 0) label_of_root[root] = next++;
    labels[i] = label_of_root[root];
  }
  return labels;
}

// ---------------------------------------------------------------------------
// ClusterRegistry

int ClusterRegistry::add_root(std::vector<int> members, int edge, nn::ParamVector model) {
  if (members.empty()) throw std::invalid_argument("ClusterRegistry: empty cluster");
  std::sort(members.begin(), members.end());
  ClusterState c;
  c.id = static_cast<int>(clusters_.size());
  c.members = std::move(members);
  c.edge = edge;
  c.model = std::move(model);
  clusters_.push_back(std::move(c));
  return clusters_.back().id;
}

std::pair<int, int> ClusterRegistry::split(int id, std::vector<int> first,
                                           std::vector<int> second, int round) {
  if (first.empty() || second.empty())
    throw std::invalid_argument("ClusterRegistry::split: both groups must be nonempty");
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  {
    std::vector<int> joined;
    std::merge(first.begin(), first.end(), second.begin(), second.end(),
               std::back_inserter(joined));
    if (joined != clusters_.at(id).members)
      throw std::invalid_argument("ClusterRegistry::split: groups must partition the cluster");
  }
  int ids[2];
  std::vector<int>* groups[2] = {&first, &second};
  for (int k = 0; k < 2; ++k) {
    const auto& parent = clusters_.at(id);
    ClusterState c;
    c.id = static_cast<int>(clusters_.size());
    c.parent = id;
    c.members = std::move(*groups[k]);
    c.edge = parent.edge;
    c.model = parent.model;
    c.created_round = round;
    c.eps1 = parent.eps1;
    c.eps2 = parent.eps2;
    c.eps_set = parent.eps_set;
    clusters_.push_back(std::move(c));
    ids[k] = clusters_.back().id;
  }
  auto& parent = clusters_.at(id);
  parent.retired = true;
  parent.split_round = round;
  parent.children = {ids[0], ids[1]};
  return {ids[0], ids[1]};
}

std::vector<int> ClusterRegistry::active() const {
  std::vector<int> out;
  for (const auto& c : clusters_)
    if (!c.retired) out.push_back(c.id);
  return out;
}

std::size_t ClusterRegistry::active_count() const { return active().size(); }

std::size_t ClusterRegistry::stopped_count() const {
  std::size_t n = 0;
  for (const auto& c : clusters_)
    if (!c.retired && c.status == ClusterStatus::stopped) ++n;
  return n;
}

int ClusterRegistry::cluster_of(int worker) const {
  for (const auto& c : clusters_)
    if (!c.retired && std::binary_search(c.members.begin(), c.members.end(), worker)) return c.id;
  return -1;
}

bool ClusterRegistry::partition_valid(const hfl::Topology& topology) const {
  std::vector<int> owner(topology.workers(), -1);
  for (const auto& c : clusters_) {
    if (c.retired) continue;
    if (c.members.empty()) return false;
    for (int w : c.members) {
      if (w < 0 || w >= topology.workers() || owner[w] >= 0) return false;
      if (c.edge != kCloudMerged && topology.edge_of(w) != c.edge) return false;
      owner[w] = c.id;
    }
  }
  return std::all_of(owner.begin(), owner.end(), [](int o) { return o >= 0; });
}

std::string ClusterRegistry::lineage_json() const {
  using nlohmann::json;
  std::function<json(int)> node = [&](int id) {
    const auto& c = clusters_.at(id);
    json j;
    j["id"] = c.id;
    j["edge"] = c.edge;
    j["members"] = c.members;
    j["created_round"] = c.created_round;
    j["split_round"] = c.split_round;
    j["stop_round"] = c.stop_round;
    j["status"] = c.retired ? "split" : to_string(c.status);
    j["cloud_group"] = c.cloud_group;
    j["eps1"] = c.eps1;
    j["eps2"] = c.eps2;
    json kids = json::array();
    for (int k : c.children) kids.push_back(node(k));
    j["children"] = kids;
    return j;
  };
  json roots = json::array();
  for (const auto& c : clusters_)
    if (c.parent < 0) roots.push_back(node(c.id));
  json doc;
  doc["roots"] = roots;
  doc["active_clusters"] = active().size();
  return doc.dump(2);
}

}  // namespace cfsl::cluster
