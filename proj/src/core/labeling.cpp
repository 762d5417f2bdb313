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


#include "cfsl/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace cfsl::ssl {

TopClass top_class(std::span<const double> probs) {
  TopClass t;
  if (probs.empty()) return t;
  t.confidence = probs[0];
  for (std::size_t k = 1; k < probs.size(); ++k) {
    if (probs[k] > t.confidence) {
      t.confidence = probs[k];
      t.label = static_cast<int>(k);
    }
  }
  return t;
}

std::vector<data::PseudoLabel> confident_labels(const ProbabilityFn& model,
                                                std::span<const data::UnlabeledSample> samples,
                                                double phi, int producer, int round) {
  if (!(phi > 0.0 && phi <= 1.0)) throw std::invalid_argument("confident_labels: phi must be in (0, 1]");
  std::vector<data::PseudoLabel> out;
  for (const auto& s : samples) {
    const auto probs = model(s.features);
    const auto top = top_class(probs);
    if (top.confidence >= phi) out.push_back({s.id, top.label, top.confidence, producer, round});
  }
  return out;
}

Utility model_utility(const ProbabilityFn& model, std::span<const data::Sample> validation,
                      std::span<const data::UnlabeledSample> unlabeled, double phi,
                      double normalized_latency, const UtilityParams& params) {
  Utility u;
  u.normalized_latency = normalized_latency;
  if (!unlabeled.empty()) {
    std::size_t covered = 0;
    for (const auto& s : unlabeled)
      if (top_class(model(s.features)).confidence >= phi) ++covered;
    u.coverage = static_cast<double>(covered) / static_cast<double>(unlabeled.size());
  }
  if (validation.empty()) {
    u.validation_empty = true;
    u.value = params.kappa * u.coverage;
    return u;
  }
  std::size_t correct = 0;
  for (const auto& s : validation)
    if (top_class(model(s.features)).label == s.label) ++correct;
  u.validation_accuracy = static_cast<double>(correct) / static_cast<double>(validation.size());
  u.value = u.validation_accuracy + params.kappa * u.coverage - params.rho_lat * normalized_latency;
  return u;
}

std::size_t ModelChoice::chosen() const {
  std::size_t best = 0;
  for (std::size_t m = 1; m < weights.size(); ++m)
    if (weights[m] > weights[best]) best = m;
  return best;
}

bool ModelChoice::valid(double tol) const {
  if (weights.empty()) return false;
  if (kind == Kind::one_hot) {
    int ones = 0;
    for (double w : weights) {
      if (w == 1.0) ++ones;
      else if (w != 0.0) return false;
    }
    return ones == 1;
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0 && w <= 1.0)) return false;
    sum += w;
  }
  return std::abs(sum - 1.0) <= tol;
}

ModelChoice select_best_model(std::span<const double> utilities) {
  if (utilities.empty()) throw std::invalid_argument("select_best_model: no models");
  ModelChoice c;
  c.kind = ModelChoice::Kind::one_hot;
  c.utilities.assign(utilities.begin(), utilities.end());
  std::size_t best = 0;
  for (std::size_t m = 1; m < utilities.size(); ++m)
    if (utilities[m] > utilities[best]) best = m;
  c.weights.assign(utilities.size(), 0.0);
  c.weights[best] = 1.0;
  return c;
}

ModelChoice ensemble_weights(std::span<const double> utilities, double temperature) {
  if (utilities.empty()) throw std::invalid_argument("ensemble_weights: no models");
  if (!(temperature > 0.0)) throw std::invalid_argument("ensemble_weights: temperature must be > 0");
  ModelChoice c;
  c.kind = ModelChoice::Kind::simplex;
  c.utilities.assign(utilities.begin(), utilities.end());
  const double top = *std::max_element(utilities.begin(), utilities.end());
  c.weights.resize(utilities.size());
  double sum = 0.0;
  for (std::size_t m = 0; m < utilities.size(); ++m) {
    c.weights[m] = std::exp((utilities[m] - top) / temperature);
    sum += c.weights[m];
  }
  for (auto& w : c.weights) w /= sum;
  return c;
}

std::vector<double> ensemble_predict(std::span<const std::vector<double>> per_model_probs,
                                     std::span<const double> alpha) {
  if (per_model_probs.empty() || per_model_probs.size() != alpha.size())
    throw std::invalid_argument("ensemble_predict: need one weight per model");
  std::vector<double> out(per_model_probs.front().size(), 0.0);
  for (std::size_t m = 0; m < per_model_probs.size(); ++m) {
    if (per_model_probs[m].size() != out.size())
      throw std::invalid_argument("ensemble_predict: class count mismatch");
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += alpha[m] * per_model_probs[m][k];
  }
  return out;
}

void PredictionClock::record_split(int round) {
  if (first_split_round_ < 0) first_split_round_ = round;
}

bool PredictionClock::trigger(PredictionTime scheme, int round, bool cluster_stopped) const {
  if (scheme == PredictionTime::stopping_based) return cluster_stopped;
  return first_split_round_ >= 0 && round >= first_split_round_;
}

InjectResult inject(data::WorkerDataset& worker, std::span<const data::PseudoLabel> labels) {
  for (const auto& p : labels)
    if (!worker.find_unlabeled(p.id))
      throw std::invalid_argument("inject: sample " + std::to_string(p.id) +
                                  " is not in the worker's unlabeled set");
  std::unordered_map<data::SampleId, std::size_t> index;
  for (std::size_t k = 0; k < worker.pseudo.size(); ++k) index[worker.pseudo[k].id] = k;
  InjectResult r;
  for (const auto& p : labels) {
    auto it = index.find(p.id);
    if (it != index.end()) {
      worker.pseudo[it->second] = p;
      ++r.replaced;
    } else {
      index.emplace(p.id, worker.pseudo.size());
      worker.pseudo.push_back(p);
      ++r.added;
    }
  }
  std::sort(worker.pseudo.begin(), worker.pseudo.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  return r;
}

}  // namespace cfsl::ssl
