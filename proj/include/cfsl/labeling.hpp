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

#ifndef CFSL_LABELING_HPP_
#define CFSL_LABELING_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cfsl/datagen.hpp"

namespace cfsl::ssl {

using ProbabilityFn = std::function<std::vector<double>(std::span<const double>)>;

struct TopClass {
  int label = 0;
  double confidence = 0.0;
};

// Highest-probability class; ties resolve to the lowest class index.
TopClass top_class(std::span<const double> probs);

// Confidence gate: max probability >= phi.
inline bool passes_threshold(std::span<const double> probs, double phi) {
  return top_class(probs).confidence >= phi;
}

std::vector<data::PseudoLabel> confident_labels(const ProbabilityFn& model,
                                                std::span<const data::UnlabeledSample> samples,
                                                double phi, int producer, int round);

struct UtilityParams {
  double kappa = 0.25;    // coverage weight
  double rho_lat = 0.1;   // labeling latency penalty
};

struct Utility {
  double value = 0.0;
  double validation_accuracy = 0.0;
  double coverage = 0.0;
  double normalized_latency = 0.0;
  bool validation_empty = false;
};

// value = acc(validation) + kappa * coverage(unlabeled, phi) - rho_lat * normalized_latency.
// An empty validation fold drops the accuracy term and sets validation_empty.
Utility model_utility(const ProbabilityFn& model, std::span<const data::Sample> validation,
                      std::span<const data::UnlabeledSample> unlabeled, double phi,
                      double normalized_latency, const UtilityParams& params);

struct ModelChoice {
  enum class Kind { one_hot, simplex };
  Kind kind = Kind::one_hot;
  std::vector<double> weights;    // z (one-hot) or alpha (simplex)
  std::vector<double> utilities;

  // Index holding the largest weight (lowest index on ties).
  std::size_t chosen() const;
  // One-hot: exactly one entry equal to one, the rest zero. Simplex: entries in [0, 1] summing to one.
  bool valid(double tol = 1e-9) const;
};

ModelChoice select_best_model(std::span<const double> utilities);
ModelChoice ensemble_weights(std::span<const double> utilities, double temperature);

// sum_m alpha_m * probs_m
std::vector<double> ensemble_predict(std::span<const std::vector<double>> per_model_probs,
                                     std::span<const double> alpha);

enum class PredictionModel { best_specialized, ensemble };
enum class PredictionTime { split_based, stopping_based };

// Latches the first split event for split-based timing.
class PredictionClock {
 public:
  void record_split(int round);
  bool split_happened() const { return first_split_round_ >= 0; }
  int first_split_round() const { return first_split_round_; }
  // split-based: true from the first split round on; stopping-based: true once the cluster stopped.
  bool trigger(PredictionTime scheme, int round, bool cluster_stopped) const;

 private:
  int first_split_round_ = -1;
};

struct InjectResult {
  std::size_t added = 0;
  std::size_t replaced = 0;
};

// Merges pseudo-labels into the worker's set; an id already present takes the new label.
// Throws std::invalid_argument for ids outside the unlabeled set (the dataset is left unchanged).
InjectResult inject(data::WorkerDataset& worker, std::span<const data::PseudoLabel> labels);

}  // namespace cfsl::ssl

#endif  // CFSL_LABELING_HPP_
