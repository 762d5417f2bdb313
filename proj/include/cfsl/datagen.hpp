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

#ifndef CFSL_DATAGEN_HPP_
#define CFSL_DATAGEN_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cfsl::data {

using SampleId = std::int64_t;

struct Sample {
  SampleId id = 0;
  std::vector<double> features;
  int label = 0;
};

class LabelOracle;

// An unlabeled sample. The generating label is kept for evaluation only and
// can be read exclusively through LabelOracle.
class UnlabeledSample {
 public:
  UnlabeledSample(SampleId id, std::vector<double> features, int hidden_label)
      : id(id), features(std::move(features)), hidden_label_(hidden_label) {}

  SampleId id;
  std::vector<double> features;

 private:
  int hidden_label_;
  friend class LabelOracle;
};

// Evaluation-only access to hidden labels. Every read is counted so tests can
// assert that training and labeling paths never consult ground truth.
class LabelOracle {
 public:
  static int true_label(const UnlabeledSample& s);
  static std::uint64_t reads();
  static void reset_reads();
};

struct PseudoLabel {
  SampleId id = 0;
  int label = 0;
  double confidence = 0.0;
  int producer = -1;  // cluster id of the producing model; -1 for an ensemble
  int round = 0;
};

struct WorkerDataset {
  std::vector<Sample> labeled;
  std::vector<UnlabeledSample> unlabeled;
  std::vector<PseudoLabel> pseudo;

  std::size_t total_size() const { return labeled.size() + unlabeled.size(); }
  const UnlabeledSample* find_unlabeled(SampleId id) const;
};

struct DistributionSpec {
  int num_distributions = 2;
  int num_classes = 4;
  int dim = 16;
  int classes_per_worker = 2;
  double labeled_fraction = 0.10;
  // Worker dataset size D_i (labeled + unlabeled), excluding the test split.
  int samples_per_worker = 200;
  double test_fraction = 0.2;
  // Distance between the class-location anchors, in units of the noise scale.
  double separation = 3.0;
  double noise_std = 1.0;
  // Extra per-distribution offset of the class locations (0 = pure label conflict).
  double distribution_shift = 0.0;

  void validate() const;
};

struct GeneratedWorker {
  WorkerDataset data;
  std::vector<Sample> test;
  int distribution = 0;
};

// Classes owned by a distribution; slot t of every distribution shares one
// feature-space location, so distinct distributions disagree on labels there.
std::vector<int> class_set(const DistributionSpec& spec, int distribution);

std::vector<GeneratedWorker> generate(const DistributionSpec& spec, int workers,
                                      std::uint64_t seed);

std::pair<std::vector<Sample>, std::vector<Sample>> train_test_split(std::vector<Sample> dataset,
                                                                     double test_fraction,
                                                                     std::uint64_t seed);

// Reads "label,f1,...,fd" rows; lines starting with '#' are skipped.
std::vector<Sample> load_csv(const std::string& path);

}  // namespace cfsl::data

#endif  // CFSL_DATAGEN_HPP_
