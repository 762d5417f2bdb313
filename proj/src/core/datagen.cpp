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

#include "cfsl/datagen.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "cfsl/common.hpp"

namespace cfsl::data {

namespace {

std::atomic<std::uint64_t> g_oracle_reads{0};

std::vector<double> random_direction(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dim);
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (auto& x : v) {
      x = normal(rng);
      n2 += x * x;
    }
  } while (n2 < 1e-12);
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& x : v) x *= inv;
  return v;
}

}  // namespace

int LabelOracle::true_label(const UnlabeledSample& s) {
  g_oracle_reads.fetch_add(1, std::memory_order_relaxed);
  return s.hidden_label_;
}

std::uint64_t LabelOracle::reads() { return g_oracle_reads.load(std::memory_order_relaxed); }

void LabelOracle::reset_reads() { g_oracle_reads.store(0, std::memory_order_relaxed); }

const UnlabeledSample* WorkerDataset::find_unlabeled(SampleId id) const {
  auto it = std::lower_bound(unlabeled.begin(), unlabeled.end(), id,
                             [](const UnlabeledSample& s, SampleId v) { return s.id < v; });
  if (it != unlabeled.end() && it->id == id) return &*it;
  // unlabeled is kept sorted by id, but fall back to a scan for hand-built datasets
  for (const auto& s : unlabeled)
    if (s.id == id) return &s;
  return nullptr;
}

void DistributionSpec::validate() const {
  if (num_distributions < 1) throw ConfigError("data.num_distributions must be >= 1");
  if (num_classes < 2) throw ConfigError("data.num_classes must be >= 2");
  if (dim < 1) throw ConfigError("data.dim must be >= 1");
  if (classes_per_worker < 1 || classes_per_worker > num_classes)
    throw ConfigError("data.classes_per_worker must be in [1, num_classes]");
  if (!(labeled_fraction > 0.0 && labeled_fraction < 1.0))
    throw ConfigError("labeled_fraction must be in (0, 1)");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ConfigError("data.test_fraction must be in (0, 1)");
  if (samples_per_worker < 2) throw ConfigError("data.samples_per_worker must be >= 2");
  if (!(noise_std > 0.0) || !std::isfinite(separation) || !std::isfinite(distribution_shift))
    throw ConfigError("data.noise_std must be > 0 and separation/shift finite");
}

std::vector<int> class_set(const DistributionSpec& spec, int distribution) {
  std::vector<int> classes;
  classes.reserve(spec.classes_per_worker);
  for (int t = 0; t < spec.classes_per_worker; ++t)
    classes.push_back((distribution * spec.classes_per_worker + t) % spec.num_classes);
  return classes;
}

std::pair<std::vector<Sample>, std::vector<Sample>> train_test_split(std::vector<Sample> dataset,
                                                                     double test_fraction,
                                                                     std::uint64_t seed) {
  if (dataset.empty()) throw std::invalid_argument("train_test_split: empty dataset");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("train_test_split: test_fraction must be in (0, 1)");
  const std::size_t n = dataset.size();
  auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
  if (n >= 2) n_test = std::clamp<std::size_t>(n_test, 1, n - 1);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<Sample> train, test;
  train.reserve(n - n_test);
  test.reserve(n_test);
  for (std::size_t k = 0; k < n; ++k) {
    auto& s = dataset[order[k]];
    (k < n_test ? test : train).push_back(std::move(s));
  }
  auto by_id = [](const Sample& a, const Sample& b) { return a.id < b.id; };
  std::sort(train.begin(), train.end(), by_id);
  std::sort(test.begin(), test.end(), by_id);
  return {std::move(train), std::move(test)};
}

std::vector<GeneratedWorker> generate(const DistributionSpec& spec, int workers,
                                      std::uint64_t seed) {
  spec.validate();
  if (workers < spec.num_distributions)
    throw ConfigError("generate: workers must be >= num_distributions");

  // Shared class-location anchors plus optional per-distribution offsets.
  std::mt19937_64 layout_rng(derive_seed(seed, tag("data.layout")));
  std::vector<std::vector<double>> anchors;
  for (int t = 0; t < spec.classes_per_worker; ++t) {
    auto dir = random_direction(layout_rng, spec.dim);
    for (auto& x : dir) x *= spec.separation / std::sqrt(2.0);
    anchors.push_back(std::move(dir));
  }
  std::vector<std::vector<double>> offsets;
  for (int k = 0; k < spec.num_distributions; ++k) {
    auto dir = random_direction(layout_rng, spec.dim);
    for (auto& x : dir) x *= spec.distribution_shift;
    offsets.push_back(std::move(dir));
  }

  // Balanced distribution assignment, shuffled by seed.
  std::vector<int> dist_of(workers);
  for (int w = 0; w < workers; ++w) dist_of[w] = w % spec.num_distributions;
  std::mt19937_64 assign_rng(derive_seed(seed, tag("data.assign")));
  std::shuffle(dist_of.begin(), dist_of.end(), assign_rng);

  const int train_n = spec.samples_per_worker;
  const int total_n =
      static_cast<int>(std::llround(static_cast<double>(train_n) / (1.0 - spec.test_fraction)));
  const int labeled_n = std::max(
      1, static_cast<int>(std::llround(static_cast<double>(train_n) * spec.labeled_fraction)));

  std::vector<GeneratedWorker> out;
  out.reserve(workers);
  SampleId next_id = 0;
  for (int w = 0; w < workers; ++w) {
    const int k = dist_of[w];
    const auto classes = class_set(spec, k);
    std::mt19937_64 rng(derive_seed(seed, tag("data.worker"), static_cast<std::uint64_t>(w)));
    std::normal_distribution<double> noise(0.0, spec.noise_std);

    std::vector<Sample> all;
    all.reserve(total_n);
    for (int s = 0; s < total_n; ++s) {
      const int slot = s % spec.classes_per_worker;
      Sample sample;
      sample.id = next_id++;
      sample.label = classes[slot];
      sample.features.resize(spec.dim);
      for (int d = 0; d < spec.dim; ++d)
        sample.features[d] = anchors[slot][d] + offsets[k][d] + noise(rng);
      all.push_back(std::move(sample));
    }

    auto [train, test] = train_test_split(
        std::move(all), spec.test_fraction,
        derive_seed(seed, tag("data.test_split"), static_cast<std::uint64_t>(w)));

    // Stratified labeled pick: shuffle, then take classes in turn.
    std::vector<std::vector<std::size_t>> by_class(spec.classes_per_worker);
    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (auto i : order) {
      const auto slot = std::find(classes.begin(), classes.end(), train[i].label) - classes.begin();
      by_class[slot].push_back(i);
    }
    std::vector<char> is_labeled(train.size(), 0);
    int picked = 0;
    for (std::size_t round = 0; picked < labeled_n; ++round) {
      bool any = false;
      for (auto& bucket : by_class) {
        if (round < bucket.size() && picked < labeled_n) {
          is_labeled[bucket[round]] = 1;
          ++picked;
          any = true;
        }
      }
      if (!any) break;
    }

    GeneratedWorker gw;
    gw.distribution = k;
    gw.test = std::move(test);
    for (std::size_t i = 0; i < train.size(); ++i) {
      if (is_labeled[i]) {
        gw.data.labeled.push_back(std::move(train[i]));
      } else {
        gw.data.unlabeled.emplace_back(train[i].id, std::move(train[i].features), train[i].label);
      }
    }
    out.push_back(std::move(gw));
  }
  return out;
}

std::vector<Sample> load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset file: " + path);
  std::vector<Sample> out;
  std::string line;
  std::size_t dim = 0;
  SampleId id = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    Sample s;
    s.id = id++;
    bool first = true;
    while (std::getline(ss, cell, ',')) {
      if (first) {
        s.label = std::stoi(cell);
        first = false;
      } else {
        s.features.push_back(std::stod(cell));
      }
    }
    if (dim == 0) dim = s.features.size();
    if (s.features.size() != dim || dim == 0 || s.label < 0)
      throw ConfigError("malformed dataset row " + std::to_string(s.id) + " in " + path);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace cfsl::data
