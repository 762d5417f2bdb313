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

#ifndef CFSL_NN_HPP_
#define CFSL_NN_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace cfsl::nn {

struct Architecture {
  int input_dim = 16;
  std::vector<int> hidden{32, 32};
  int classes = 4;

  void validate() const;
  std::size_t layer_count() const { return hidden.size() + 1; }
  int fan_in(std::size_t layer) const;
  int fan_out(std::size_t layer) const;
  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct Segment {
  std::uint32_t layer = 0;
  bool bias = false;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::size_t offset = 0;
  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

// Maps flat parameter offsets to per-layer weight matrices (row-major, out x in) and biases.
class Layout {
 public:
  Layout() = default;
  explicit Layout(std::vector<Segment> segments);
  static Layout for_architecture(const Architecture& arch);

  const std::vector<Segment>& segments() const { return segments_; }
  std::size_t size() const { return size_; }
  const Segment& weights(std::size_t layer) const { return segments_.at(2 * layer); }
  const Segment& bias(std::size_t layer) const { return segments_.at(2 * layer + 1); }
  friend bool operator==(const Layout& a, const Layout& b) { return a.segments_ == b.segments_; }

 private:
  std::vector<Segment> segments_;
  std::size_t size_ = 0;
};

// Flat parameter / update / gradient vector with value semantics.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::shared_ptr<const Layout> layout);
  ParamVector(std::shared_ptr<const Layout> layout, std::vector<double> values);

  static ParamVector zeros_like(const ParamVector& other);

  std::size_t size() const { return values_.size(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  const Layout& layout() const { return *layout_; }
  const std::shared_ptr<const Layout>& layout_ptr() const { return layout_; }
  bool same_layout(const ParamVector& other) const;
  bool all_finite() const;

  ParamVector& operator+=(const ParamVector& other);
  ParamVector& operator-=(const ParamVector& other);
  ParamVector& operator*=(double s);
  // this += s * other
  ParamVector& axpy(double s, const ParamVector& other);
  friend ParamVector operator+(ParamVector a, const ParamVector& b) { return a += b; }
  friend ParamVector operator-(ParamVector a, const ParamVector& b) { return a -= b; }
  friend ParamVector operator*(ParamVector a, double s) { return a *= s; }
  friend ParamVector operator*(double s, ParamVector a) { return a *= s; }
  friend bool operator==(const ParamVector& a, const ParamVector& b);

  double dot(const ParamVector& other) const;
  double squared_norm() const;
  double norm() const;

  // Little-endian binary: "CFSLPV01", u32 segment count, per segment
  // (u32 layer, u8 bias, u32 rows, u32 cols), u64 value count, f64 values.
  void write(std::ostream& out) const;
  static ParamVector read(std::istream& in);

 private:
  void check_layout(const ParamVector& other) const;

  std::shared_ptr<const Layout> layout_;
  std::vector<double> values_;
};

struct Example {
  std::span<const double> features;
  int label = 0;
  double weight = 1.0;
};

class Mlp {
 public:
  explicit Mlp(Architecture arch);

  const Architecture& architecture() const { return arch_; }
  const std::shared_ptr<const Layout>& layout() const { return layout_; }
  std::size_t parameter_count() const { return layout_->size(); }

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
  ParamVector init(std::uint64_t seed) const;
  ParamVector zeros() const { return ParamVector(layout_); }

  std::vector<double> forward(const ParamVector& params, std::span<const double> features) const;
  // Mean over the batch of weight * cross-entropy.
  double loss(const ParamVector& params, std::span<const Example> batch) const;
  // Gradient of loss() with respect to params.
  ParamVector gradient(const ParamVector& params, std::span<const Example> batch) const;
  // Overwrites grad with the gradient and returns the loss.
  double gradient_into(const ParamVector& params, std::span<const Example> batch,
                       ParamVector& grad) const;
  // Labeled mean loss plus pseudo-labeled mean loss; an empty pseudo set contributes zero.
  double combined_loss(const ParamVector& params, std::span<const Example> labeled,
                       std::span<const Example> pseudo) const;

 private:
  void check(const ParamVector& params) const;
  double accumulate(const ParamVector& params, std::span<const Example> batch,
                    ParamVector* grad) const;

  Architecture arch_;
  std::shared_ptr<const Layout> layout_;
};

// Mini-batch SGD updates per round: epochs * ceil(effective_size / batch).
std::size_t update_count(std::size_t effective_size, std::size_t batch, std::size_t epochs);

struct TrainOptions {
  int epochs = 10;
  int batch = 32;
  double lr = 0.01;
  std::uint64_t shuffle_seed = 0;  // per (worker, round, seed); each epoch derives its own order
};

enum class TrainStatus { trained, skipped_no_data };

struct TrainResult {
  ParamVector delta;  // theta_after - theta_before
  std::size_t steps = 0;
  TrainStatus status = TrainStatus::trained;
};

TrainResult local_train(const Mlp& model, const ParamVector& start, std::span<const Example> data,
                        const TrainOptions& opts);

}  // namespace cfsl::nn

#endif  // CFSL_NN_HPP_
