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

#include "cfsl/nn.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "cfsl/common.hpp"

namespace cfsl::nn {

namespace {

constexpr std::array<char, 8> kMagic = {'C', 'F', 'S', 'L', 'P', 'V', '0', '1'};

template <typename T>
void put_le(std::ostream& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!in) throw std::runtime_error("ParamVector::read: truncated input");
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Architecture / Layout

void Architecture::validate() const {
  if (input_dim < 1) throw std::invalid_argument("Architecture: input_dim must be >= 1");
  if (classes < 1) throw std::invalid_argument("Architecture: classes must be >= 1");
  if (hidden.empty()) throw std::invalid_argument("Architecture: at least one hidden layer");
  for (int h : hidden)
    if (h < 1) throw std::invalid_argument("Architecture: hidden sizes must be >= 1");
}

int Architecture::fan_in(std::size_t layer) const {
  return layer == 0 ? input_dim : hidden.at(layer - 1);
}

int Architecture::fan_out(std::size_t layer) const {
  return layer == hidden.size() ? classes : hidden.at(layer);
}

Layout::Layout(std::vector<Segment> segments) : segments_(std::move(segments)) {
  size_ = 0;
  for (auto& s : segments_) {
    s.offset = size_;
    size_ += s.size();
  }
}

Layout Layout::for_architecture(const Architecture& arch) {
  arch.validate();
  std::vector<Segment> segs;
  for (std::size_t l = 0; l < arch.layer_count(); ++l) {
    const auto out = static_cast<std::uint32_t>(arch.fan_out(l));
    const auto in = static_cast<std::uint32_t>(arch.fan_in(l));
    segs.push_back(Segment{static_cast<std::uint32_t>(l), false, out, in, 0});
    segs.push_back(Segment{static_cast<std::uint32_t>(l), true, out, 1, 0});
  }
  return Layout(std::move(segs));
}

// ---------------------------------------------------------------------------
// ParamVector

ParamVector::ParamVector(std::shared_ptr<const Layout> layout)
    : layout_(std::move(layout)), values_(layout_ ? layout_->size() : 0, 0.0) {}

ParamVector::ParamVector(std::shared_ptr<const Layout> layout, std::vector<double> values)
    : layout_(std::move(layout)), values_(std::move(values)) {
  if (!layout_ || layout_->size() != values_.size())
    throw std::invalid_argument("ParamVector: values do not match layout size");
}

ParamVector ParamVector::zeros_like(const ParamVector& other) { return ParamVector(other.layout_); }

bool ParamVector::same_layout(const ParamVector& other) const {
  if (layout_ == other.layout_) return true;
  if (!layout_ || !other.layout_) return false;
  return *layout_ == *other.layout_;
}

bool ParamVector::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void ParamVector::check_layout(const ParamVector& other) const {
  if (!same_layout(other)) throw std::invalid_argument("ParamVector: layout mismatch");
}

ParamVector& ParamVector::operator+=(const ParamVector& other) {
  check_layout(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ParamVector& ParamVector::operator-=(const ParamVector& other) {
  check_layout(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ParamVector& ParamVector::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

ParamVector& ParamVector::axpy(double s, const ParamVector& other) {
  check_layout(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * other.values_[i];
  return *this;
}

bool operator==(const ParamVector& a, const ParamVector& b) {
  return a.same_layout(b) && a.values_ == b.values_;
}

double ParamVector::dot(const ParamVector& other) const {
  check_layout(other);
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * other.values_[i];
  return s;
}

double ParamVector::squared_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

double ParamVector::norm() const { return std::sqrt(squared_norm()); }

void ParamVector::write(std::ostream& out) const {
  out.write(kMagic.data(), kMagic.size());
  const auto& segs = layout_->segments();
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(segs.size()));
  for (const auto& s : segs) {
    put_le<std::uint32_t>(out, s.layer);
    put_le<std::uint8_t>(out, s.bias ? 1 : 0);
    put_le<std::uint32_t>(out, s.rows);
    put_le<std::uint32_t>(out, s.cols);
  }
  put_le<std::uint64_t>(out, values_.size());
  for (double v : values_) put_le<double>(out, v);
}

ParamVector ParamVector::read(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("ParamVector::read: bad magic");
  const auto nseg = get_le<std::uint32_t>(in);
  std::vector<Segment> segs(nseg);
  for (auto& s : segs) {
    s.layer = get_le<std::uint32_t>(in);
    s.bias = get_le<std::uint8_t>(in) != 0;
    s.rows = get_le<std::uint32_t>(in);
    s.cols = get_le<std::uint32_t>(in);
  }
  auto layout = std::make_shared<const Layout>(std::move(segs));
  const auto n = get_le<std::uint64_t>(in);
  if (n != layout->size()) throw std::runtime_error("ParamVector::read: size/layout mismatch");
  std::vector<double> values(n);
  for (auto& v : values) v = get_le<double>(in);
  return ParamVector(std::move(layout), std::move(values));
}

// ---------------------------------------------------------------------------
// Mlp

Mlp::Mlp(Architecture arch)
    : arch_(std::move(arch)),
      layout_(std::make_shared<const Layout>(Layout::for_architecture(arch_))) {}

ParamVector Mlp::init(std::uint64_t seed) const {
  ParamVector p(layout_);
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l < arch_.layer_count(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(arch_.fan_in(l)));
    std::uniform_real_distribution<double> u(-bound, bound);
    const auto& w = layout_->weights(l);
    for (std::size_t i = 0; i < w.size(); ++i) p[w.offset + i] = u(rng);
  }
  return p;
}

void Mlp::check(const ParamVector& params) const {
  if (params.size() != layout_->size() || !(params.layout() == *layout_))
    throw std::invalid_argument("Mlp: parameter layout does not match architecture");
}

std::vector<double> Mlp::forward(const ParamVector& params, std::span<const double> x) const {
  check(params);
  if (x.size() != static_cast<std::size_t>(arch_.input_dim))
    throw std::invalid_argument("Mlp::forward: feature dimension mismatch");
  const auto v = params.values();
  std::vector<double> cur(x.begin(), x.end()), next;
  const std::size_t last = arch_.layer_count() - 1;
  for (std::size_t l = 0; l <= last; ++l) {
    const auto& w = layout_->weights(l);
    const auto& b = layout_->bias(l);
    next.assign(w.rows, 0.0);
    for (std::size_t o = 0; o < w.rows; ++o) {
      const double* row = &v[w.offset + o * w.cols];
      double z = v[b.offset + o];
      for (std::size_t i = 0; i < w.cols; ++i) z += row[i] * cur[i];
      next[o] = (l < last && z < 0.0) ? 0.0 : z;
    }
    cur.swap(next);
  }
  const double mx = *std::max_element(cur.begin(), cur.end());
  double sum = 0.0;
  for (auto& z : cur) {
    z = std::exp(z - mx);
    sum += z;
  }
  for (auto& z : cur) z /= sum;
  return cur;
}

double Mlp::accumulate(const ParamVector& params, std::span<const Example> batch,
                       ParamVector* grad) const {
  check(params);
  if (batch.empty()) throw std::invalid_argument("Mlp: empty batch");
  const auto v = params.values();
  const std::size_t layers = arch_.layer_count();
  const std::size_t last = layers - 1;
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  // acts[l] is the input to layer l; acts[layers] holds the logits.
  std::vector<std::vector<double>> acts(layers + 1);
  std::vector<double> delta, prev_delta;
  double total = 0.0;

  for (const auto& ex : batch) {
    if (ex.features.size() != static_cast<std::size_t>(arch_.input_dim))
      throw std::invalid_argument("Mlp: feature dimension mismatch");
    if (ex.label < 0 || ex.label >= arch_.classes)
      throw std::invalid_argument("Mlp: label out of range");
    acts[0].assign(ex.features.begin(), ex.features.end());
    for (std::size_t l = 0; l < layers; ++l) {
      const auto& w = layout_->weights(l);
      const auto& b = layout_->bias(l);
      auto& out = acts[l + 1];
      out.assign(w.rows, 0.0);
      const auto& in = acts[l];
      for (std::size_t o = 0; o < w.rows; ++o) {
        const double* row = &v[w.offset + o * w.cols];
        double z = v[b.offset + o];
        for (std::size_t i = 0; i < w.cols; ++i) z += row[i] * in[i];
        out[o] = (l < last && z < 0.0) ? 0.0 : z;
      }
    }
    auto& logits = acts[layers];
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - mx);
    const double lse = mx + std::log(sum);
    total += ex.weight * (lse - logits[ex.label]);

    if (!grad) continue;
    // d loss / d logits = weight * (softmax - onehot) / n
    delta.resize(logits.size());
    for (std::size_t c = 0; c < logits.size(); ++c)
      delta[c] = std::exp(logits[c] - lse) * ex.weight * inv_n;
    delta[ex.label] -= ex.weight * inv_n;

    auto g = grad->values();
    for (std::size_t l = layers; l-- > 0;) {
      const auto& w = layout_->weights(l);
      const auto& b = layout_->bias(l);
      const auto& in = acts[l];
      for (std::size_t o = 0; o < w.rows; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        double* grow = &g[w.offset + o * w.cols];
        for (std::size_t i = 0; i < w.cols; ++i) grow[i] += d * in[i];
        g[b.offset + o] += d;
      }
      if (l == 0) break;
      prev_delta.assign(w.cols, 0.0);
      for (std::size_t o = 0; o < w.rows; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        const double* row = &v[w.offset + o * w.cols];
        for (std::size_t i = 0; i < w.cols; ++i) prev_delta[i] += row[i] * d;
      }
      // ReLU mask: acts[l] is the post-activation output of layer l-1.
      for (std::size_t i = 0; i < w.cols; ++i)
        if (in[i] <= 0.0) prev_delta[i] = 0.0;
      delta.swap(prev_delta);
    }
  }
  return total * inv_n;
}

double Mlp::loss(const ParamVector& params, std::span<const Example> batch) const {
  return accumulate(params, batch, nullptr);
}

ParamVector Mlp::gradient(const ParamVector& params, std::span<const Example> batch) const {
  ParamVector g(layout_);
  accumulate(params, batch, &g);
  return g;
}

double Mlp::gradient_into(const ParamVector& params, std::span<const Example> batch,
                          ParamVector& grad) const {
  check(grad);
  std::fill(grad.values().begin(), grad.values().end(), 0.0);
  return accumulate(params, batch, &grad);
}

double Mlp::combined_loss(const ParamVector& params, std::span<const Example> labeled,
                          std::span<const Example> pseudo) const {
  double f = labeled.empty() ? 0.0 : loss(params, labeled);
  if (!pseudo.empty()) f += loss(params, pseudo);
  return f;
}

std::size_t update_count(std::size_t effective_size, std::size_t batch, std::size_t epochs) {
  if (batch == 0) throw std::invalid_argument("update_count: batch must be >= 1");
  return epochs * ((effective_size + batch - 1) / batch);
}

TrainResult local_train(const Mlp& model, const ParamVector& start, std::span<const Example> data,
                        const TrainOptions& opts) {
  TrainResult result;
  result.delta = ParamVector::zeros_like(start);
  if (data.empty()) {
    result.status = TrainStatus::skipped_no_data;
    return result;
  }
  if (opts.batch < 1 || opts.epochs < 0) throw std::invalid_argument("local_train: bad options");

  ParamVector theta = start;
  ParamVector grad(model.layout());
  std::vector<std::size_t> order(data.size());
  std::vector<Example> batch;
  batch.reserve(opts.batch);
  const auto b = static_cast<std::size_t>(opts.batch);

  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(derive_seed(opts.shuffle_seed, tag("epoch"), static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t begin = 0; begin < order.size(); begin += b) {
      const std::size_t end = std::min(order.size(), begin + b);
      batch.clear();
      for (std::size_t k = begin; k < end; ++k) batch.push_back(data[order[k]]);
      model.gradient_into(theta, batch, grad);
      theta.axpy(-opts.lr, grad);
      ++result.steps;
    }
  }
  result.delta = theta - start;
  return result;
}

}  // namespace cfsl::nn
