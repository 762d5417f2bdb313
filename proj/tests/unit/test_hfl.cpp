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


#include <algorithm>
#include <memory>
#include <random>

#include "cfsl/hfl.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cfsl;
using namespace cfsl::hfl;

namespace {

std::shared_ptr<const nn::Layout> flat_layout(std::uint32_t n) {
  return std::make_shared<const nn::Layout>(
      std::vector<nn::Segment>{nn::Segment{0, false, n, 1, 0}});
}

nn::ParamVector vec(std::vector<double> v) {
  auto layout = flat_layout(static_cast<std::uint32_t>(v.size()));
  return nn::ParamVector(std::move(layout), std::move(v));
}

}  // namespace

TEST_CASE("edge aggregation examples") {
  const auto u = vec({1.5, -2.0});
  std::vector<Weighted> same{{&u, 1.0}, {&u, 7.0}, {&u, 0.5}};
  const auto m = edge_aggregate(same);
  CHECK(m[0] == doctest::Approx(1.5));
  CHECK(m[1] == doctest::Approx(-2.0));

  const auto a = vec({1.0}), b = vec({3.0});
  std::vector<Weighted> eq{{&a, 2.0}, {&b, 2.0}};
  CHECK(edge_aggregate(eq)[0] == 2.0);

  const auto z = vec({0.0}), f = vec({4.0});
  std::vector<Weighted> w{{&z, 1.0}, {&f, 3.0}};
  CHECK(edge_aggregate(w)[0] == 3.0);

  CHECK_THROWS_AS(edge_aggregate({}), std::invalid_argument);
  std::vector<Weighted> zero{{&a, 0.0}};
  CHECK_THROWS_AS(edge_aggregate(zero), std::invalid_argument);
}

TEST_CASE("cloud aggregation matches a straight-line weighted mean") {
  const auto one = vec({0.25, 9.0});
  std::vector<Weighted> single{{&one, 42.0}};
  CHECK(cloud_aggregate(single) == one);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-3.0, 3.0), W(0.5, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<nn::ParamVector> models;
    std::vector<double> weights;
    for (int k = 0; k < 3; ++k) {
      std::vector<double> v(6);
      for (auto& x : v) x = U(rng);
      models.push_back(vec(v));
      weights.push_back(W(rng));
    }
    std::vector<Weighted> in;
    for (int k = 0; k < 3; ++k) in.push_back({&models[k], weights[k]});
    const auto got = cloud_aggregate(in);
    for (std::size_t i = 0; i < 6; ++i) {
      double num = 0.0, den = 0.0;
      for (int k = 0; k < 3; ++k) {
        num += weights[k] * models[k][i];
        den += weights[k];
      }
      CHECK(oracle::rel_close(got[i], num / den, 1e-12));
    }
  }
}

TEST_CASE("aggregation is permutation invariant and linear") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<nn::ParamVector> ups;
  std::vector<double> ws;
  for (int k = 0; k < 5; ++k) {
    std::vector<double> v(4);
    for (auto& x : v) x = U(rng);
    ups.push_back(vec(v));
    ws.push_back(1.0 + k);
  }
  std::vector<Weighted> in, rev;
  for (int k = 0; k < 5; ++k) in.push_back({&ups[k], ws[k]});
  rev.assign(in.rbegin(), in.rend());
  const auto a = edge_aggregate(in);
  const auto b = edge_aggregate(rev);
  for (std::size_t i = 0; i < 4; ++i) CHECK(oracle::rel_close(a[i], b[i], 1e-12));

  std::vector<nn::ParamVector> scaled;
  for (auto& u : ups) scaled.push_back(2.5 * u);
  std::vector<Weighted> sin;
  for (int k = 0; k < 5; ++k) sin.push_back({&scaled[k], ws[k]});
  const auto c = edge_aggregate(sin);
  for (std::size_t i = 0; i < 4; ++i) CHECK(oracle::rel_close(c[i], 2.5 * a[i], 1e-12));
}

TEST_CASE("broadcast copies are independent") {
  const auto m = vec({1.0, 2.0});
  auto r = broadcast(m, 3);
  CHECK(r.warnings == 0);
  REQUIRE(r.copies.size() == 3);
  for (const auto& c : r.copies) CHECK(c == m);
  r.copies[0][0] += 1e-3;
  CHECK(m[0] == 1.0);
  const auto empty = broadcast(m, 0);
  CHECK(empty.copies.empty());
  CHECK(empty.warnings == 1);
}

TEST_CASE("topology association stays valid across reassignment") {
  auto t = Topology::round_robin(7, 3);
  CHECK(t.association_valid());
  CHECK(t.members(0) == std::vector<int>{0, 3, 6});
  t.reassign(3, 2);
  CHECK(t.association_valid());
  CHECK(t.edge_of(3) == 2);
  CHECK(t.members(2) == std::vector<int>{2, 3, 5});
  const auto a = t.association();
  for (int i = 0; i < 7; ++i) {
    int s = 0;
    for (int j = 0; j < 3; ++j) s += a[j][i];
    CHECK(s == 1);
  }
  CHECK_THROWS(t.reassign(0, 3));
  CHECK_THROWS(Topology(2, {0, 2}));
  CHECK_THROWS(Topology::round_robin(0, 1));
}
