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
#include <map>
#include <random>

#include "cfsl/scheduling.hpp"
#include "doctest.h"

using namespace cfsl::sched;

namespace {

std::vector<Candidate> cands(std::vector<double> lat) {
  std::vector<Candidate> c;
  for (std::size_t i = 0; i < lat.size(); ++i) c.push_back({static_cast<int>(i + 1), lat[i]});
  return c;
}

std::vector<int> ids(const std::vector<Candidate>& c) {
  std::vector<int> out;
  for (const auto& x : c) out.push_back(x.worker);
  return out;
}

}  // namespace

TEST_CASE("policy names round-trip") {
  for (auto p : {Policy::greedy, Policy::round_robin, Policy::random})
    CHECK(parse_policy(to_string(p)) == p);
  CHECK_THROWS_AS(parse_policy("fastest"), std::invalid_argument);
}

TEST_CASE("greedy selects the argmin latency") {
  const auto c = cands({0.2, 0.5, 0.1});
  std::vector<int> members{1, 2, 3};
  SelectionState st;
  std::mt19937_64 rng(0);
  CHECK(select(members, c, Policy::greedy, 1, st, rng) == std::vector<int>{3});
  CHECK(select(members, c, Policy::greedy, 2, st, rng) == std::vector<int>{1, 3});
  CHECK(st.counts[3] == 2);
}

TEST_CASE("greedy equals a sort oracle with id tie-breaks") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + static_cast<int>(rng() % 10);
    std::vector<int> members;
    std::vector<Candidate> c;
    for (int i = 0; i < n; ++i) {
      members.push_back(i * 2);
      c.push_back({i * 2, static_cast<double>(rng() % 4)});
    }
    std::shuffle(c.begin(), c.end(), rng);
    const std::size_t k = 1 + rng() % n;
    auto sorted = c;
    std::sort(sorted.begin(), sorted.end(), [](const Candidate& a, const Candidate& b) {
      return a.latency != b.latency ? a.latency < b.latency : a.worker < b.worker;
    });
    std::vector<int> expect;
    for (std::size_t i = 0; i < k; ++i) expect.push_back(sorted[i].worker);
    std::sort(expect.begin(), expect.end());
    SelectionState st;
    CHECK(select(members, c, Policy::greedy, k, st, rng) == expect);
  }
}

TEST_CASE("round robin cycles fairly") {
  std::vector<int> members{4, 7, 9};
  const std::vector<Candidate> c{{4, 1.0}, {7, 1.0}, {9, 1.0}};
  SelectionState st;
  std::mt19937_64 rng(0);
  std::vector<int> order;
  for (int r = 0; r < 6; ++r) order.push_back(select(members, c, Policy::round_robin, 1, st, rng)[0]);
  CHECK(order == std::vector<int>{4, 7, 9, 4, 7, 9});
  for (int w : members) CHECK(st.counts[w] == 2);
  CHECK(st.valid(3));

  for (std::size_t size = 1; size <= 12; ++size) {
    std::vector<int> m;
    std::vector<Candidate> all;
    for (std::size_t i = 0; i < size; ++i) {
      m.push_back(static_cast<int>(10 + i));
      all.push_back({static_cast<int>(10 + i), 0.1});
    }
    SelectionState s;
    for (std::size_t r = 0; r < 3 * size + size / 2; ++r) {
      select(m, all, Policy::round_robin, 1, s, rng);
      int lo = 1 << 30, hi = 0;
      for (int w : m) {
        lo = std::min(lo, s.counts[w]);
        hi = std::max(hi, s.counts[w]);
      }
      CHECK(hi - lo <= 1);
    }
  }
}

TEST_CASE("round robin skips infeasible members") {
  std::vector<int> members{1, 2, 3, 4};
  const std::vector<Candidate> feasible{{1, 0.1}, {3, 0.1}};
  SelectionState st;
  std::mt19937_64 rng(0);
  CHECK(select(members, feasible, Policy::round_robin, 1, st, rng) == std::vector<int>{1});
  CHECK(select(members, feasible, Policy::round_robin, 1, st, rng) == std::vector<int>{3});
  CHECK(select(members, feasible, Policy::round_robin, 1, st, rng) == std::vector<int>{1});
  CHECK(select(members, feasible, Policy::round_robin, 2, st, rng) == std::vector<int>{1, 3});
}

TEST_CASE("random selection is seeded and without replacement") {
  std::vector<int> members{0, 1, 2, 3, 4, 5, 6, 7};
  std::vector<Candidate> c;
  for (int w : members) c.push_back({w, 0.1 * w});
  auto run = [&](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    SelectionState st;
    std::vector<std::vector<int>> seq;
    for (int r = 0; r < 20; ++r) seq.push_back(select(members, c, Policy::random, 3, st, rng));
    return seq;
  };
  const auto a = run(5);
  CHECK(a == run(5));
  CHECK(a != run(6));
  for (const auto& s : a) {
    CHECK(s.size() == 3);
    CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
    CHECK(std::is_sorted(s.begin(), s.end()));
  }
}

TEST_CASE("selection errors") {
  SelectionState st;
  std::mt19937_64 rng(0);
  const auto c = cands({0.1});
  CHECK_THROWS_AS(select({}, c, Policy::greedy, 1, st, rng), std::invalid_argument);
  std::vector<int> m{1};
  CHECK_THROWS_AS(select(m, c, Policy::greedy, 0, st, rng), std::invalid_argument);
}

TEST_CASE("feasibility filter") {
  const auto c = cands({0.2, 0.5, 0.1});
  const auto all = feasibility_filter(c, 1.0);
  CHECK(ids(all.kept) == std::vector<int>{1, 2, 3});
  CHECK_FALSE(all.fallback);
  const auto edge = feasibility_filter(c, 0.5);
  CHECK(ids(edge.kept) == std::vector<int>{1, 2, 3});
  CHECK(ids(feasibility_filter(c, 0.3).kept) == std::vector<int>{1, 3});
  const auto none = feasibility_filter(c, 0.05);
  CHECK(none.fallback);
  CHECK(ids(none.kept) == std::vector<int>{3});
  CHECK_THROWS(feasibility_filter({}, 1.0));
  CHECK_THROWS(feasibility_filter(c, 0.0));
}
