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


#ifndef CFSL_SCHEDULING_HPP_
#define CFSL_SCHEDULING_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace cfsl::sched {

enum class Policy { greedy, round_robin, random };
const char* to_string(Policy p);
// Throws std::invalid_argument for unknown names.
Policy parse_policy(std::string_view name);

struct Candidate {
  int worker = 0;
  double latency = 0.0;  // T_cmp_new + T_com
};

struct Feasible {
  std::vector<Candidate> kept;  // in input order
  bool fallback = false;        // nobody met the deadline; the fastest worker was kept
};

// Keeps candidates with latency <= deadline. Throws std::invalid_argument on an
// empty candidate list or a non-positive deadline.
Feasible feasibility_filter(std::span<const Candidate> candidates, double deadline);

// Per-cluster scheduling state.
struct SelectionState {
  std::size_t cursor = 0;          // index into the ascending member list
  std::map<int, int> counts;       // worker -> times selected
  bool valid(std::size_t cluster_size) const;
};

// members: the cluster's workers in ascending id order. feasible: the subset that
// passed the deadline filter. Returns ascending worker ids.
// greedy: the n_sel smallest latencies (ties by id). round_robin: the next n_sel
// feasible members in cyclic id order starting at the cursor. random: a uniform
// sample without replacement drawn from rng.
// Throws std::invalid_argument for an empty cluster or n_sel < 1.
std::vector<int> select(std::span<const int> members, std::span<const Candidate> feasible,
                        Policy policy, std::size_t n_sel, SelectionState& state,
                        std::mt19937_64& rng);

}  // namespace cfsl::sched

#endif  // CFSL_SCHEDULING_HPP_
