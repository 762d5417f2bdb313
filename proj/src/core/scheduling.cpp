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


#include "cfsl/scheduling.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cfsl::sched {

const char* to_string(Policy p) {
  switch (p) {
    case Policy::greedy: return "greedy";
    case Policy::round_robin: return "round_robin";
    case Policy::random: return "random";
  }
  return "?";
}

Policy parse_policy(std::string_view name) {
  if (name == "greedy") return Policy::greedy;
  if (name == "round_robin") return Policy::round_robin;
  if (name == "random") return Policy::random;
  throw std::invalid_argument("unknown selection policy: " + std::string(name));
}

Feasible feasibility_filter(std::span<const Candidate> candidates, double deadline) {
  if (candidates.empty()) throw std::invalid_argument("feasibility_filter: no candidates");
  if (!(deadline > 0.0)) throw std::invalid_argument("feasibility_filter: deadline must be > 0");
  Feasible f;
  for (const auto& c : candidates)
    if (c.latency <= deadline) f.kept.push_back(c);
  if (f.kept.empty()) {
    f.fallback = true;
    f.kept.push_back(*std::min_element(candidates.begin(), candidates.end(),
                                       [](const Candidate& a, const Candidate& b) {
                                         return a.latency != b.latency ? a.latency < b.latency
                                                                       : a.worker < b.worker;
                                       }));
  }
  return f;
}

bool SelectionState::valid(std::size_t cluster_size) const {
  if (cluster_size == 0 || cursor >= cluster_size) return false;
  return std::all_of(counts.begin(), counts.end(), [](const auto& kv) { return kv.second >= 0; });
}

std::vector<int> select(std::span<const int> members, std::span<const Candidate> feasible,
                        Policy policy, std::size_t n_sel, SelectionState& state,
                        std::mt19937_64& rng) {
  if (members.empty()) throw std::invalid_argument("select: empty cluster");
  if (n_sel < 1) throw std::invalid_argument("select: n_sel must be >= 1");
  if (state.cursor >= members.size()) state.cursor %= members.size();

  std::vector<Candidate> pool(feasible.begin(), feasible.end());
  std::sort(pool.begin(), pool.end(),
            [](const Candidate& a, const Candidate& b) { return a.worker < b.worker; });
  const std::size_t take = std::min(n_sel, pool.size());
  std::vector<int> chosen;

  switch (policy) {
    case Policy::greedy: {
      std::stable_sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
        return a.latency < b.latency;
      });
      for (std::size_t k = 0; k < take; ++k) chosen.push_back(pool[k].worker);
      break;
    }
    case Policy::round_robin: {
      auto is_feasible = [&](int w) {
        return std::binary_search(pool.begin(), pool.end(), Candidate{w, 0.0},
                                  [](const Candidate& a, const Candidate& b) {
                                    return a.worker < b.worker;
                                  });
      };
      std::size_t pos = state.cursor;
      for (std::size_t step = 0; step < members.size() && chosen.size() < take; ++step) {
        const std::size_t idx = (state.cursor + step) % members.size();
        if (is_feasible(members[idx])) {
          chosen.push_back(members[idx]);
          pos = (idx + 1) % members.size();
        }
      }
      state.cursor = pos;
      break;
    }
    case Policy::random: {
      for (std::size_t k = 0; k < take; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
        std::swap(pool[k], pool[pick(rng)]);
        chosen.push_back(pool[k].worker);
      }
      break;
    }
  }
  std::sort(chosen.begin(), chosen.end());
  for (int w : chosen) ++state.counts[w];
  return chosen;
}

}  // namespace cfsl::sched
