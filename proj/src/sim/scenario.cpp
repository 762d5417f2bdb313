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

#include "cfsl/common.hpp"
#include "cfsl/sim.hpp"

namespace cfsl::sim {

namespace {

using ssl::PredictionModel;
using ssl::PredictionTime;
using sched::Policy;

Scenario integrated(const char* name, PredictionModel m, PredictionTime t, Policy p) {
  Scenario s;
  s.name = name;
  s.model = m;
  s.time = t;
  s.policy = p;
  return s;
}

const std::vector<Scenario>& table() {
  static const std::vector<Scenario> scenarios = [] {
    const auto BM = PredictionModel::best_specialized;
    const auto EM = PredictionModel::ensemble;
    const auto SP = PredictionTime::split_based;
    const auto ST = PredictionTime::stopping_based;
    const auto GS = Policy::greedy;
    const auto RR = Policy::round_robin;
    std::vector<Scenario> v{
        integrated("BMSPGS", BM, SP, GS), integrated("BMSPRR", BM, SP, RR),
        integrated("BMSTGS", BM, ST, GS), integrated("BMSTRR", BM, ST, RR),
        integrated("EMSPGS", EM, SP, GS), integrated("EMSPRR", EM, SP, RR),
        integrated("EMSTGS", EM, ST, GS), integrated("EMSTRR", EM, ST, RR),
    };
    Scenario cfl_greedy = integrated("labeled_CFL_greedy", BM, SP, GS);
    cfl_greedy.ssl = false;
    cfl_greedy.baseline = true;
    Scenario cfl_rr = integrated("labeled_CFL_rr", BM, SP, RR);
    cfl_rr.ssl = false;
    cfl_rr.baseline = true;
    Scenario cfsl_random = integrated("CFSL_random", BM, SP, Policy::random);
    cfsl_random.baseline = true;
    Scenario hfsl = integrated("HFSL", BM, SP, GS);
    hfsl.clustering = false;
    hfsl.baseline = true;
    v.push_back(cfl_greedy);
    v.push_back(cfl_rr);
    v.push_back(cfsl_random);
    v.push_back(hfsl);
    return v;
  }();
  return scenarios;
}

}  // namespace

Scenario scenario_by_name(const std::string& name) {
  for (const auto& s : table())
    if (s.name == name) return s;
  std::string known;
  for (const auto& s : table()) known += (known.empty() ? "" : ", ") + s.name;
  throw ConfigError("unknown scenario '" + name + "' (known: " + known + ")");
}

std::vector<std::string> scenario_names() {
  std::vector<std::string> out;
  for (const auto& s : table()) out.push_back(s.name);
  return out;
}

}  // namespace cfsl::sim
