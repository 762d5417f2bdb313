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


#include <cmath>
#include <fstream>
#include <sstream>

#include "cfsl/common.hpp"
#include "cfsl/sim.hpp"
#include "json.hpp"

namespace cfsl::sim {

using nlohmann::json;

namespace {

json to_tree(const SimConfig& c) {
  json j;
  j["profile"] = c.profile;
  j["scenario"] = c.scenario;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["topology"] = {{"workers", c.workers}, {"edges", c.edges}};
  j["training"] = {{"rounds", c.rounds}, {"epochs", c.epochs}, {"batch", c.batch},
                   {"lr", c.lr},         {"hidden", c.hidden}};
  j["radio"] = {{"bandwidth_hz", c.bandwidth_hz},     {"noise_w", c.noise_w},
                {"g0_db", c.g0_db},                   {"d0_m", c.d0_m},
                {"path_loss_exp", c.path_loss_exp},   {"distance_min_m", c.distance_min_m},
                {"distance_max_m", c.distance_max_m}, {"edge_rate_bps", c.edge_rate_bps},
                {"edge_power_w", c.edge_power_w},     {"fading", c.fading},
                {"fading_sigma_db", c.fading_sigma_db}};
  j["hardware"] = {{"cycles_per_sample", c.cycles_per_sample}, {"capacitance", c.capacitance},
                   {"f_min_hz", c.f_min_hz},                   {"f_max_hz", c.f_max_hz},
                   {"p_min_dbm", c.p_min_dbm},                 {"p_max_dbm", c.p_max_dbm}};
  j["data"] = {{"num_distributions", c.data.num_distributions},
               {"num_classes", c.data.num_classes},
               {"dim", c.data.dim},
               {"classes_per_worker", c.data.classes_per_worker},
               {"labeled_fraction", c.data.labeled_fraction},
               {"samples_per_worker", c.data.samples_per_worker},
               {"test_fraction", c.data.test_fraction},
               {"separation", c.data.separation},
               {"noise_std", c.data.noise_std},
               {"distribution_shift", c.data.distribution_shift}};
  j["ssl"] = {{"phi", c.phi},          {"kappa", c.kappa},   {"rho_lat", c.rho_lat},
              {"temperature", c.temperature}, {"lambda", c.lambda},
              {"validation_fraction", c.validation_fraction}};
  j["clustering"] = {{"eps1", c.eps1},         {"eps2", c.eps2},
                     {"eps1_rel", c.eps1_rel}, {"eps2_ratio", c.eps2_ratio},
                     {"gamma_check", c.gamma_check}, {"tau_cloud", c.tau_cloud}};
  j["scheduling"] = {{"n_sel", c.n_sel}, {"deadline_slack", c.deadline_slack}};
  j["budget"] = {{"time_s", c.time_budget_s}};
  j["output"] = {{"checkpoint_every", c.checkpoint_every}};
  return j;
}

template <typename T>
void read(const json& j, const char* section, const char* key, T& out) {
  try {
    out = j.at(section).at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field ") + section + "." + key + ": " + e.what());
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field ") + key + ": " + e.what());
  }
}

SimConfig from_tree(const json& j) {
  SimConfig c;
  read(j, "profile", c.profile);
  read(j, "scenario", c.scenario);
  read(j, "seed", c.seed);
  read(j, "threads", c.threads);
  read(j, "topology", "workers", c.workers);
  read(j, "topology", "edges", c.edges);
  read(j, "training", "rounds", c.rounds);
  read(j, "training", "epochs", c.epochs);
  read(j, "training", "batch", c.batch);
  read(j, "training", "lr", c.lr);
  read(j, "training", "hidden", c.hidden);
  read(j, "radio", "bandwidth_hz", c.bandwidth_hz);
  read(j, "radio", "noise_w", c.noise_w);
  read(j, "radio", "g0_db", c.g0_db);
  read(j, "radio", "d0_m", c.d0_m);
  read(j, "radio", "path_loss_exp", c.path_loss_exp);
  read(j, "radio", "distance_min_m", c.distance_min_m);
  read(j, "radio", "distance_max_m", c.distance_max_m);
  read(j, "radio", "edge_rate_bps", c.edge_rate_bps);
  read(j, "radio", "edge_power_w", c.edge_power_w);
  read(j, "radio", "fading", c.fading);
  read(j, "radio", "fading_sigma_db", c.fading_sigma_db);
  read(j, "hardware", "cycles_per_sample", c.cycles_per_sample);
  read(j, "hardware", "capacitance", c.capacitance);
  read(j, "hardware", "f_min_hz", c.f_min_hz);
  read(j, "hardware", "f_max_hz", c.f_max_hz);
  read(j, "hardware", "p_min_dbm", c.p_min_dbm);
  read(j, "hardware", "p_max_dbm", c.p_max_dbm);
  read(j, "data", "num_distributions", c.data.num_distributions);
  read(j, "data", "num_classes", c.data.num_classes);
  read(j, "data", "dim", c.data.dim);
  read(j, "data", "classes_per_worker", c.data.classes_per_worker);
  read(j, "data", "labeled_fraction", c.data.labeled_fraction);
  read(j, "data", "samples_per_worker", c.data.samples_per_worker);
  read(j, "data", "test_fraction", c.data.test_fraction);
  read(j, "data", "separation", c.data.separation);
  read(j, "data", "noise_std", c.data.noise_std);
  read(j, "data", "distribution_shift", c.data.distribution_shift);
  read(j, "ssl", "phi", c.phi);
  read(j, "ssl", "kappa", c.kappa);
  read(j, "ssl", "rho_lat", c.rho_lat);
  read(j, "ssl", "temperature", c.temperature);
  read(j, "ssl", "lambda", c.lambda);
  read(j, "ssl", "validation_fraction", c.validation_fraction);
  read(j, "clustering", "eps1", c.eps1);
  read(j, "clustering", "eps2", c.eps2);
  read(j, "clustering", "eps1_rel", c.eps1_rel);
  read(j, "clustering", "eps2_ratio", c.eps2_ratio);
  read(j, "clustering", "gamma_check", c.gamma_check);
  read(j, "clustering", "tau_cloud", c.tau_cloud);
  read(j, "scheduling", "n_sel", c.n_sel);
  read(j, "scheduling", "deadline_slack", c.deadline_slack);
  read(j, "budget", "time_s", c.time_budget_s);
  read(j, "output", "checkpoint_every", c.checkpoint_every);
  return c;
}

// Overlays `patch` onto `base`, rejecting keys the base does not define and
// values whose JSON kind differs from the default.
void overlay(json& base, const json& patch, const std::string& path) {
  if (!patch.is_object()) throw ConfigError("config: expected an object at '" + path + "'");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string here = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("config: unknown field '" + here + "'");
    auto& slot = base[it.key()];
    if (slot.is_object()) {
      overlay(slot, it.value(), here);
      continue;
    }
    const bool both_numbers = slot.is_number() && it.value().is_number();
    if (!both_numbers && slot.type() != it.value().type())
      throw ConfigError("config: field '" + here + "' has the wrong type");
    if (slot.is_number_integer() && !it.value().is_number_integer())
      throw ConfigError("config: field '" + here + "' must be an integer");
    slot = it.value();
  }
}

}  // namespace

SimConfig SimConfig::for_profile(const std::string& profile) {
  SimConfig c;
  c.profile = profile;
  if (profile == "desk") return c;
  if (profile == "paper") {
    c.workers = 200;
    c.edges = 3;
    c.rounds = 200;
    return c;
  }
  throw ConfigError("unknown profile '" + profile + "' (expected desk or paper)");
}

std::string SimConfig::to_json() const { return to_tree(*this).dump(2); }

SimConfig SimConfig::from_json(const std::string& text) {
  json patch;
  try {
    patch = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!patch.is_object()) throw ConfigError("config: top level must be an object");
  std::string profile = "desk";
  if (patch.contains("profile")) {
    if (!patch["profile"].is_string()) throw ConfigError("config: profile must be a string");
    profile = patch["profile"].get<std::string>();
  }
  json tree = to_tree(for_profile(profile));
  overlay(tree, patch, "");
  auto c = from_tree(tree);
  c.validate();
  return c;
}

SimConfig SimConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void SimConfig::set(const std::string& key, const std::string& value) {
  json v;
  try {
    v = json::parse(value);
  } catch (const json::parse_error&) {
    v = value;
  }
  json patch = v;
  std::string rest = key;
  std::vector<std::string> parts;
  for (std::size_t pos; (pos = rest.find('.')) != std::string::npos; rest = rest.substr(pos + 1))
    parts.push_back(rest.substr(0, pos));
  parts.push_back(rest);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = json{{*it, patch}};
  json tree = to_tree(*this);
  if (key == "profile") {
    if (!v.is_string()) throw ConfigError("config: profile must be a string");
    tree = to_tree(for_profile(v.get<std::string>()));
  }
  overlay(tree, patch, "");
  auto c = from_tree(tree);
  c.validate();
  *this = c;
}

void SimConfig::validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invalid config: " + what);
  };
  scenario_by_name(scenario);
  need(threads >= 1, "threads must be >= 1");
  need(workers >= 1 && edges >= 1, "topology.workers and topology.edges must be >= 1");
  need(edges <= workers, "topology.edges must not exceed topology.workers");
  need(rounds >= 0, "training.rounds must be >= 0");
  need(epochs >= 1 && batch >= 1, "training.epochs and training.batch must be >= 1");
  need(lr > 0.0 && std::isfinite(lr), "training.lr must be > 0");
  for (int h : hidden) need(h >= 1, "training.hidden entries must be >= 1");
  need(bandwidth_hz > 0.0 && noise_w > 0.0, "radio.bandwidth_hz and radio.noise_w must be > 0");
  need(d0_m > 0.0 && path_loss_exp >= 0.0, "radio.d0_m must be > 0, path_loss_exp >= 0");
  need(distance_min_m > 0.0 && distance_min_m <= distance_max_m, "radio distance range");
  need(edge_rate_bps > 0.0 && edge_power_w >= 0.0, "radio.edge_rate_bps must be > 0");
  need(fading_sigma_db >= 0.0, "radio.fading_sigma_db must be >= 0");
  need(cycles_per_sample > 0.0 && capacitance > 0.0, "hardware cycles and capacitance > 0");
  need(f_min_hz > 0.0 && f_min_hz <= f_max_hz, "hardware frequency range");
  need(p_min_dbm <= p_max_dbm, "hardware power range");
  try {
    data.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  need(workers >= data.num_distributions, "topology.workers must be >= data.num_distributions");
  need(phi > 0.0 && phi <= 1.0, "ssl.phi must be in (0, 1]");
  need(kappa >= 0.0 && rho_lat >= 0.0, "ssl.kappa and ssl.rho_lat must be >= 0");
  need(temperature > 0.0, "ssl.temperature must be > 0");
  need(validation_fraction >= 0.0 && validation_fraction < 1.0,
       "ssl.validation_fraction must be in [0, 1)");
  need(eps1 >= 0.0 && eps2 >= 0.0, "clustering.eps1/eps2 must be >= 0");
  need(eps1_rel > 0.0 && eps2_ratio > 0.0, "clustering.eps1_rel and eps2_ratio must be > 0");
  need(tau_cloud >= -1.0 && tau_cloud <= 1.0, "clustering.tau_cloud must be in [-1, 1]");
  need(n_sel >= 1, "scheduling.n_sel must be >= 1");
  need(deadline_slack >= 1.0, "scheduling.deadline_slack must be >= 1");
  need(time_budget_s >= 0.0, "budget.time_s must be >= 0");
  need(checkpoint_every >= 0, "output.checkpoint_every must be >= 0");
  const int labeled =
      static_cast<int>(std::llround(data.samples_per_worker * data.labeled_fraction));
  need(labeled >= 1, "labeled_fraction leaves a worker without labeled samples");
}

}  // namespace cfsl::sim
