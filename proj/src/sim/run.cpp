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
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "cfsl/clustering.hpp"
#include "cfsl/common.hpp"
#include "cfsl/hfl.hpp"
#include "cfsl/labeling.hpp"
#include "cfsl/nn.hpp"
#include "cfsl/radio.hpp"
#include "cfsl/scheduling.hpp"
#include "cfsl/sim.hpp"

namespace cfsl::sim {

namespace {

constexpr int kGlobalCheckpointId = -2;

struct Worker {
  int id = 0;
  int edge = 0;
  int distribution = 0;
  data::WorkerDataset data;  // labeled holds the training part only
  std::vector<data::Sample> validation;
  std::vector<data::Sample> test;
  radio::WorkerHardware hw;
  double distance_m = 0.0;
  double gain = 0.0;

  double train_size() const { return static_cast<double>(data.labeled.size() + data.pseudo.size()); }
};

struct TrainOutcome {
  nn::TrainResult train;
  double samples = 0.0;
};

template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(t);
  for (std::size_t s = 0; s < t; ++s) {
    pool.emplace_back([&, s] {
      try {
        for (std::size_t k = s; k < n; k += t) fn(k);
      } catch (...) {
        errors[s] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Labeled and pseudo-labeled examples weighted so the batch mean estimates the
// sum of the two per-set mean losses.
std::vector<nn::Example> training_examples(const Worker& w) {
  const auto& d = w.data;
  const double n_l = static_cast<double>(d.labeled.size());
  const double n_p = static_cast<double>(d.pseudo.size());
  const double n = n_l + n_p;
  std::vector<nn::Example> out;
  out.reserve(d.labeled.size() + d.pseudo.size());
  const double w_l = n_p > 0.0 ? n / n_l : 1.0;
  for (const auto& s : d.labeled) out.push_back({s.features, s.label, w_l});
  for (const auto& p : d.pseudo) {
    const auto* u = d.find_unlabeled(p.id);
    out.push_back({u->features, p.label, n / n_p});
  }
  return out;
}

double accuracy(const nn::Mlp& mlp, const nn::ParamVector& theta,
                const std::vector<data::Sample>& samples) {
  if (samples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& s : samples)
    if (ssl::top_class(mlp.forward(theta, s.features)).label == s.label) ++correct;
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

[[noreturn]] void violation(const std::string& what, int round) {
  throw RuntimeFailure("constraint audit failed in round " + std::to_string(round) + ": " + what);
}

std::string checkpoint_bytes(int round, const std::vector<std::pair<int, const nn::ParamVector*>>& models) {
  std::ostringstream out(std::ios::binary);
  out.write("CFSLCK01", 8);
  auto put32 = [&out](std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.put(static_cast<char>((v >> (8 * k)) & 0xff));
  };
  put32(static_cast<std::uint32_t>(round));
  put32(static_cast<std::uint32_t>(models.size()));
  for (const auto& [id, model] : models) {
    put32(static_cast<std::uint32_t>(static_cast<std::int32_t>(id)));
    model->write(out);
  }
  return out.str();
}

class Simulation {
 public:
  explicit Simulation(const SimConfig& cfg)
      : cfg_(cfg),
        scenario_(scenario_by_name(cfg.scenario)),
        mlp_(architecture(cfg)),
        select_rng_(derive_seed(cfg.seed, tag("select"))) {
    channel_.bandwidth_hz = cfg.bandwidth_hz;
    channel_.noise_w = cfg.noise_w;
    channel_.g0_db = cfg.g0_db;
    channel_.d0_m = cfg.d0_m;
    channel_.path_loss_exp = cfg.path_loss_exp;
    model_bits_ = static_cast<double>(mlp_.parameter_count()) * 32.0;
    build_workers();
    build_clusters();
    deadline_ = compute_deadline();
  }

  RunResult run() {
    RunResult out;
    out.config = cfg_;
    for (const auto& w : workers_) {
      WorkerInfo info;
      info.id = w.id;
      info.edge = w.edge;
      info.distribution = w.distribution;
      info.cpu_hz = w.hw.cpu_hz;
      info.tx_power_w = w.hw.tx_power_w;
      info.distance_m = w.distance_m;
      info.gain = w.gain;
      info.labeled = static_cast<int>(w.data.labeled.size());
      info.validation = static_cast<int>(w.validation.size());
      info.unlabeled = static_cast<int>(w.data.unlabeled.size());
      info.test = static_cast<int>(w.test.size());
      out.workers.push_back(info);
    }
    radio::BudgetTracker budget(cfg_.time_budget_s);
    for (int r = 1; r <= cfg_.rounds; ++r) {
      round(r, out, budget);
      ++out.summary.rounds_run;
      if (budget.exhausted()) {
        out.summary.budget_stop = true;
        break;
      }
    }
    finish(out, budget);
    return out;
  }

 private:
  static nn::Architecture architecture(const SimConfig& cfg) {
    nn::Architecture a;
    a.input_dim = cfg.data.dim;
    a.hidden = cfg.hidden;
    a.classes = cfg.data.num_classes;
    a.validate();
    return a;
  }

  void build_workers() {
    auto generated = data::generate(cfg_.data, cfg_.workers, cfg_.seed);
    topology_ = hfl::Topology::round_robin(cfg_.workers, cfg_.edges);
    for (int i = 0; i < cfg_.workers; ++i) {
      Worker w;
      w.id = i;
      w.edge = topology_.edge_of(i);
      w.distribution = generated[i].distribution;
      w.data = std::move(generated[i].data);
      w.test = std::move(generated[i].test);

      // Held-out validation fold from the labeled set.
      std::mt19937_64 vrng(derive_seed(cfg_.seed, tag("validation"), i));
      auto& labeled = w.data.labeled;
      const auto n_l = labeled.size();
      auto n_val = static_cast<std::size_t>(
          std::llround(static_cast<double>(n_l) * cfg_.validation_fraction));
      if (n_val >= n_l) n_val = n_l - 1;
      std::vector<std::size_t> order(n_l);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::shuffle(order.begin(), order.end(), vrng);
      std::vector<char> is_val(n_l, 0);
      for (std::size_t k = 0; k < n_val; ++k) is_val[order[k]] = 1;
      std::vector<data::Sample> train;
      for (std::size_t k = 0; k < n_l; ++k)
        (is_val[k] ? w.validation : train).push_back(std::move(labeled[k]));
      labeled = std::move(train);

      std::mt19937_64 hrng(derive_seed(cfg_.seed, tag("hardware"), i));
      std::uniform_real_distribution<double> f(cfg_.f_min_hz, cfg_.f_max_hz);
      std::uniform_real_distribution<double> p(cfg_.p_min_dbm, cfg_.p_max_dbm);
      std::uniform_real_distribution<double> d(cfg_.distance_min_m, cfg_.distance_max_m);
      w.hw.cpu_hz = f(hrng);
      w.hw.tx_power_w = radio::dbm_to_watt(p(hrng));
      w.hw.capacitance = cfg_.capacitance;
      w.hw.cycles_per_sample = cfg_.cycles_per_sample;
      w.distance_m = d(hrng);
      w.gain = radio::channel_gain(w.distance_m, cfg_.g0_db, cfg_.d0_m, cfg_.path_loss_exp).linear;
      workers_.push_back(std::move(w));
    }
  }

  void build_clusters() {
    const auto init = mlp_.init(derive_seed(cfg_.seed, tag("init")));
    if (scenario_.clustering) {
      for (int e = 0; e < cfg_.edges; ++e) registry_.add_root(topology_.members(e), e, init);
    } else {
      std::vector<int> all(cfg_.workers);
      std::iota(all.begin(), all.end(), 0);
      registry_.add_root(all, cluster::kCloudMerged, init);
    }
    global_ = init;
  }

  double share_all(int edge) const {
    return radio::equal_share(topology_.members(edge).size());
  }

  double rate(const Worker& w, double share, double gain) const {
    return radio::data_rate(share, cfg_.bandwidth_hz, gain, w.hw.tx_power_w, cfg_.noise_w);
  }

  double latency(const Worker& w, double samples, double share, double gain) const {
    return radio::comp_time(samples, w.hw.cycles_per_sample, w.hw.cpu_hz, cfg_.epochs) +
           model_bits_ / rate(w, share, gain);
  }

  // Slowest worker with its labeled data and an equal share of its edge, times the slack.
  double compute_deadline() const {
    double slowest = 0.0;
    for (const auto& w : workers_)
      slowest = std::max(slowest, latency(w, static_cast<double>(w.data.labeled.size()),
                                          share_all(w.edge), w.gain));
    return cfg_.deadline_slack * slowest;
  }

  double round_gain(const Worker& w, int r) const {
    if (!cfg_.fading) return w.gain;
    std::mt19937_64 rng(derive_seed(cfg_.seed, tag("fading"), r, w.id));
    std::normal_distribution<double> shadow(0.0, cfg_.fading_sigma_db);
    return w.gain * std::pow(10.0, shadow(rng) / 10.0);
  }

  double cluster_data(const cluster::ClusterState& c) const {
    double total = 0.0;
    for (int m : c.members) total += workers_[m].train_size();
    return total;
  }

  void round(int r, RunResult& out, radio::BudgetTracker& budget);
  void label(int r, RunResult& out, std::vector<double>& utility_term);
  void finish(RunResult& out, const radio::BudgetTracker& budget);

  SimConfig cfg_;
  Scenario scenario_;
  nn::Mlp mlp_;
  radio::ChannelParams channel_;
  double model_bits_ = 0.0;
  std::vector<Worker> workers_;
  hfl::Topology topology_;
  cluster::ClusterRegistry registry_;
  nn::ParamVector global_;
  double deadline_ = 0.0;
  std::map<int, sched::SelectionState> selection_state_;
  std::mt19937_64 select_rng_;
  ssl::PredictionClock clock_;
  bool global_trigger_ = false;
  AuditCounters audit_;
};

void Simulation::round(int r, RunResult& out, radio::BudgetTracker& budget) {
  const auto active = registry_.active();

  // Planned participation per edge, used for the bandwidth-share estimate.
  std::vector<std::size_t> planned(cfg_.edges, 0);
  for (int id : active) {
    const auto& c = registry_.at(id);
    if (c.status == cluster::ClusterStatus::stopped && c.edge != cluster::kCloudMerged) {
      planned[c.edge] += std::min<std::size_t>(cfg_.n_sel, c.members.size());
    } else if (c.status == cluster::ClusterStatus::stopped) {
      // A merged cluster draws its n_sel workers from any edge.
      for (int e = 0; e < cfg_.edges; ++e) planned[e] += std::min<std::size_t>(cfg_.n_sel, topology_.members(e).size());
    } else {
      for (int m : c.members) ++planned[workers_[m].edge];
    }
  }

  std::vector<double> gains(workers_.size());
  for (const auto& w : workers_) gains[w.id] = round_gain(w, r);

  // Selection.
  std::map<int, std::vector<int>> participants;
  std::vector<char> fallback_worker(workers_.size(), 0);
  int fallbacks = 0;
  for (int id : active) {
    const auto& c = registry_.at(id);
    std::vector<sched::Candidate> candidates;
    for (int m : c.members) {
      const auto& w = workers_[m];
      candidates.push_back(
          {m, latency(w, w.train_size(), radio::equal_share(planned[w.edge]), gains[m])});
    }
    const auto feasible = sched::feasibility_filter(candidates, deadline_);
    SelectionRow row;
    row.round = r;
    row.cluster = id;
    row.edge = c.edge;
    row.fallback = feasible.fallback;
    std::vector<int> chosen;
    if (c.status == cluster::ClusterStatus::stopped) {
      row.policy = sched::to_string(scenario_.policy);
      chosen = sched::select(c.members, feasible.kept, scenario_.policy,
                             static_cast<std::size_t>(cfg_.n_sel), selection_state_[id],
                             select_rng_);
    } else {
      row.policy = "all";
      for (const auto& k : feasible.kept) chosen.push_back(k.worker);
      std::sort(chosen.begin(), chosen.end());
    }
    if (feasible.fallback) {
      ++fallbacks;
      for (int m : chosen) fallback_worker[m] = 1;
    }
    for (int m : chosen) {
      const auto it = std::find_if(candidates.begin(), candidates.end(),
                                   [m](const auto& k) { return k.worker == m; });
      row.latencies.push_back(it->latency);
    }
    row.selected = chosen;
    out.selection.push_back(std::move(row));
    participants[id] = std::move(chosen);
  }

  // Actual bandwidth shares.
  std::vector<std::size_t> scheduled(cfg_.edges, 0);
  for (const auto& [id, ws] : participants)
    for (int m : ws) ++scheduled[workers_[m].edge];

  // Local training.
  std::vector<int> trainees;
  for (const auto& [id, ws] : participants) trainees.insert(trainees.end(), ws.begin(), ws.end());
  std::sort(trainees.begin(), trainees.end());
  std::vector<TrainOutcome> outcomes(workers_.size());
  std::vector<int> cluster_of(workers_.size(), -1);
  for (int id : active)
    for (int m : registry_.at(id).members) cluster_of[m] = id;
  parallel_for(trainees.size(), cfg_.threads, [&](std::size_t k) {
    const auto& w = workers_[trainees[k]];
    const auto examples = training_examples(w);
    nn::TrainOptions opts;
    opts.epochs = cfg_.epochs;
    opts.batch = cfg_.batch;
    opts.lr = cfg_.lr;
    opts.shuffle_seed = derive_seed(cfg_.seed, tag("train"), w.id, r);
    outcomes[w.id].train = nn::local_train(mlp_, registry_.at(cluster_of[w.id]).model, examples, opts);
    outcomes[w.id].samples = w.train_size();
  });

  // Aggregation, split and stop checks per cluster.
  std::map<int, nn::ParamVector> round_delta;
  std::vector<std::size_t> uploads(cfg_.edges, 0);
  for (int id : active) {
    const auto& ws = participants[id];
    std::map<int, std::vector<hfl::Weighted>> by_edge;
    for (int m : ws) by_edge[workers_[m].edge].push_back({&outcomes[m].train.delta, outcomes[m].samples});
    std::vector<nn::ParamVector> edge_models;
    std::vector<double> edge_weights;
    for (auto& [e, items] : by_edge) {
      edge_models.push_back(hfl::edge_aggregate(items));
      double total = 0.0;
      for (const auto& it : items) total += it.weight;
      edge_weights.push_back(total);
      ++uploads[e];
    }
    nn::ParamVector delta;
    if (edge_models.size() == 1) {
      delta = edge_models.front();
    } else {
      std::vector<hfl::Weighted> items;
      for (std::size_t k = 0; k < edge_models.size(); ++k) items.push_back({&edge_models[k], edge_weights[k]});
      delta = hfl::cloud_aggregate(items);
    }
    auto& c = registry_.at(id);
    c.model += delta;

    // Gradient proxies: mean per-step gradient of each participant.
    std::vector<nn::ParamVector> proxies;
    std::vector<double> weights;
    for (int m : ws) {
      auto g = outcomes[m].train.delta;
      g *= -1.0 / (cfg_.lr * static_cast<double>(std::max<std::size_t>(1, outcomes[m].train.steps)));
      proxies.push_back(std::move(g));
      weights.push_back(outcomes[m].samples);
    }
    if (!c.eps_set) {
      double mean = 0.0;
      for (const auto& g : proxies) mean += g.norm();
      mean /= static_cast<double>(proxies.size());
      c.eps1 = cfg_.eps1 > 0.0 ? cfg_.eps1 : cfg_.eps1_rel * mean;
      c.eps2 = cfg_.eps2 > 0.0 ? cfg_.eps2 : cfg_.eps2_ratio * c.eps1;
      c.eps_set = true;
    }

    ClusterRow row;
    row.round = r;
    row.cluster = id;
    row.edge = c.edge;
    row.members = static_cast<int>(c.members.size());
    row.participants = static_cast<int>(ws.size());
    row.eps1 = c.eps1;
    row.eps2 = c.eps2;
    row.decision = "none";

    if (c.status != cluster::ClusterStatus::stopped) {
      const auto check = cluster::check_split(proxies, weights, c.eps1, c.eps2);
      c.last_aggregated_norm = check.aggregated_norm;
      c.last_max_norm = check.max_norm;
      row.aggregated_norm = check.aggregated_norm;
      row.max_norm = check.max_norm;
      row.decision = cluster::to_string(check.decision);
      if (check.decision == cluster::SplitDecision::stop) {
        c.status = cluster::ClusterStatus::stopped;
        c.stop_round = r;
        global_trigger_ = true;
      } else if (check.decision == cluster::SplitDecision::split) {
        global_trigger_ = true;
        c.status = cluster::ClusterStatus::stationary;
        const bool complete = ws.size() == c.members.size() && ws.size() >= 2;
        if (scenario_.clustering && complete) {
          const auto sim = cluster::SimilarityMatrix::from_updates(proxies);
          const auto split = cluster::bipartition(sim);
          const auto gamma = cluster::gamma_check(proxies, weights, split);
          if (!cfg_.gamma_check || gamma.accepted) {
            std::vector<int> first, second;
            for (auto k : split.first) first.push_back(ws[k]);
            for (auto k : split.second) second.push_back(ws[k]);
            const int edge = c.edge;
            row.decision = "split_executed";
            const auto [a, b] = registry_.split(id, first, second, r);
            out.splits.push_back({r, id, edge, first, second});
            clock_.record_split(r);
            // Children report the mean update of their own members.
            for (int child : {a, b}) {
              std::vector<hfl::Weighted> items;
              for (int m : registry_.at(child).members)
                items.push_back({&outcomes[m].train.delta, outcomes[m].samples});
              round_delta[child] = hfl::edge_aggregate(items);
            }
          } else {
            row.decision = gamma.degenerate_mean ? "split_rejected_degenerate" : "split_rejected_gamma";
          }
        }
      } else {
        c.status = cluster::ClusterStatus::active;
      }
    }
    row.status = registry_.at(id).retired ? "split" : cluster::to_string(registry_.at(id).status);
    out.cluster_log.push_back(std::move(row));
    if (!registry_.at(id).retired) round_delta[id] = std::move(delta);
  }

  // Cloud: merge specialized models whose updates agree, then the global model.
  const auto now_active = registry_.active();
  {
    std::vector<nn::ParamVector> deltas;
    for (int id : now_active) deltas.push_back(round_delta.at(id));
    const auto groups = cluster::cloud_similarity_grouping(deltas, cfg_.tau_cloud);
    std::map<int, std::vector<int>> members_of_group;
    for (std::size_t k = 0; k < now_active.size(); ++k) {
      registry_.at(now_active[k]).cloud_group = groups[k];
      members_of_group[groups[k]].push_back(now_active[k]);
    }
    for (const auto& [g, ids] : members_of_group) {
      if (ids.size() < 2) continue;
      std::vector<hfl::Weighted> items;
      for (int id : ids) items.push_back({&registry_.at(id).model, cluster_data(registry_.at(id))});
      const auto merged = hfl::cloud_aggregate(items);
      for (int id : ids) registry_.at(id).model = merged;
    }
    std::vector<hfl::Weighted> all;
    for (int id : now_active) all.push_back({&registry_.at(id).model, cluster_data(registry_.at(id))});
    global_ = hfl::cloud_aggregate(all);
  }
  for (auto& row : out.cluster_log)
    if (row.round == r && !registry_.at(row.cluster).retired)
      row.cloud_group = registry_.at(row.cluster).cloud_group;

  // Costs.
  std::vector<radio::WorkerCostInput> inputs;
  for (int m : trainees) {
    const auto& w = workers_[m];
    radio::WorkerCostInput in;
    in.worker = m;
    in.edge = w.edge;
    in.samples = outcomes[m].samples;
    in.share = radio::equal_share(scheduled[w.edge]);
    in.gain = gains[m];
    in.hw = w.hw;
    inputs.push_back(in);
  }
  std::vector<radio::EdgeUplink> uplinks(cfg_.edges);
  for (int e = 0; e < cfg_.edges; ++e) {
    uplinks[e].rate_bps = cfg_.edge_rate_bps;
    uplinks[e].tx_power_w = cfg_.edge_power_w;
    uplinks[e].bits = model_bits_ * static_cast<double>(uploads[e]);
  }
  const auto report = radio::round_costs(inputs, uplinks, cfg_.epochs, model_bits_, channel_);
  budget.add(report.round_time, report.round_energy);

  // Built-in constraint audit.
  ++audit_.checks;
  for (const auto& wc : report.workers) {
    if (!fallback_worker[wc.worker] && wc.latency() > deadline_) {
      ++audit_.deadline;
      violation("worker " + std::to_string(wc.worker) + " misses the deadline", r);
    }
  }
  for (const auto& ec : report.edges) {
    if (ec.share_sum > 1.0 + 1e-12) {
      ++audit_.beta;
      violation("bandwidth shares of edge " + std::to_string(ec.edge) + " exceed one", r);
    }
  }
  if (!topology_.association_valid()) {
    ++audit_.association;
    violation("worker-edge association is not one-to-one", r);
  }
  if (!registry_.partition_valid(topology_)) {
    ++audit_.partition;
    violation("clusters do not partition the workers", r);
  }
  if (!report.consistent()) {
    ++audit_.cost;
    violation("round totals differ from the per-worker recomputation", r);
  }

  for (const auto& wc : report.workers) {
    CostRow row;
    row.round = r;
    row.id = wc.worker;
    row.edge = wc.edge;
    row.cluster = registry_.cluster_of(wc.worker);
    row.samples = outcomes[wc.worker].samples;
    row.share = wc.share;
    row.rate_bps = wc.rate_bps;
    row.t_cmp = wc.t_cmp;
    row.t_com = wc.t_com;
    row.e_cmp = wc.e_cmp;
    row.e_com = wc.e_com;
    out.costs.push_back(row);
  }
  for (const auto& ec : report.edges) {
    CostRow row;
    row.round = r;
    row.edge_row = true;
    row.id = ec.edge;
    row.edge = ec.edge;
    row.samples = static_cast<double>(uploads[ec.edge]);
    row.share = ec.share_sum;
    row.rate_bps = cfg_.edge_rate_bps;
    row.t_com = ec.t_cld;
    row.e_com = ec.e_cld;
    out.costs.push_back(row);
  }

  // Pseudo-labeling.
  std::vector<double> utility_term(workers_.size(), 0.0);
  if (scenario_.ssl) label(r, out, utility_term);

  // Metrics.
  RoundMetrics m;
  m.round = r;
  m.clusters = static_cast<int>(registry_.active_count());
  m.stopped_clusters = static_cast<int>(registry_.stopped_count());
  m.participants = static_cast<int>(trainees.size());
  m.energy_j = report.round_energy;
  m.time_s = report.round_time;
  m.cum_energy_j = budget.energy();
  m.cum_time_s = budget.time();
  m.deadline_s = deadline_;
  m.fallbacks = fallbacks;
  m.acc_min = 1.0;
  std::map<int, std::pair<double, int>> cluster_acc;
  std::size_t pseudo_total = 0, pseudo_correct = 0, unlabeled_total = 0;
  for (const auto& w : workers_) {
    const int cid = registry_.cluster_of(w.id);
    const auto& theta = registry_.at(cid).model;
    const double acc = accuracy(mlp_, theta, w.test);
    m.acc_min = std::min(m.acc_min, acc);
    m.acc_max = std::max(m.acc_max, acc);
    m.acc_mean += acc;
    cluster_acc[cid].first += acc;
    ++cluster_acc[cid].second;
    std::vector<nn::Example> labeled;
    for (const auto& s : w.data.labeled) labeled.push_back({s.features, s.label, 1.0});
    m.objective += mlp_.loss(theta, labeled) - cfg_.lambda * utility_term[w.id];
    for (const auto& p : w.data.pseudo) {
      ++pseudo_total;
      if (data::LabelOracle::true_label(*w.data.find_unlabeled(p.id)) == p.label) ++pseudo_correct;
    }
    unlabeled_total += w.data.unlabeled.size();
  }
  m.acc_mean /= static_cast<double>(workers_.size());
  m.pseudo_labels = static_cast<int>(pseudo_total);
  m.label_accuracy = pseudo_total ? static_cast<double>(pseudo_correct) / pseudo_total : 0.0;
  m.label_coverage = unlabeled_total ? static_cast<double>(pseudo_total) / unlabeled_total : 0.0;
  for (auto& row : out.cluster_log) {
    if (row.round != r) continue;
    const auto it = cluster_acc.find(row.cluster);
    if (it != cluster_acc.end()) row.acc_mean = it->second.first / it->second.second;
  }
  out.metrics.push_back(m);

  if (cfg_.checkpoint_every > 0 && r % cfg_.checkpoint_every == 0) {
    std::vector<std::pair<int, const nn::ParamVector*>> models;
    for (int id : registry_.active()) models.push_back({id, &registry_.at(id).model});
    models.push_back({kGlobalCheckpointId, &global_});
    out.checkpoints.push_back({r, checkpoint_bytes(r, models)});
  }
}

void Simulation::label(int r, RunResult& out, std::vector<double>& utility_term) {
  const auto active = registry_.active();
  std::vector<int> triggered;
  for (const auto& w : workers_) {
    const auto& c = registry_.at(registry_.cluster_of(w.id));
    bool on = false;
    if (!scenario_.clustering) {
      on = global_trigger_;
    } else {
      on = clock_.trigger(scenario_.time, r, c.status == cluster::ClusterStatus::stopped);
    }
    if (on) triggered.push_back(w.id);
  }
  if (triggered.empty()) return;

  ssl::UtilityParams params;
  params.kappa = cfg_.kappa;
  params.rho_lat = cfg_.rho_lat;

  struct Labeled {
    std::vector<data::PseudoLabel> labels;
    ssl::ModelChoice choice;
    double utility = 0.0;
  };
  std::vector<Labeled> results(triggered.size());
  parallel_for(triggered.size(), cfg_.threads, [&](std::size_t k) {
    const auto& w = workers_[triggered[k]];
    const int own = registry_.cluster_of(w.id);
    const double download = model_bits_ / rate(w, share_all(w.edge), w.gain);
    const double inference = radio::comp_time(static_cast<double>(w.data.unlabeled.size()),
                                              w.hw.cycles_per_sample, w.hw.cpu_hz, 1);
    std::vector<double> lat;
    for (int id : active) {
      const auto& c = registry_.at(id);
      double t = inference;
      if (id != own) {
        t += download;
        if (c.edge != cluster::kCloudMerged && c.edge != w.edge)
          t += model_bits_ / cfg_.edge_rate_bps;
      }
      lat.push_back(t);
    }
    const double max_lat = *std::max_element(lat.begin(), lat.end());
    std::vector<double> utilities;
    for (std::size_t m = 0; m < active.size(); ++m) {
      const auto& theta = registry_.at(active[m]).model;
      ssl::ProbabilityFn fn = [this, &theta](std::span<const double> x) {
        return mlp_.forward(theta, x);
      };
      const double norm_lat = max_lat > 0.0 ? lat[m] / max_lat : 0.0;
      utilities.push_back(
          ssl::model_utility(fn, w.validation, w.data.unlabeled, cfg_.phi, norm_lat, params).value);
    }
    auto& res = results[k];
    if (scenario_.model == ssl::PredictionModel::best_specialized) {
      res.choice = ssl::select_best_model(utilities);
      const auto m = res.choice.chosen();
      const auto& theta = registry_.at(active[m]).model;
      ssl::ProbabilityFn fn = [this, &theta](std::span<const double> x) {
        return mlp_.forward(theta, x);
      };
      res.labels = ssl::confident_labels(fn, w.data.unlabeled, cfg_.phi, active[m], r);
    } else {
      res.choice = ssl::ensemble_weights(utilities, cfg_.temperature);
      const auto alpha = res.choice.weights;
      ssl::ProbabilityFn fn = [this, &active, alpha](std::span<const double> x) {
        std::vector<std::vector<double>> probs;
        for (int id : active) probs.push_back(mlp_.forward(registry_.at(id).model, x));
        return ssl::ensemble_predict(probs, alpha);
      };
      res.labels = ssl::confident_labels(fn, w.data.unlabeled, cfg_.phi, -1, r);
    }
    for (std::size_t m = 0; m < utilities.size(); ++m) res.utility += res.choice.weights[m] * utilities[m];
  });

  for (std::size_t k = 0; k < triggered.size(); ++k) {
    auto& w = workers_[triggered[k]];
    const auto& res = results[k];
    const bool ok = res.choice.valid();
    if (res.choice.kind == ssl::ModelChoice::Kind::one_hot && !ok) {
      ++audit_.one_hot;
      violation("model choice of worker " + std::to_string(w.id) + " is not one-hot", r);
    }
    if (res.choice.kind == ssl::ModelChoice::Kind::simplex && !ok) {
      ++audit_.simplex;
      violation("ensemble weights of worker " + std::to_string(w.id) + " leave the simplex", r);
    }
    utility_term[w.id] = res.utility;
    w.data.pseudo.clear();
    ssl::inject(w.data, res.labels);
    for (const auto& p : res.labels) {
      const bool correct = data::LabelOracle::true_label(*w.data.find_unlabeled(p.id)) == p.label;
      out.pseudo_audit.push_back({r, w.id, p.id, p.label, p.confidence, p.producer, correct});
    }
  }
}

void Simulation::finish(RunResult& out, const radio::BudgetTracker& budget) {
  auto& s = out.summary;
  s.scenario = cfg_.scenario;
  s.seed = cfg_.seed;
  if (!out.metrics.empty()) {
    const auto& last = out.metrics.back();
    s.final_acc_min = last.acc_min;
    s.final_acc_mean = last.acc_mean;
    s.final_acc_max = last.acc_max;
    s.final_label_accuracy = last.label_accuracy;
    s.final_label_coverage = last.label_coverage;
    s.mean_energy_j = budget.energy() / static_cast<double>(out.metrics.size());
  }
  s.total_energy_j = budget.energy();
  s.total_time_s = budget.time();
  s.splits = static_cast<int>(out.splits.size());
  s.first_split_round = out.splits.empty() ? -1 : out.splits.front().round;
  s.final_clusters = static_cast<int>(registry_.active_count());
  for (const auto& m : out.metrics) s.fallbacks += m.fallbacks;
  s.audit = audit_;
  out.clusters_json = registry_.lineage_json();
}

}  // namespace

const char* const kMetricsColumns =
    "round,clusters,stopped_clusters,participants,acc_min,acc_mean,acc_max,label_accuracy,"
    "label_coverage,pseudo_labels,energy_j,time_s,cum_energy_j,cum_time_s,deadline_s,fallbacks,"
    "objective";

RunResult run(const SimConfig& config) {
  config.validate();
  Simulation sim(config);
  return sim.run();
}

}  // namespace cfsl::sim
