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


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
// when any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cfsl/clustering.hpp"
#include "cfsl/datagen.hpp"
#include "cfsl/hfl.hpp"
#include "cfsl/labeling.hpp"
#include "cfsl/nn.hpp"
#include "cfsl/radio.hpp"
#include "cfsl/scheduling.hpp"
#include "cfsl/sim.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace cfsl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Desk-profile runs shared between criteria.
const sim::RunResult& desk_run(const std::string& scenario, std::uint64_t seed) {
  static std::map<std::pair<std::string, std::uint64_t>, std::unique_ptr<sim::RunResult>> cache;
  auto& slot = cache[{scenario, seed}];
  if (!slot) {
    auto c = sim::SimConfig::for_profile("desk");
    c.scenario = scenario;
    c.seed = seed;
    c.checkpoint_every = 0;
    slot = std::make_unique<sim::RunResult>(sim::run(c));
  }
  return *slot;
}

std::shared_ptr<const nn::Layout> flat_layout(std::uint32_t n) {
  return std::make_shared<const nn::Layout>(
      std::vector<nn::Segment>{nn::Segment{0, false, n, 1, 0}});
}

// ---------------------------------------------------------------------------
// C1: cost, labeling and training formulas against straight-line recomputation.

Outcome formula_suite() {
  constexpr int kTrials = 200;
  constexpr double kTol = 1e-12;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> F(1e9, 9e9), Pdbm(-10, 20), Dist(2, 50), Dn(1, 500),
      Cap(1e-29, 1e-27), Beta(0.01, 1.0), Bits(1e4, 1e7), U01(0, 1);
  std::map<std::string, int> failures;
  std::map<std::string, int> checked;
  auto check = [&](const std::string& eq, bool ok) {
    ++checked[eq];
    if (!ok) ++failures[eq];
  };

  for (int t = 0; t < kTrials; ++t) {
    const double dbm = Pdbm(rng);
    const double f = F(rng), p = radio::dbm_to_watt(dbm), d = std::floor(Dn(rng));
    const double cap = Cap(rng), beta = Beta(rng), dist = Dist(rng), bits = Bits(rng);
    const int epochs = 1 + static_cast<int>(rng() % 20);
    const int b = 1 + static_cast<int>(rng() % 64);

    check("updates", static_cast<double>(nn::update_count(static_cast<std::size_t>(d), b, epochs)) ==
                         epochs * oracle::updates_per_epoch(d, b));
    check("t_cmp", oracle::rel_close(radio::comp_time(d, 20, f, epochs),
                                     oracle::t_cmp(epochs, d, 20, f), kTol));
    check("e_cmp", oracle::rel_close(radio::comp_energy(d, 20, f, epochs, cap),
                                     oracle::e_cmp(cap, epochs, f, d, 20), kTol));
    const double g = radio::channel_gain(dist, -35, 2, 4).linear;
    check("dbm", oracle::rel_close(p, oracle::dbm_to_w(dbm), kTol));
    check("gain", oracle::rel_close(g, oracle::path_gain(dist, -35, 2, 4), kTol));
    const double r = radio::data_rate(beta, 10e6, g, p, 1e-8);
    check("rate", oracle::rel_close(r, oracle::rate(beta, 10e6, oracle::path_gain(dist, -35, 2, 4), p, 1e-8),
                                    kTol));
    const auto cc = radio::comm_time_energy(bits, r, p);
    check("t_com", oracle::rel_close(cc.time_s, oracle::t_com(bits, r), kTol));
    check("e_com", oracle::rel_close(cc.energy_j, oracle::e_com(oracle::t_com(bits, r), p), kTol));

    // Round aggregation over random edges, selections and uplinks.
    const int edges = 1 + static_cast<int>(rng() % 3);
    const int n = 1 + static_cast<int>(rng() % 9);
    std::vector<int> edge_of(n), per_edge(edges, 0);
    for (int i = 0; i < n; ++i) per_edge[edge_of[i] = static_cast<int>(rng() % edges)]++;
    std::vector<radio::WorkerCostInput> in;
    std::vector<oracle::OracleWorker> ow;
    for (int i = 0; i < n; ++i) {
      const double fi = F(rng), pi = radio::dbm_to_watt(Pdbm(rng)), di = std::floor(Dn(rng));
      const double dd = Dist(rng), share = 1.0 / per_edge[edge_of[i]];
      radio::WorkerHardware hw{fi, cap, pi, 20};
      in.push_back({i, edge_of[i], di, share, radio::channel_gain(dd, -35, 2, 4).linear, hw});
      ow.push_back({edge_of[i], di, 20, fi, cap, share, oracle::path_gain(dd, -35, 2, 4), pi});
    }
    std::vector<radio::EdgeUplink> ups;
    std::vector<double> ub, ur, upw;
    for (int j = 0; j < edges; ++j) {
      const double ebits = std::floor(Bits(rng)), erate = 1e7 + 1e8 * U01(rng), epw = 0.5 + U01(rng);
      ups.push_back({erate, epw, ebits});
      ub.push_back(ebits);
      ur.push_back(erate);
      upw.push_back(epw);
    }
    const auto rep = radio::round_costs(in, ups, epochs, bits, radio::ChannelParams{});
    const auto ref = oracle::round_totals(ow, edges, epochs, bits, 10e6, 1e-8, ub, ur, upw);
    for (int j = 0; j < edges; ++j) {
      check("edge_time", oracle::rel_close(rep.edges[j].worker_time, ref.edge_time[j], kTol));
      check("edge_energy", oracle::rel_close(rep.edges[j].worker_energy, ref.edge_energy[j], kTol));
    }
    check("round_time", oracle::rel_close(rep.round_time, ref.time, kTol));
    check("round_energy", oracle::rel_close(rep.round_energy, ref.energy, kTol));

    // Confidence gate and top-class label.
    std::vector<double> probs(2 + rng() % 6);
    double z = 0;
    for (auto& v : probs) z += (v = -std::log(U01(rng) + 1e-300));
    for (auto& v : probs) v /= z;
    const double phi = 0.5 + 0.5 * U01(rng);
    const auto top = ssl::top_class(probs);
    std::size_t arg = 0;
    for (std::size_t k = 1; k < probs.size(); ++k)
      if (probs[k] > probs[arg]) arg = k;
    check("gate", ssl::passes_threshold(probs, phi) == (probs[arg] >= phi));
    check("argmax", top.label == static_cast<int>(arg) && top.confidence == probs[arg]);

    // Combined labeled + pseudo objective.
    nn::Architecture arch{3, {4}, 3};
    nn::Mlp m(arch);
    const auto params = m.init(t);
    std::normal_distribution<double> N(0, 1);
    const int nl = 1 + static_cast<int>(rng() % 6), np = static_cast<int>(rng() % 6);
    std::vector<std::vector<double>> xs;
    std::vector<int> ys;
    for (int i = 0; i < nl + np; ++i) {
      xs.push_back({N(rng), N(rng), N(rng)});
      ys.push_back(static_cast<int>(rng() % 3));
    }
    std::vector<nn::Example> lab, pse;
    for (int i = 0; i < nl + np; ++i) (i < nl ? lab : pse).push_back({xs[i], ys[i], 1.0});
    std::vector<double> vals(params.values().begin(), params.values().end());
    auto mean_ce = [&](int from, int to) {
      double s = 0;
      for (int i = from; i < to; ++i) s += -std::log(oracle::mlp_forward({3, 4, 3}, vals, xs[i])[ys[i]]);
      return to > from ? s / (to - from) : 0.0;
    };
    check("combined_loss", oracle::rel_close(m.combined_loss(params, lab, pse),
                                             mean_ce(0, nl) + mean_ce(nl, nl + np), kTol));

    // Effective data size after injection and the resulting computation time.
    data::WorkerDataset w;
    const int dl = 1 + static_cast<int>(rng() % 30), du = 1 + static_cast<int>(rng() % 60);
    for (int i = 0; i < dl; ++i) w.labeled.push_back({i, {0.0}, 0});
    for (int i = 0; i < du; ++i) w.unlabeled.emplace_back(dl + i, std::vector<double>{0.0}, 0);
    std::vector<data::PseudoLabel> acc;
    for (int i = 0; i < du; ++i)
      if (U01(rng) < 0.5) acc.push_back({dl + i, 0, 0.9, 0, 1});
    ssl::inject(w, acc);
    ssl::inject(w, acc);
    const double d_eff = static_cast<double>(w.labeled.size() + w.pseudo.size());
    check("d_eff", d_eff == dl + static_cast<double>(acc.size()));
    check("t_cmp_new", oracle::rel_close(radio::comp_time(d_eff, 20, f, epochs),
                                         oracle::t_cmp(epochs, dl + static_cast<double>(acc.size()), 20, f),
                                         kTol));
  }

  int bad = 0;
  std::string which;
  for (const auto& [eq, n] : failures) {
    bad += n;
    which += " " + eq;
  }
  int min_checked = 1 << 30;
  for (const auto& [eq, n] : checked) min_checked = std::min(min_checked, n);
  Outcome o;
  o.pass = bad == 0 && min_checked >= 100;
  o.detail = std::to_string(checked.size()) + " formulas x >=" + std::to_string(min_checked) +
             " inputs, " + std::to_string(bad) + " mismatches" + which;
  return o;
}

// ---------------------------------------------------------------------------
// C2: backprop against central finite differences.

Outcome gradient_check() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N(0, 1);
  double worst = 0.0;
  for (int net = 0; net < 5; ++net) {
    nn::Architecture a{4 + 3 * net, {5 + 2 * net, 4 + net}, 2 + net};
    if (net % 2) a.hidden.push_back(3 + net);
    nn::Mlp m(a);
    const auto p = m.init(100 + net);
    std::vector<std::vector<double>> xs;
    std::vector<nn::Example> batch;
    for (int i = 0; i < 10; ++i) {
      std::vector<double> x(a.input_dim);
      for (auto& v : x) v = N(rng);
      xs.push_back(x);
    }
    for (int i = 0; i < 10; ++i) batch.push_back({xs[i], static_cast<int>(rng() % a.classes), 1.0});
    const auto g = m.gradient(p, batch);
    for (int k = 0; k < 20; ++k) {
      const std::size_t i = rng() % p.size();
      const double h = 1e-5;
      auto plus = p, minus = p;
      plus[i] += h;
      minus[i] -= h;
      const double fd = (m.loss(plus, batch) - m.loss(minus, batch)) / (2 * h);
      const double err = std::fabs(fd - g[i]) / std::max({std::fabs(fd), std::fabs(g[i]), 1e-7});
      worst = std::max(worst, err);
    }
  }
  return {worst < 1e-4, "100 coordinates over 5 nets, worst relative error " + fmt("%.2e", worst)};
}

// ---------------------------------------------------------------------------
// C3: the first executed split separates the generating distributions.

Outcome clustering_recovery() {
  int ok = 0;
  std::string bad;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto& r = desk_run("BMSPGS", seed);
    if (r.splits.empty()) {
      bad += " s" + std::to_string(seed) + "(no split)";
      continue;
    }
    const int first = r.splits.front().round;
    bool exact = true;
    for (const auto& s : r.splits) {
      if (s.round != first) continue;
      std::set<int> da, db;
      for (int w : s.first) da.insert(r.workers[w].distribution);
      for (int w : s.second) db.insert(r.workers[w].distribution);
      exact = exact && da.size() == 1 && db.size() == 1 && da != db;
    }
    if (exact) ++ok;
    else bad += " s" + std::to_string(seed);
  }
  return {ok >= 9, std::to_string(ok) + "/10 seeds exact" + (bad.empty() ? "" : ", misses:" + bad)};
}

// ---------------------------------------------------------------------------
// C4: bipartition against exhaustive search over all 2^7 splits.

Outcome bipartition_optimality() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(-1, 1);
  int equal = 0;
  for (int t = 0; t < 50; ++t) {
    cluster::SimilarityMatrix m(8);
    std::vector<std::vector<double>> d(8, std::vector<double>(8, 1.0));
    for (int i = 0; i < 8; ++i)
      for (int j = i + 1; j < 8; ++j) {
        const double v = U(rng);
        m.set(i, j, v);
        d[i][j] = d[j][i] = v;
      }
    const auto got = cluster::bipartition(m);
    const auto best = oracle::brute_force_bipartition(d);
    if (got.max_cross_similarity == best.value && got.first == best.first && got.second == best.second)
      ++equal;
  }
  return {equal == 50, std::to_string(equal) + "/50 matrices match the exhaustive optimum"};
}

// ---------------------------------------------------------------------------
// C5: pseudo-labeling lifts final accuracy over the labeled-only baseline.

Outcome ssl_benefit() {
  double ssl = 0.0, lab = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ssl += desk_run("BMSPGS", seed).summary.final_acc_mean / 10.0;
    lab += desk_run("labeled_CFL_greedy", seed).summary.final_acc_mean / 10.0;
  }
  const double gain = 100.0 * (ssl - lab);
  return {gain >= 5.0, "BMSPGS " + fmt("%.4f", ssl) + " vs labeled_CFL_greedy " + fmt("%.4f", lab) +
                           " (" + fmt("%+.2f", gain) + " points, need +5)"};
}

// ---------------------------------------------------------------------------
// C6: accepted sets nest as the threshold rises and oracle precision does not drop.

Outcome threshold_monotonicity() {
  const std::vector<double> phis{0.6, 0.7, 0.8, 0.9};
  bool nested = true;
  double worst_drop = 0.0;
  int fixtures = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    data::DistributionSpec spec;
    const auto ws = data::generate(spec, 4, seed);
    nn::Mlp m(nn::Architecture{spec.dim, {32, 32}, spec.num_classes});
    // Fixture model: a few epochs on one worker's labeled data, so confidence is spread out.
    std::vector<nn::Example> train;
    for (const auto& s : ws[0].data.labeled) train.push_back({s.features, s.label, 1.0});
    nn::TrainOptions opts;
    opts.epochs = 15;
    opts.lr = 0.05;
    opts.shuffle_seed = seed;
    const auto start = m.init(seed);
    const auto theta = start + nn::local_train(m, start, train, opts).delta;
    const ssl::ProbabilityFn model = [&](std::span<const double> x) { return m.forward(theta, x); };
    for (const auto& w : ws) {
      ++fixtures;
      std::set<data::SampleId> prev;
      double prev_prec = -1.0;
      for (std::size_t k = 0; k < phis.size(); ++k) {
        const auto labels = ssl::confident_labels(model, w.data.unlabeled, phis[k], 0, 1);
        std::set<data::SampleId> cur;
        int correct = 0;
        for (const auto& p : labels) {
          cur.insert(p.id);
          correct += data::LabelOracle::true_label(*w.data.find_unlabeled(p.id)) == p.label;
        }
        if (k > 0 && !std::includes(prev.begin(), prev.end(), cur.begin(), cur.end())) nested = false;
        if (!labels.empty()) {
          const double prec = static_cast<double>(correct) / labels.size();
          if (prev_prec >= 0.0) worst_drop = std::max(worst_drop, prev_prec - prec);
          prev_prec = prec;
        }
        prev = cur;
      }
    }
  }
  return {nested && worst_drop <= 0.02,
          std::to_string(fixtures) + " fixtures, inclusion " + (nested ? "exact" : "VIOLATED") +
              ", largest precision drop " + fmt("%.2f", 100 * worst_drop) + " points"};
}

// ---------------------------------------------------------------------------
// C7: energy ordering across selection policies and against HFSL.

Outcome energy_ordering() {
  auto mean_energy = [](const std::string& scn) {
    double e = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) e += desk_run(scn, seed).summary.mean_energy_j / 10.0;
    return e;
  };
  const double g = mean_energy("BMSPGS"), rr = mean_energy("BMSPRR"), rnd = mean_energy("CFSL_random");
  const double hfsl = mean_energy("HFSL");
  bool ok = g < rr && rr < rnd;
  std::string d = "greedy " + fmt("%.6f", g) + " < rr " + fmt("%.6f", rr) + " < random " +
                  fmt("%.6f", rnd) + (ok ? " ok" : " VIOLATED") + "; HFSL " + fmt("%.6f", hfsl);
  std::string above;
  for (const char* scn : {"BMSPGS", "BMSPRR", "BMSTGS", "BMSTRR", "EMSPGS", "EMSPRR", "EMSTGS",
                          "EMSTRR", "CFSL_random"}) {
    const double e = mean_energy(scn);
    if (!(e < hfsl)) above += std::string(" ") + scn + "=" + fmt("%.6f", e);
  }
  if (!above.empty()) {
    ok = false;
    d += "; not below HFSL:" + above;
  } else {
    d += "; all CFSL scenarios below HFSL";
  }
  return {ok, d};
}

// ---------------------------------------------------------------------------
// C8: round-robin fairness after 3 * |cluster| post-stop rounds.

Outcome round_robin_fairness() {
  // Scheduler level: every cluster size, every seed.
  int worst = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t size = 1; size <= 20; ++size) {
      std::vector<int> members;
      std::vector<sched::Candidate> all;
      for (std::size_t i = 0; i < size; ++i) {
        const int w = static_cast<int>(3 * i + seed);
        members.push_back(w);
        all.push_back({w, 0.01 * static_cast<double>(rng() % 100)});
      }
      sched::SelectionState st;
      st.cursor = rng() % size;
      for (std::size_t r = 0; r < 3 * size; ++r) sched::select(members, all, sched::Policy::round_robin, 1, st, rng);
      int lo = 1 << 30, hi = 0;
      for (int w : members) {
        lo = std::min(lo, st.counts[w]);
        hi = std::max(hi, st.counts[w]);
      }
      worst = std::max(worst, hi - lo);
    }
  }

  // Simulation level: stopped clusters of the round-robin scenario, run long enough.
  int clusters = 0, sim_worst = 0;
  std::string missing;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto c = sim::SimConfig::for_profile("desk");
    c.scenario = "BMSPRR";
    c.seed = seed;
    c.rounds = 70;
    c.checkpoint_every = 0;
    const auto r = sim::run(c);
    std::map<int, std::vector<int>> members;
    std::function<void(const nlohmann::json&)> walk = [&](const nlohmann::json& n) {
      members[n["id"].get<int>()] = n["members"].get<std::vector<int>>();
      for (const auto& k : n["children"]) walk(k);
    };
    const auto tree = nlohmann::json::parse(r.clusters_json);
    for (const auto& root : tree["roots"]) walk(root);
    std::map<int, std::vector<const sim::SelectionRow*>> post;
    for (const auto& s : r.selection)
      if (s.policy == "round_robin") post[s.cluster].push_back(&s);
    int seed_clusters = 0;
    for (const auto& [cid, rows] : post) {
      const auto& mem = members.at(cid);
      if (rows.size() < 3 * mem.size()) continue;
      std::map<int, int> counts;
      for (int w : mem) counts[w] = 0;
      for (std::size_t k = 0; k < 3 * mem.size(); ++k)
        for (int w : rows[k]->selected) ++counts[w];
      int lo = 1 << 30, hi = 0;
      for (const auto& [w, n] : counts) {
        lo = std::min(lo, n);
        hi = std::max(hi, n);
      }
      sim_worst = std::max(sim_worst, counts.size() == mem.size() ? hi - lo : 1 << 20);
      ++seed_clusters;
    }
    clusters += seed_clusters;
    if (seed_clusters == 0) missing += " s" + std::to_string(seed);
  }
  const bool ok = worst <= 1 && sim_worst <= 1 && missing.empty();
  return {ok, "scheduler max spread " + std::to_string(worst) + " (200 cases); simulation max spread " +
                  std::to_string(sim_worst) + " over " + std::to_string(clusters) + " stopped clusters" +
                  (missing.empty() ? "" : ", seeds without a qualifying cluster:" + missing)};
}

// ---------------------------------------------------------------------------
// C9: built-in constraint audit over a full sweep.

Outcome constraint_audit() {
  const auto out = fs::temp_directory_path() / "cfsl_acceptance_sweep";
  fs::remove_all(out);
  auto base = sim::SimConfig::for_profile("desk");
  base.checkpoint_every = 0;
  sim::SweepGrid grid;
  grid.phi = {0.6, 0.7, 0.8, 0.9};
  grid.labeled_fraction = {0.05, 0.10, 0.15};
  grid.scenario = sim::scenario_names();
  const auto cells = sim::sweep(base, grid, out.string());
  long checks = 0, violations = 0;
  int failed = 0;
  std::string first_error;
  for (const auto& c : cells) {
    if (!c.ok) {
      ++failed;
      if (first_error.empty()) first_error = c.dir + ": " + c.error;
      continue;
    }
    checks += c.summary.audit.checks;
    violations += c.summary.audit.violations();
  }
  fs::remove_all(out);
  return {failed == 0 && violations == 0 && checks > 0,
          std::to_string(cells.size()) + " runs, " + std::to_string(checks) + " audited constraints, " +
              std::to_string(violations) + " violations, " + std::to_string(failed) + " failed runs" +
              (first_error.empty() ? "" : " (" + first_error + ")")};
}

// ---------------------------------------------------------------------------
// C10: two CLI runs produce byte-identical metrics.csv.

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const auto root = fs::temp_directory_path() / "cfsl_acceptance_det";
  fs::remove_all(root);
  int codes[2];
  for (int k = 0; k < 2; ++k) {
    const std::string cmd = std::string(CFSL_CLI_PATH) + " simulate --profile desk --scenario EMSPRR --seed 3 --out " +
                            (root / ("run" + std::to_string(k))).string() + " > /dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    codes[k] = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  }
  const auto a = slurp(root / "run0" / "metrics.csv");
  const auto b = slurp(root / "run1" / "metrics.csv");
  fs::remove_all(root);
  const bool ok = codes[0] == 0 && codes[1] == 0 && !a.empty() && a == b;
  return {ok, std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "DIFFERENT") +
                  ", exit codes " + std::to_string(codes[0]) + "/" + std::to_string(codes[1])};
}

struct Criterion {
  const char* name;
  double budget_s;
  std::function<Outcome()> fn;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"C1 formula oracles", 5, formula_suite},
      {"C2 gradient check", 10, gradient_check},
      {"C3 clustering recovery", 120, clustering_recovery},
      {"C4 bipartition optimality", 10, bipartition_optimality},
      {"C5 pseudo-labeling benefit", 900, ssl_benefit},
      {"C6 threshold monotonicity", 0, threshold_monotonicity},
      {"C7 energy ordering", 0, energy_ordering},
      {"C8 round-robin fairness", 0, round_robin_fairness},
      {"C9 constraint audit", 0, constraint_audit},
      {"C10 determinism", 0, determinism},
  };
  std::set<std::string> only;
  for (int i = 1; i < argc; ++i) only.insert(argv[i]);

  int failed = 0;
  for (const auto& c : criteria) {
    const std::string id(c.name, std::string(c.name).find(' '));
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += fmt(", over the %.0f s budget", c.budget_s);
    }
    std::printf("%s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
