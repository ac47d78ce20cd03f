//
// Copyright 2026 The dpfl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when all pass).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dpfl/accountant.hpp"
#include "dpfl/dataset.hpp"
#include "dpfl/dp_optim.hpp"
#include "dpfl/experiment.hpp"
#include "dpfl/fedsim.hpp"
#include "dpfl/log.hpp"
#include "dpfl/mlp.hpp"
#include "dpfl/trainer.hpp"
#include "oracles.hpp"

namespace {

using namespace dpfl;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double anchor_epsilon(double batch, std::uint64_t epochs) {
  const double n = 30000.0;
  const auto per_epoch = static_cast<std::uint64_t>(std::ceil(n / batch));
  const privacy::AccountantState s({batch / n, 0.8});
  return privacy::epsilon_after(s, per_epoch * epochs, 1e-5).epsilon;
}

Outcome c1_anchor() {
  const auto t0 = Clock::now();
  const double eps = anchor_epsilon(2048, 50);
  const double dt = seconds_since(t0);
  const bool ok = std::abs(eps - 22.59) <= 0.10 * 22.59 && dt < 1.0;
  return {ok, fmt("eps=%.4f target 22.59 +-10%% (%+.2f%%), %.3f s", eps, 100 * (eps / 22.59 - 1), dt)};
}

Outcome c2_batch_consistency() {
  const auto t0 = Clock::now();
  const double a = anchor_epsilon(2048, 50);
  const double b = anchor_epsilon(512, 201);
  const double dt = seconds_since(t0);
  const double rel = std::abs(b - a) / a;
  return {rel <= 0.05 && dt < 1.0,
          fmt("eps(2048,50)=%.4f eps(512,201)=%.4f rel diff %.2f%% (<= 5%%), %.3f s", a, b,
              100 * rel, dt)};
}

Outcome c3_monotonicity() {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> log_q(std::log(1e-4), std::log(1.0));
  std::uniform_real_distribution<double> sig(0.5, 8.0);
  std::uniform_int_distribution<std::uint64_t> steps(1, 50000);
  std::uniform_real_distribution<double> log_delta(std::log(1e-10), std::log(1e-2));
  int violations = 0;
  auto eps = [](double q, double s, std::uint64_t t, double d) {
    return privacy::epsilon_after(privacy::AccountantState({q, s}), t, d).epsilon;
  };
  for (int i = 0; i < 100; ++i) {
    const double q = std::exp(log_q(rng));
    const double s = sig(rng);
    const std::uint64_t t = steps(rng);
    const double d = std::exp(log_delta(rng));
    const double base = eps(q, s, t, d);
    violations += eps(q, s, t + 1 + t / 2, d) < base;
    violations += eps(std::min(1.0, q * 1.5), s, t, d) < base;
    violations += eps(q, s * 1.25, t, d) > base;
    violations += eps(q, s, t, std::min(0.5, d * 10.0)) > base;
  }
  return {violations == 0, fmt("%d violations over 100 points x 4 directions", violations)};
}

Outcome c4_quadrature() {
  double worst = 0.0;
  for (double q : {0.001, 0.01, 0.068, 0.25}) {
    for (double s : {0.8, 1.0, 2.0, 3.0}) {
      for (double a : {2.0, 4.0, 8.0, 16.0, 32.0}) {
        const double lib = privacy::rdp_single_step({q, s}, a);
        const double ref = testing::rdp_by_quadrature(q, s, a);
        worst = std::max(worst, std::abs(lib - ref) / std::abs(ref));
      }
    }
  }
  double worst_closed = 0.0;
  for (double s : {0.5, 0.8, 1.0, 2.0, 3.0}) {
    for (double a : privacy::default_orders()) {
      const double expect = a / (2 * s * s);
      worst_closed = std::max(worst_closed, std::abs(privacy::rdp_single_step({1.0, s}, a) - expect) / expect);
    }
  }
  return {worst < 5e-5 && worst_closed <= 1e-12,
          fmt("max rel err vs quadrature %.2e (< 5e-5); q=1 vs a/(2s^2) %.2e (<= 1e-12)", worst,
              worst_closed)};
}

Outcome c5_gradients() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> width(2, 7);
  double worst = 0.0;
  for (int m = 0; m < 20; ++m) {
    nn::MlpConfig c;
    c.input_dim = width(rng);
    c.hidden_dims = {width(rng), width(rng), width(rng)};
    c.output_dim = 2 + m % 3;
    c.activation = m % 2 == 0 ? nn::Activation::kTanh : nn::Activation::kReLU;
    const nn::MlpModel model = testing::random_model(c, 1000 + m);
    const data::Dataset ds = testing::random_dataset(3, c.input_dim, c.output_dim, 2000 + m);
    const nn::PerSampleGrads g =
        nn::backward_per_sample(model, nn::forward(model, ds.features).cache, ds.labels);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      auto loss = [&](std::span<const double> p) {
        return testing::sample_loss(nn::unflatten_params(model, p), ds.features, ds.labels, i);
      };
      const Vector fd = testing::central_difference(loss, nn::flatten_params(model), 1e-6);
      worst = std::max(worst, testing::max_relative_error(g[i], fd, 1e-4));
    }
  }
  const double dt = seconds_since(t0);
  return {worst < 1e-5 && dt < 10.0,
          fmt("max rel err %.2e over 20 models (< 1e-5), %.2f s", worst, dt)};
}

data::Dataset blobs(std::size_t n, std::size_t d, std::uint64_t seed) {
  data::SyntheticSpec spec;
  spec.n_samples = n;
  spec.n_features = d;
  return data::synth_blobs(spec, seed);
}

nn::MlpConfig mlp(std::size_t in, std::vector<std::size_t> hidden) {
  nn::MlpConfig c;
  c.input_dim = in;
  c.hidden_dims = std::move(hidden);
  c.output_dim = 2;
  return c;
}

Outcome c6_dp_reduction() {
  const data::Dataset train = blobs(960, 5, 6);
  const nn::MlpModel init = nn::init_model(mlp(5, {16, 16}), 6);
  std::string detail;
  bool ok = true;
  for (auto [priv, plain] : {std::pair{optim::OptimizerKind::kDpSgd, optim::OptimizerKind::kSgd},
                             std::pair{optim::OptimizerKind::kDpAdam, optim::OptimizerKind::kAdam}}) {
    optim::CentralOptions o;
    o.train.learning_rate = 0.01;
    o.train.lot_size = 64;
    o.train.epochs = 3;
    o.seed = 77;
    o.optimizer = plain;
    const auto a = optim::train_central(init, train, train, o);
    o.optimizer = priv;
    o.dp = optim::DpSpec{1e9, 0.0};
    const auto b = optim::train_central(init, train, train, o);
    const bool same = a.model == b.model;
    ok = ok && same;
    detail += fmt("%s==%s:%s ", std::string(optim::to_string(priv)).c_str(),
                  std::string(optim::to_string(plain)).c_str(), same ? "bit-identical" : "DIFFER");
  }
  return {ok, detail + "(45 steps each)"};
}

Outcome c7_clipping() {
  // A DP-Adam run driven step by step so every post-clip norm is observed.
  const data::Dataset train = blobs(1000, 6, 8);
  nn::MlpModel model = nn::init_model(mlp(6, {16, 16}), 8);
  const double clip = 0.05;  // small enough that most samples clip
  const optim::DpSpec spec{clip, 1.1};
  const std::size_t lot = 100;
  optim::Optimizer opt(optim::OptimizerKind::kDpAdam, 0.01, model.parameter_count());
  Rng noise = make_rng(8, Stream::kNoise);
  std::vector<std::size_t> order(train.size());
  double worst = 0.0;
  std::size_t checked = 0;
  std::size_t clipped = 0;
  for (std::size_t epoch = 0; epoch < 5; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle = make_rng(8, Stream::kShuffle, {epoch});
    std::shuffle(order.begin(), order.end(), shuffle);
    for (std::size_t from = 0; from < order.size(); from += lot) {
      std::vector<std::size_t> idx(order.begin() + from, order.begin() + std::min(order.size(), from + lot));
      const data::Dataset b = train.subset(idx);
      const auto g = nn::backward_per_sample(model, nn::forward(model, b.features).cache, b.labels);
      optim::ClippedSum sum(model.parameter_count(), clip);
      for (std::size_t i = 0; i < g.batch_size; ++i) {
        const Vector c = optim::clip_gradient(g[i], clip);
        worst = std::max(worst, l2_norm(c) - clip);
        clipped += l2_norm(g[i]) > clip;
        ++checked;
        sum.add(g[i]);
      }
      opt.step(model, optim::privatize(sum, spec, lot, noise));
    }
  }

  // Injected noise after division: std sigma * S / L per coordinate.
  const optim::DpSpec noise_spec{4.0, 0.8};
  const std::size_t noise_lot = 64;
  const double expect = noise_spec.noise_multiplier * noise_spec.clip_norm / noise_lot;
  const optim::ClippedSum zero(10, noise_spec.clip_norm);
  Rng mc = make_rng(99, Stream::kNoise);
  double s1 = 0.0;
  double s2 = 0.0;
  std::size_t draws = 0;
  for (int i = 0; i < 10000; ++i) {
    for (double x : optim::privatize(zero, noise_spec, noise_lot, mc)) {
      s1 += x;
      s2 += x * x;
      ++draws;
    }
  }
  const double mean = s1 / draws;
  const double sd = std::sqrt(s2 / draws - mean * mean);
  const double rel = std::abs(sd / expect - 1.0);
  return {worst <= 1e-12 && rel <= 0.02,
          fmt("max(post-clip norm - S)=%.2e over %zu samples (%zu clipped); noise std %.6f vs "
              "sigma*S/L=%.6f (%.2f%%, <= 2%%) over %zu draws",
              worst, checked, clipped, sd, expect, 100 * rel, draws)};
}

Outcome c8_federated_degenerate() {
  const data::Dataset train = blobs(500, 5, 9);
  const data::Dataset test = blobs(200, 5, 10);
  const nn::MlpConfig mc = mlp(5, {16, 16});
  bool ok = true;
  std::string detail;
  for (auto kind : {optim::OptimizerKind::kSgd, optim::OptimizerKind::kAdam}) {
    fed::RoundConfig rc;
    rc.num_clients = 1;
    rc.fraction = 1.0;
    rc.local_epochs = 1;
    rc.local_batch = train.size();
    rc.learning_rate = 0.05;
    rc.optimizer = kind;
    rc.rounds = 1;
    const auto f = fed::run_federation(rc, mc, train, test, 3);
    optim::CentralOptions o;
    o.optimizer = kind;
    o.train.learning_rate = 0.05;
    o.train.lot_size = train.size();
    o.train.epochs = 1;
    o.seed = 3;
    const auto c = optim::train_central(nn::init_model(mc, derive_seed(3, Stream::kInit)), train, test, o);
    std::size_t diffs = 0;
    for (std::size_t j = 0; j < c.model.parameter_count(); ++j) {
      diffs += f.server.global.params()[j] != c.model.params()[j];
    }
    ok = ok && diffs == 0;
    detail += fmt("%s: %zu/%zu params differ; ", std::string(optim::to_string(kind)).c_str(), diffs,
                  c.model.parameter_count());
  }
  return {ok, detail + "float64 exact"};
}

// Plain FedAvg written directly against the optimizer primitives.
nn::MlpModel reference_fedavg(const fed::RoundConfig& rc, const nn::MlpConfig& mc,
                              const data::Dataset& train, std::uint64_t seed) {
  nn::MlpModel global = nn::init_model(mc, derive_seed(seed, Stream::kInit));
  const auto shards = fed::partition_iid(train, rc.num_clients, seed);
  std::vector<std::size_t> all(rc.num_clients);
  std::iota(all.begin(), all.end(), 0);
  // One optimizer per client, carried across the rounds it is selected in.
  std::vector<optim::Optimizer> opts;
  for (std::size_t k = 0; k < rc.num_clients; ++k) {
    opts.emplace_back(rc.optimizer, rc.learning_rate, global.parameter_count());
  }
  for (std::size_t t = 0; t < rc.rounds; ++t) {
    const auto selected = fed::select_clients(all, rc.num_clients, rc.fraction, seed, t);
    std::vector<nn::MlpModel> locals;
    std::size_t total = 0;
    for (std::size_t id : selected) {
      nn::MlpModel w = global;
      optim::Optimizer& opt = opts[id];
      Rng shuffle = make_rng(seed, Stream::kClient, {id, t});
      const std::size_t n = shards[id].size();
      std::vector<std::size_t> order(n);
      for (std::size_t e = 0; e < rc.local_epochs; ++e) {
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), shuffle);
        for (std::size_t from = 0; from < n; from += rc.local_batch) {
          std::vector<std::size_t> idx(order.begin() + from,
                                       order.begin() + std::min(n, from + rc.local_batch));
          const auto g = optim::batch_gradient(w, shards[id], idx, rc.optimizer, nullptr,
                                               rc.local_batch, nullptr);
          opt.step(w, g.grad);
        }
      }
      locals.push_back(std::move(w));
      total += n;
    }
    Vector agg(global.parameter_count(), 0.0);
    for (std::size_t k = 0; k < selected.size(); ++k) {
      const double weight = static_cast<double>(shards[selected[k]].size()) / static_cast<double>(total);
      for (std::size_t j = 0; j < agg.size(); ++j) agg[j] += weight * locals[k].params()[j];
    }
    std::copy(agg.begin(), agg.end(), global.params().begin());
  }
  return global;
}

Outcome c9_fedprox() {
  const data::Dataset train = blobs(600, 5, 11);
  const data::Dataset test = blobs(100, 5, 12);
  const nn::MlpConfig mc = mlp(5, {12, 12});
  fed::RoundConfig rc;
  rc.num_clients = 5;
  rc.fraction = 0.6;
  rc.local_batch = 32;
  rc.local_epochs = 2;
  rc.learning_rate = 0.01;
  rc.rounds = 4;
  rc.prox_mu = 0.0;
  const auto prox0 = fed::run_federation(rc, mc, train, test, 21);
  const bool same = prox0.server.global == reference_fedavg(rc, mc, train, 21);
  rc.prox_mu = 0.5;
  const bool differs = !(fed::run_federation(rc, mc, train, test, 21).server.global == prox0.server.global);

  // F(w) = w^2 / 2, mu = 2, anchor 1, one step of size 0.1 from w = 1.
  Vector w = {1.0};
  Vector grad = {w[0]};
  const Vector anchor = {1.0};
  optim::add_proximal(grad, w, anchor, 2.0);
  optim::sgd_step(w, grad, 0.1);
  const bool scalar = grad[0] == 1.0 && std::abs(w[0] - 0.9) <= 1e-15;
  return {same && differs && scalar,
          fmt("mu=0 vs reference FedAvg: %s; mu=0.5 changes result: %s; scalar step grad=%.17g "
              "w=%.17g (expect 1, 0.9)",
              same ? "bit-identical" : "DIFFER", differs ? "yes" : "no", grad[0], w[0])};
}

exp::KeyValues desk_config(bool priv) {
  exp::KeyValues kv = {{"mode", priv ? "central-dp" : "central"},
                       {"data.synthetic.n_samples", "10000"},
                       {"data.synthetic.n_features", "10"},
                       {"data.synthetic.separation", "6"},
                       {"data.synthetic.noise_std", "1"},
                       {"train.learning_rate", "0.003"},
                       {"train.lot_size", "400"},
                       {"train.epochs", "50"}};
  if (priv) {
    kv["train.optimizer"] = "dp-adam";
    kv["dp.clip_norm"] = "4";
    kv["dp.delta"] = "1e-5";
    kv["dp.epsilon"] = "12";
  }
  return kv;
}

Outcome c10_desk_learning() {
  const std::vector<std::string> eps_values = {"2.5", "4", "8", "12"};
  const int seeds = 5;
  std::vector<double> np_acc;
  std::map<std::string, std::vector<double>> dp_acc;
  double np_time = 0.0;
  std::string table;
  for (int s = 1; s <= seeds; ++s) {
    exp::KeyValues kv = desk_config(false);
    kv["seed"] = std::to_string(s);
    const auto t0 = Clock::now();
    np_acc.push_back(*exp::run_experiment(exp::parse_config(kv)).summary.final_test_acc);
    np_time = std::max(np_time, seconds_since(t0));
    table += fmt("\n    seed %d: non-private %.4f", s, np_acc.back());
    for (const std::string& e : eps_values) {
      exp::KeyValues dkv = desk_config(true);
      dkv["seed"] = std::to_string(s);
      dkv["dp.epsilon"] = e;
      const auto r = exp::run_experiment(exp::parse_config(dkv));
      dp_acc[e].push_back(*r.summary.final_test_acc);
      table += fmt(" | eps %s %.4f (sigma %.4f)", e.c_str(), dp_acc[e].back(), *r.sigma);
    }
  }
  const bool np_ok = np_acc.front() >= 0.95 && np_time < 60.0;
  const bool dp12_ok = dp_acc["12"].front() >= 0.85;
  bool ordered = true;
  double prev = -1.0;
  std::string medians;
  for (const std::string& e : eps_values) {
    const double m = testing::median(dp_acc[e]);
    ordered = ordered && m >= prev;
    prev = m;
    medians += fmt(" eps%s=%.4f", e.c_str(), m);
  }
  const double np_median = testing::median(np_acc);
  bool np_dominates = true;
  for (const std::string& e : eps_values) np_dominates = np_dominates && np_median >= testing::median(dp_acc[e]);
  return {np_ok && dp12_ok && ordered && np_dominates,
          fmt("non-private acc %.4f in %.1f s (>= 0.95, < 60 s): %s; eps=12 acc %.4f (>= 0.85): %s; "
              "medians non-private=%.4f%s; non-decreasing in eps: %s; non-private >= every DP: %s",
              np_acc.front(), np_time, np_ok ? "ok" : "NO", dp_acc["12"].front(), dp12_ok ? "ok" : "NO",
              np_median, medians.c_str(), ordered ? "ok" : "NO", np_dominates ? "ok" : "NO") +
              table};
}

Outcome c11_ldp_safety() {
  exp::KeyValues kv = {{"mode", "fed-ldp"},
                       {"seed", "4"},
                       {"data.synthetic.n_samples", "3000"},
                       {"model.hidden", "32,32"},
                       {"train.learning_rate", "0.003"},
                       {"dp.epsilon", "4"},
                       {"dp.sigma", "1.0"},
                       {"fed.clients", "5"},
                       {"fed.fraction", "0.7"},
                       {"fed.local_batch", "60"},
                       {"fed.local_epochs", "2"},
                       {"fed.rounds", "12"}};
  const exp::ExperimentResult r = exp::run_experiment(exp::parse_config(kv));
  double worst = 0.0;
  int decreases = 0;
  int rejoined = 0;
  std::set<std::size_t> dropped;
  std::map<std::size_t, double> last;
  for (const exp::MetricRecord& m : r.records) {
    for (std::size_t id : m.selected) rejoined += dropped.count(id) > 0;
    for (const exp::ClientMetric& c : m.clients) {
      worst = std::max(worst, c.epsilon);
      decreases += c.epsilon < last[c.id];
      last[c.id] = c.epsilon;
    }
    for (std::size_t id : m.dropped) dropped.insert(id);
  }
  const bool ok = worst <= 4.0 && decreases == 0 && rejoined == 0 && !dropped.empty();
  return {ok, fmt("max client eps %.4f (<= 4); %zu clients dropped, %d rejoined; %d per-client "
                  "decreases over %zu rounds",
                  worst, dropped.size(), rejoined, decreases, r.records.size())};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome c12_reproducibility() {
  const auto dir = std::filesystem::temp_directory_path();
  bool files_ok = true;
  std::string detail;
  const std::vector<exp::KeyValues> configs = {
      {{"mode", "central-dp"}, {"seed", "2"}, {"data.synthetic.n_samples", "2000"},
       {"model.hidden", "16,16"}, {"train.lot_size", "100"}, {"train.epochs", "3"},
       {"dp.epsilon", "6"}},
      {{"mode", "fed-ldp"}, {"seed", "2"}, {"data.synthetic.n_samples", "2000"},
       {"model.hidden", "16,16"}, {"dp.epsilon", "4"}, {"dp.sigma", "1.2"},
       {"fed.clients", "5"}, {"fed.fraction", "0.7"}, {"fed.local_batch", "50"},
       {"fed.local_epochs", "1"}, {"fed.rounds", "4"}}};
  for (const auto& kv : configs) {
    const auto a = dir / "dpfl_accept_a.jsonl";
    const auto b = dir / "dpfl_accept_b.jsonl";
    exp::run_experiment(exp::parse_config(kv), a);
    exp::run_experiment(exp::parse_config(kv), b);
    const std::string sa = slurp(a);
    const bool same = !sa.empty() && sa == slurp(b);
    files_ok = files_ok && same;
    detail += fmt("%s metrics %s (%zu bytes); ", kv.at("mode").c_str(),
                  same ? "byte-identical" : "DIFFER", sa.size());
    std::filesystem::remove(a);
    std::filesystem::remove(b);
  }

  const data::Dataset train = blobs(1500, 5, 13);
  const data::Dataset test = blobs(300, 5, 14);
  fed::RoundConfig rc;
  rc.num_clients = 6;
  rc.fraction = 1.0;
  rc.local_batch = 50;
  rc.local_epochs = 2;
  rc.learning_rate = 0.003;
  rc.rounds = 3;
  rc.optimizer = optim::OptimizerKind::kDpAdam;
  rc.ldp = fed::LdpSpec{optim::DpSpec{4.0, 1.0}, privacy::PrivacyBudget{8.0, 1e-5}, {}};
  const auto seq = fed::run_federation(rc, mlp(5, {16, 16}), train, test, 5);
  rc.threads = 4;
  const auto par = fed::run_federation(rc, mlp(5, {16, 16}), train, test, 5);
  const bool threads_ok = seq.server.global == par.server.global;
  detail += fmt("4-thread vs sequential federation: %s", threads_ok ? "parameter-identical" : "DIFFER");
  return {files_ok && threads_ok, detail};
}

}  // namespace

int main() {
  configure_logging_from_env();
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"privacy-budget anchor", c1_anchor},
      {"batch-size consistency", c2_batch_consistency},
      {"accountant monotonicity", c3_monotonicity},
      {"accountant oracle equivalence", c4_quadrature},
      {"gradient correctness", c5_gradients},
      {"DP reduction", c6_dp_reduction},
      {"clipping and noise calibration", c7_clipping},
      {"federated degenerate equivalence", c8_federated_degenerate},
      {"FedProx reduction", c9_fedprox},
      {"desk-scale learning", c10_desk_learning},
      {"LDP budget safety", c11_ldp_safety},
      {"reproducibility", c12_reproducibility},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed;
}
