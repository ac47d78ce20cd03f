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

#include "dpfl/fedsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include <spdlog/spdlog.h>

#include "dpfl/errors.hpp"
#include "dpfl/rng.hpp"
#include "dpfl/trainer.hpp"

namespace dpfl::fed {

void RoundConfig::validate() const {
  if (num_clients == 0) throw std::invalid_argument("fed: number of clients K must be >= 1");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("fed: fraction C must lie in (0, 1]");
  if (local_batch == 0) throw std::invalid_argument("fed: local batch B must be >= 1");
  if (local_epochs == 0) throw std::invalid_argument("fed: local epochs E must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("fed: learning rate must be > 0");
  if (!(prox_mu >= 0.0)) throw std::invalid_argument("fed: prox mu must be >= 0");
  if (threads == 0) throw std::invalid_argument("fed: threads must be >= 1");
  if (ldp) {
    ldp->dp.validate();
    ldp->budget.validate();
    if (!(ldp->dp.noise_multiplier > 0.0)) {
      throw std::invalid_argument("fed: LDP needs a positive noise multiplier");
    }
    if (!optim::is_private(optimizer)) {
      throw std::invalid_argument("fed: LDP requires a private optimizer (dp-sgd or dp-adam)");
    }
  } else if (optim::is_private(optimizer)) {
    throw std::invalid_argument("fed: private optimizer requires an LDP section");
  }
}

std::size_t RoundConfig::clients_per_round() const {
  // The slack absorbs products like 0.7 * 10 landing a hair above 7.
  const double m = std::ceil(fraction * static_cast<double>(num_clients) - 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::max(m, 0.0)));
}

std::vector<data::Dataset> partition_iid(const data::Dataset& dataset, std::size_t num_clients,
                                         std::uint64_t seed) {
  const std::size_t n = dataset.size();
  if (num_clients == 0) throw std::invalid_argument("partition_iid: K must be >= 1");
  if (num_clients > n) {
    throw DataError("partition_iid: K=" + std::to_string(num_clients) + " exceeds dataset size " +
                    std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(seed, Stream::kPartition);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<data::Dataset> shards;
  shards.reserve(num_clients);
  const std::size_t base = n / num_clients;
  const std::size_t extra = n % num_clients;
  std::size_t from = 0;
  for (std::size_t k = 0; k < num_clients; ++k) {
    const std::size_t len = base + (k < extra ? 1 : 0);
    std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(from),
                                 order.begin() + static_cast<std::ptrdiff_t>(from + len));
    std::sort(idx.begin(), idx.end());
    shards.push_back(dataset.subset(idx));
    shards.back().name = dataset.name + "/client" + std::to_string(k);
    from += len;
  }
  return shards;
}

std::vector<std::size_t> select_clients(std::span<const std::size_t> active_ids,
                                        std::size_t num_clients, double fraction,
                                        std::uint64_t seed, std::size_t round) {
  if (active_ids.empty()) return {};
  RoundConfig shape;
  shape.num_clients = num_clients;
  shape.fraction = fraction;
  const std::size_t m = std::min(shape.clients_per_round(), active_ids.size());
  std::vector<std::size_t> ids(active_ids.begin(), active_ids.end());
  std::sort(ids.begin(), ids.end());
  Rng rng = make_rng(seed, Stream::kSelect, {round});
  // Partial Fisher-Yates: the first m slots are a uniform m-subset.
  for (std::size_t i = 0; i < m; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, ids.size() - 1);
    std::swap(ids[i], ids[pick(rng)]);
  }
  ids.resize(m);
  std::sort(ids.begin(), ids.end());
  return ids;
}

ClientUpdateResult client_update(ClientState& client, const nn::MlpModel& global,
                                 const RoundConfig& cfg, std::uint64_t seed, std::size_t round) {
  if (!client.active) {
    throw std::logic_error("client_update: client " + std::to_string(client.id) + " is inactive");
  }
  const std::size_t n = client.shard.size();
  if (n == 0) throw DataError("client " + std::to_string(client.id) + ": empty shard");
  if (cfg.ldp && !client.accountant) {
    throw std::logic_error("client_update: LDP client without an accountant");
  }

  ClientUpdateResult result{global, ClientReport{}};
  ClientReport& rep = result.report;
  rep.id = client.id;
  nn::MlpModel& w = result.model;

  if (!client.optimizer) client.optimizer.emplace(cfg.optimizer, cfg.learning_rate, w.parameter_count());
  optim::Optimizer& opt = *client.optimizer;
  Rng shuffle_rng = make_rng(seed, Stream::kClient, {client.id, round});
  Rng noise_rng = make_rng(seed, Stream::kNoise, {client.id, round});
  const optim::DpSpec* dp = cfg.ldp ? &cfg.ldp->dp : nullptr;
  const std::size_t batch_size = cfg.local_batch;

  std::vector<std::size_t> order(n);
  std::vector<std::size_t> batch;
  double loss_total = 0.0;
  bool halted = false;
  for (std::size_t e = 0; e < cfg.local_epochs && !halted; ++e) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t from = 0; from < n; from += batch_size) {
      if (cfg.ldp) {
        const auto next = privacy::epsilon_after(*client.accountant, client.accountant->steps() + 1,
                                                 cfg.ldp->budget.delta, cfg.ldp->conversion);
        if (next.epsilon > cfg.ldp->budget.epsilon) {
          halted = true;
          break;
        }
      }
      const std::size_t to = std::min(n, from + batch_size);
      batch.assign(order.begin() + static_cast<std::ptrdiff_t>(from),
                   order.begin() + static_cast<std::ptrdiff_t>(to));
      optim::BatchGradient g =
          optim::batch_gradient(w, client.shard, batch, cfg.optimizer, dp, batch_size, &noise_rng);
      optim::add_proximal(g.grad, w.params(), global.params(), cfg.prox_mu);
      opt.step(w, g.grad);
      if (cfg.ldp) *client.accountant = privacy::compose(*client.accountant, 1);
      loss_total += g.mean_loss;
      ++rep.steps;
    }
  }
  rep.train_loss = rep.steps == 0 ? 0.0 : loss_total / static_cast<double>(rep.steps);
  rep.reported = rep.steps > 0;
  if (halted) {
    rep.dropped = true;
    client.active = false;
  }
  if (cfg.ldp) {
    rep.epsilon = privacy::to_epsilon(*client.accountant, cfg.ldp->budget.delta,
                                      cfg.ldp->conversion)
                      .epsilon;
  }
  return result;
}

Vector aggregate_fedavg(std::span<const WeightedUpdate> updates) {
  if (updates.empty()) throw std::invalid_argument("aggregate_fedavg: no updates");
  const std::size_t dim = updates.front().params.size();
  double total = 0.0;
  for (const WeightedUpdate& u : updates) {
    if (u.params.size() != dim) throw std::invalid_argument("aggregate_fedavg: length mismatch");
    total += static_cast<double>(u.n_k);
  }
  if (!(total > 0.0)) throw std::invalid_argument("aggregate_fedavg: total weight is zero");
  Vector out(dim, 0.0);
  for (const WeightedUpdate& u : updates) {
    const double weight = static_cast<double>(u.n_k) / total;
    for (std::size_t j = 0; j < dim; ++j) out[j] += weight * u.params[j];
  }
  return out;
}

std::vector<ClientState> make_clients(std::vector<data::Dataset> shards, const RoundConfig& cfg) {
  std::vector<ClientState> clients;
  clients.reserve(shards.size());
  for (std::size_t k = 0; k < shards.size(); ++k) {
    ClientState c;
    c.id = k;
    c.n_k = shards[k].size();
    c.shard = std::move(shards[k]);
    if (cfg.ldp) {
      const double q = std::min(1.0, static_cast<double>(cfg.local_batch) / static_cast<double>(c.n_k));
      c.accountant.emplace(privacy::MechanismParams{q, cfg.ldp->dp.noise_multiplier});
    }
    clients.push_back(std::move(c));
  }
  return clients;
}

RoundReport run_round(ServerState& server, std::vector<ClientState>& clients,
                      const RoundConfig& cfg, const data::Dataset& test, std::uint64_t seed) {
  const std::size_t t = server.round;
  RoundReport report;
  report.round = t + 1;

  std::vector<std::size_t> active;
  for (const ClientState& c : clients) {
    if (c.active) active.push_back(c.id);
  }
  report.selected = select_clients(active, cfg.num_clients, cfg.fraction, seed, t);

  std::vector<std::optional<ClientUpdateResult>> results(report.selected.size());
  std::vector<std::string> errors(report.selected.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < report.selected.size(); i = next++) {
      const std::size_t id = report.selected[i];
      try {
        results[i] = client_update(clients[id], server.global, cfg, seed, t);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const std::size_t n_threads = std::min(cfg.threads, report.selected.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) {
      throw std::runtime_error("client " + std::to_string(report.selected[i]) + ": " + errors[i]);
    }
  }

  std::vector<WeightedUpdate> updates;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const ClientUpdateResult& r = *results[i];
    report.clients.push_back(r.report);
    if (r.report.dropped) report.dropped.push_back(r.report.id);
    if (r.report.reported) updates.push_back({r.model.params(), clients[r.report.id].n_k});
  }
  if (!updates.empty()) {
    const Vector agg = aggregate_fedavg(updates);
    std::copy(agg.begin(), agg.end(), server.global.params().begin());
  }
  report.test = nn::evaluate_metrics(server.global, test.features, test.labels);
  spdlog::info("round {} selected={} reported={} dropped={} test_acc={:.4f}", report.round,
               report.selected.size(), updates.size(), report.dropped.size(), report.test.accuracy);
  server.round = t + 1;
  server.history.push_back(report);
  return report;
}

FederationResult run_federation(const RoundConfig& cfg, const nn::MlpConfig& model_config,
                                const data::Dataset& train, const data::Dataset& test,
                                std::uint64_t seed, const RoundCallback& on_round) {
  cfg.validate();
  FederationResult fr;
  fr.server.global = nn::init_model(model_config, derive_seed(seed, Stream::kInit));
  fr.clients = make_clients(partition_iid(train, cfg.num_clients, seed), cfg);
  for (std::size_t r = 0; r < cfg.rounds; ++r) {
    const RoundReport rep = run_round(fr.server, fr.clients, cfg, test, seed);
    if (on_round) on_round(fr.server, fr.clients, rep);
  }
  return fr;
}

}  // namespace dpfl::fed
