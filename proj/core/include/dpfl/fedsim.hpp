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

#ifndef DPFL_FEDSIM_HPP_
#define DPFL_FEDSIM_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dpfl/accountant.hpp"
#include "dpfl/dataset.hpp"
#include "dpfl/dp_optim.hpp"
#include "dpfl/mlp.hpp"
#include "dpfl/trainer.hpp"

namespace dpfl::fed {

// Local differential privacy applied by each client to its own training steps.
struct LdpSpec {
  optim::DpSpec dp;
  privacy::PrivacyBudget budget;
  privacy::Conversion conversion = privacy::Conversion::kClassic;
};

struct RoundConfig {
  std::size_t num_clients = 5;
  double fraction = 1.0;
  std::size_t local_batch = 1024;
  std::size_t local_epochs = 5;
  double learning_rate = 0.003;
  double prox_mu = 0.0;
  std::optional<LdpSpec> ldp;
  std::size_t rounds = 20;
  optim::OptimizerKind optimizer = optim::OptimizerKind::kAdam;
  // Worker threads for client updates within a round; results do not depend on it.
  std::size_t threads = 1;

  void validate() const;
  // m = max(ceil(C K), 1).
  std::size_t clients_per_round() const;
};

struct ClientState {
  std::size_t id = 0;
  data::Dataset shard;
  std::size_t n_k = 0;
  std::optional<privacy::AccountantState> accountant;
  // Local optimizer, created on first selection and kept across rounds.
  std::optional<optim::Optimizer> optimizer;
  bool active = true;
};

struct ClientReport {
  std::size_t id = 0;
  std::uint64_t steps = 0;
  double train_loss = 0.0;
  std::optional<double> epsilon;
  // Halted this round because the next step would exceed the budget.
  bool dropped = false;
  // Returned parameters to the server (took at least one step).
  bool reported = false;
};

struct RoundReport {
  std::size_t round = 0;
  std::vector<std::size_t> selected;
  std::vector<ClientReport> clients;
  std::vector<std::size_t> dropped;
  nn::EvalResult test;
};

struct ServerState {
  nn::MlpModel global;
  std::size_t round = 0;
  std::vector<RoundReport> history;
};

struct WeightedUpdate {
  std::span<const double> params;
  std::size_t n_k = 0;
};

struct ClientUpdateResult {
  nn::MlpModel model;
  ClientReport report;
};

// Disjoint shards of sizes differing by at most one, from a seeded shuffle.
// Each shard keeps its rows in the original dataset order.
std::vector<data::Dataset> partition_iid(const data::Dataset& dataset, std::size_t num_clients,
                                         std::uint64_t seed);

// Uniform subset of min(max(ceil(C K), 1), #active) active client ids, sorted
// ascending. Deterministic in (seed, round).
std::vector<std::size_t> select_clients(std::span<const std::size_t> active_ids,
                                        std::size_t num_clients, double fraction,
                                        std::uint64_t seed, std::size_t round);

// ClientUpdate: E local epochs of minibatch steps starting from `global`. With
// prox_mu > 0 each gradient gains mu (w - w_global). With LDP each step is
// privatized and charged to the client's accountant; when the next step would
// exceed the budget the client stops, keeps its partial work and goes inactive.
ClientUpdateResult client_update(ClientState& client, const nn::MlpModel& global,
                                 const RoundConfig& cfg, std::uint64_t seed, std::size_t round);

// sum_k (n_k / sum n) w_k, summed in the order given.
Vector aggregate_fedavg(std::span<const WeightedUpdate> updates);

std::vector<ClientState> make_clients(std::vector<data::Dataset> shards, const RoundConfig& cfg);

// Select, update (possibly concurrently), aggregate over reporting clients and
// evaluate on `test`. A round with no active client is recorded as empty.
RoundReport run_round(ServerState& server, std::vector<ClientState>& clients,
                      const RoundConfig& cfg, const data::Dataset& test, std::uint64_t seed);

struct FederationResult {
  ServerState server;
  std::vector<ClientState> clients;
};

using RoundCallback =
    std::function<void(const ServerState&, const std::vector<ClientState>&, const RoundReport&)>;

FederationResult run_federation(const RoundConfig& cfg, const nn::MlpConfig& model_config,
                                const data::Dataset& train, const data::Dataset& test,
                                std::uint64_t seed, const RoundCallback& on_round = {});

}  // namespace dpfl::fed

#endif  // DPFL_FEDSIM_HPP_
