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

#include "dpfl/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <spdlog/spdlog.h>

#include "dpfl/errors.hpp"
#include "dpfl/rng.hpp"
#include "dpfl/trainer.hpp"

namespace dpfl::exp {
namespace {

using Clock = std::chrono::steady_clock;

class Recorder {
 public:
  Recorder(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& path)
      : wall_time_(cfg.wall_time), start_(Clock::now()) {
    if (path) writer_.emplace(*path, to_key_values(cfg));
  }

  void add(MetricRecord r) {
    if (wall_time_) {
      r.wall_time_s = std::chrono::duration<double>(Clock::now() - start_).count();
    }
    if (writer_) writer_->write(r);
    records_.push_back(std::move(r));
  }

  std::vector<MetricRecord> finish(std::uint64_t steps, std::optional<double> sigma,
                                   MetricsSummary& summary) {
    summary = summarize(records_, steps, sigma);
    if (writer_) writer_->finish(summary);
    return std::move(records_);
  }

 private:
  bool wall_time_;
  Clock::time_point start_;
  std::optional<MetricsWriter> writer_;
  std::vector<MetricRecord> records_;
};

}  // namespace

PreparedData prepare_data(const ExperimentConfig& cfg) {
  data::Dataset full = cfg.data.path ? data::load_csv(*cfg.data.path)
                                     : data::synth_blobs(cfg.data.synthetic, cfg.seed);
  full.validate();
  data::SplitResult parts = data::split(full, cfg.data.split, cfg.seed);
  if (!cfg.data.normalize) return {std::move(parts.train), std::move(parts.val), std::move(parts.test)};
  const data::Normalizer norm = data::normalize_fit(parts.train);
  return {data::normalize_apply(norm, parts.train), data::normalize_apply(norm, parts.val),
          data::normalize_apply(norm, parts.test)};
}

nn::MlpConfig model_config(const ExperimentConfig& cfg, const data::Dataset& train) {
  nn::MlpConfig mc;
  mc.input_dim = train.num_features();
  mc.hidden_dims = cfg.hidden_dims;
  mc.output_dim = train.num_classes;
  mc.activation = cfg.activation;
  return mc;
}

double central_sigma(const ExperimentConfig& cfg, std::size_t n_train) {
  if (!cfg.dp) throw ConfigError("dp: section missing");
  if (cfg.dp->sigma) return *cfg.dp->sigma;
  const double q = std::min(1.0, static_cast<double>(cfg.train.lot_size) / static_cast<double>(n_train));
  const std::uint64_t steps = optim::steps_per_epoch(n_train, cfg.train.lot_size) * cfg.train.epochs;
  if (steps == 0) throw ConfigError("dp.sigma: auto calibration needs train.epochs >= 1");
  privacy::SigmaSearch search;
  search.conversion = cfg.dp->conversion;
  return privacy::sigma_for_budget(q, steps, cfg.dp->budget, search);
}

fed::RoundConfig round_config(const ExperimentConfig& cfg, std::size_t n_train) {
  if (!cfg.fed) throw ConfigError("fed: section missing");
  fed::RoundConfig rc;
  rc.num_clients = cfg.fed->clients;
  rc.fraction = cfg.fed->fraction;
  rc.local_batch = cfg.fed->local_batch;
  rc.local_epochs = cfg.fed->local_epochs;
  rc.learning_rate = cfg.train.learning_rate;
  rc.prox_mu = cfg.fed->prox_mu;
  rc.rounds = cfg.fed->rounds;
  rc.optimizer = cfg.optimizer;
  rc.threads = cfg.fed->threads;
  if (cfg.mode == Mode::kFedLdp) {
    fed::LdpSpec ldp;
    ldp.dp.clip_norm = cfg.dp->clip_norm;
    ldp.budget = cfg.dp->budget;
    ldp.conversion = cfg.dp->conversion;
    if (cfg.dp->sigma) {
      ldp.dp.noise_multiplier = *cfg.dp->sigma;
    } else {
      // Calibrate for the smallest shard and its expected participation count.
      if (rc.num_clients > n_train) throw DataError("fed.clients exceeds the training set size");
      const std::size_t n_min = n_train / rc.num_clients;
      const double q = std::min(1.0, static_cast<double>(rc.local_batch) / static_cast<double>(n_min));
      const double share = static_cast<double>(rc.clients_per_round()) /
                           static_cast<double>(rc.num_clients);
      const auto rounds_joined =
          static_cast<std::uint64_t>(std::ceil(static_cast<double>(rc.rounds) * share - 1e-9));
      const std::uint64_t steps =
          rounds_joined * rc.local_epochs * optim::steps_per_epoch(n_min, rc.local_batch);
      if (steps == 0) throw ConfigError("dp.sigma: auto calibration needs fed.rounds >= 1");
      privacy::SigmaSearch search;
      search.conversion = cfg.dp->conversion;
      ldp.dp.noise_multiplier = privacy::sigma_for_budget(q, steps, ldp.budget, search);
    }
    rc.ldp = ldp;
  }
  try {
    rc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return rc;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::optional<std::filesystem::path>& metrics_path) {
  const PreparedData data = prepare_data(cfg);
  const nn::MlpConfig mc = model_config(cfg, data.train);
  Recorder recorder(cfg, metrics_path);
  ExperimentResult result;

  if (!is_federated(cfg.mode)) {
    optim::CentralOptions opts;
    opts.optimizer = cfg.optimizer;
    opts.train = cfg.train;
    opts.sampling = cfg.sampling;
    opts.seed = cfg.seed;
    if (cfg.mode == Mode::kCentralDp) {
      const double sigma = central_sigma(cfg, data.train.size());
      spdlog::info("central-dp: sigma={:.6g} clip={} lot={}", sigma, cfg.dp->clip_norm,
                   cfg.train.lot_size);
      opts.dp = optim::DpSpec{cfg.dp->clip_norm, sigma};
      opts.budget = cfg.dp->budget;
      opts.conversion = cfg.dp->conversion;
      result.sigma = sigma;
    }
    nn::MlpModel model = nn::init_model(mc, derive_seed(cfg.seed, Stream::kInit));
    auto on_epoch = [&](const optim::EpochReport& e) {
      MetricRecord r;
      r.unit = "epoch";
      r.index = e.epoch;
      r.steps = e.steps;
      r.train_loss = e.train.loss;
      r.train_acc = e.train.accuracy;
      r.test_loss = e.test.loss;
      r.test_acc = e.test.accuracy;
      r.epsilon_spent = e.epsilon;
      recorder.add(std::move(r));
    };
    optim::CentralResult cr = optim::train_central(std::move(model), data.train, data.test, opts, on_epoch);
    result.model = std::move(cr.model);
    result.steps = cr.steps;
    result.planned_steps = cr.planned_steps;
  } else {
    const fed::RoundConfig rc = round_config(cfg, data.train.size());
    if (rc.ldp) {
      result.sigma = rc.ldp->dp.noise_multiplier;
      spdlog::info("fed-ldp: sigma={:.6g}", *result.sigma);
    }
    std::uint64_t steps = 0;
    auto on_round = [&](const fed::ServerState& server, const std::vector<fed::ClientState>& clients,
                        const fed::RoundReport& rep) {
      for (const fed::ClientReport& c : rep.clients) steps += c.steps;
      const nn::EvalResult tr = nn::evaluate_metrics(server.global, data.train.features, data.train.labels);
      MetricRecord r;
      r.unit = "round";
      r.index = rep.round;
      r.steps = steps;
      r.train_loss = tr.loss;
      r.train_acc = tr.accuracy;
      r.test_loss = rep.test.loss;
      r.test_acc = rep.test.accuracy;
      r.selected = rep.selected;
      r.dropped = rep.dropped;
      if (rc.ldp) {
        double worst = 0.0;
        for (const fed::ClientState& c : clients) {
          const double eps =
              privacy::to_epsilon(*c.accountant, rc.ldp->budget.delta, rc.ldp->conversion).epsilon;
          r.clients.push_back({c.id, eps, c.active});
          worst = std::max(worst, eps);
        }
        r.epsilon_spent = worst;
      }
      recorder.add(std::move(r));
    };
    fed::FederationResult fr = fed::run_federation(rc, mc, data.train, data.test, cfg.seed, on_round);
    result.model = std::move(fr.server.global);
    result.steps = steps;
  }
  result.records = recorder.finish(result.steps, result.sigma, result.summary);
  return result;
}

}  // namespace dpfl::exp
