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

#include "dpfl/trainer.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include <spdlog/spdlog.h>

#include "dpfl/errors.hpp"

namespace dpfl::optim {
namespace {

// Rows per forward/backward chunk; keeps the per-sample gradient matrix small.
constexpr std::size_t kChunk = 128;

}  // namespace

std::string_view to_string(SamplingMode m) {
  return m == SamplingMode::kShuffle ? "shuffle" : "poisson";
}

SamplingMode sampling_from_string(std::string_view s) {
  if (s == "shuffle") return SamplingMode::kShuffle;
  if (s == "poisson") return SamplingMode::kPoisson;
  throw std::invalid_argument("unknown sampling mode '" + std::string(s) + "'");
}

BatchGradient batch_gradient(const nn::MlpModel& model, const data::Dataset& data,
                             std::span<const std::size_t> indices, OptimizerKind kind,
                             const DpSpec* dp, std::size_t lot_size, Rng* noise_rng) {
  const bool priv = is_private(kind);
  if (priv && (dp == nullptr || noise_rng == nullptr)) {
    throw std::invalid_argument("batch_gradient: private optimizer needs a DpSpec and noise stream");
  }
  if (!priv && indices.empty()) throw std::invalid_argument("batch_gradient: empty batch");

  std::vector<std::size_t> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());

  const std::size_t dim = model.parameter_count();
  BatchGradient out;
  out.batch_size = sorted.size();
  Vector sum(priv ? 0 : dim, 0.0);
  std::optional<ClippedSum> clipped;
  if (priv) clipped.emplace(dim, dp->clip_norm);
  double loss_total = 0.0;

  std::vector<nn::Label> labels;
  for (std::size_t start = 0; start < sorted.size(); start += kChunk) {
    const std::size_t stop = std::min(sorted.size(), start + kChunk);
    std::span<const std::size_t> chunk(sorted.data() + start, stop - start);
    const Matrix x = data.features.select_rows(chunk);
    labels.clear();
    for (std::size_t i : chunk) labels.push_back(data.labels[i]);
    const nn::ForwardResult fw = nn::forward(model, x);
    for (double l : nn::cross_entropy(fw.logits, labels).per_sample) loss_total += l;
    const nn::PerSampleGrads grads = nn::backward_per_sample(model, fw.cache, labels);
    if (priv) {
      clipped->add(grads);
    } else {
      for (std::size_t i = 0; i < grads.batch_size; ++i) {
        auto g = grads[i];
        for (std::size_t j = 0; j < dim; ++j) sum[j] += g[j];
      }
    }
  }
  out.mean_loss = sorted.empty() ? 0.0 : loss_total / static_cast<double>(sorted.size());
  if (priv) {
    out.grad = privatize(*clipped, *dp, lot_size, *noise_rng, &out.report);
  } else {
    const double n = static_cast<double>(sorted.size());
    for (double& g : sum) g /= n;
    out.grad = std::move(sum);
  }
  return out;
}

void add_proximal(std::span<double> grad, std::span<const double> w,
                  std::span<const double> anchor, double mu) {
  if (grad.size() != w.size() || w.size() != anchor.size()) {
    throw std::invalid_argument("add_proximal: dimension mismatch");
  }
  if (mu == 0.0) return;
  for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += mu * (w[j] - anchor[j]);
}

Optimizer::Optimizer(OptimizerKind kind, double learning_rate, std::size_t dim)
    : kind_(kind), learning_rate_(learning_rate), adam_(uses_adam(kind) ? dim : 0) {}

void Optimizer::step(nn::MlpModel& model, std::span<const double> grad) {
  switch (kind_) {
    case OptimizerKind::kSgd: sgd_step(model, grad, learning_rate_); break;
    case OptimizerKind::kDpSgd: dp_sgd_step(model, grad, learning_rate_); break;
    case OptimizerKind::kAdam: adam_step(model, adam_, grad, learning_rate_); break;
    case OptimizerKind::kDpAdam: dp_adam_step(model, adam_, grad, learning_rate_); break;
  }
}

std::uint64_t steps_per_epoch(std::size_t n, std::size_t lot_size) {
  if (lot_size == 0) throw std::invalid_argument("lot size must be >= 1");
  return (n + lot_size - 1) / lot_size;
}

CentralResult train_central(nn::MlpModel model, const data::Dataset& train,
                            const data::Dataset& test, const CentralOptions& options,
                            const std::function<void(const EpochReport&)>& on_epoch) {
  options.train.validate();
  const std::size_t n = train.size();
  if (n == 0) throw DataError("train_central: empty training set");
  const std::size_t lot = options.train.lot_size;
  const bool priv = is_private(options.optimizer);
  if (priv && !options.dp) throw std::invalid_argument("train_central: private optimizer needs dp");
  if (priv) options.dp->validate();

  const std::uint64_t per_epoch = steps_per_epoch(n, lot);
  const double q = std::min(1.0, static_cast<double>(lot) / static_cast<double>(n));

  std::optional<privacy::AccountantState> accountant;
  std::uint64_t planned = per_epoch * options.train.epochs;
  if (priv && options.dp->noise_multiplier > 0.0) {
    accountant.emplace(privacy::MechanismParams{q, options.dp->noise_multiplier});
    if (options.budget) {
      planned = privacy::max_steps(accountant->params(), *options.budget, options.conversion,
                                   accountant->single_step().orders);
      if (planned == 0) {
        throw BudgetError("a single step at q=" + std::to_string(q) +
                          " sigma=" + std::to_string(options.dp->noise_multiplier) +
                          " already exceeds epsilon=" + std::to_string(options.budget->epsilon));
      }
    }
  } else if (priv && options.budget) {
    throw BudgetError("sigma = 0 gives no finite privacy guarantee");
  }
  if (planned > options.step_limit) {
    spdlog::warn("planned {} steps exceeds the step limit; truncating to {}", planned,
                 options.step_limit);
    planned = options.step_limit;
  }

  Optimizer opt(options.optimizer, options.train.learning_rate, model.parameter_count());
  Rng noise_rng = make_rng(options.seed, Stream::kNoise);
  const DpSpec* dp = priv ? &*options.dp : nullptr;

  CentralResult result;
  result.planned_steps = planned;
  std::vector<std::size_t> order(n);
  std::vector<std::size_t> batch;
  std::uint64_t steps = 0;
  for (std::size_t epoch = 0; steps < planned; ++epoch) {
    Rng data_rng = make_rng(options.seed, Stream::kShuffle, {epoch});
    std::iota(order.begin(), order.end(), 0);
    if (options.sampling == SamplingMode::kShuffle) std::shuffle(order.begin(), order.end(), data_rng);
    std::bernoulli_distribution include(q);

    std::size_t clipped_steps = 0;
    double clipped_total = 0.0;
    std::vector<double> medians;
    for (std::uint64_t s = 0; s < per_epoch && steps < planned; ++s) {
      batch.clear();
      if (options.sampling == SamplingMode::kShuffle) {
        const std::size_t from = static_cast<std::size_t>(s) * lot;
        const std::size_t to = std::min(n, from + lot);
        batch.assign(order.begin() + static_cast<std::ptrdiff_t>(from),
                     order.begin() + static_cast<std::ptrdiff_t>(to));
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          if (include(data_rng)) batch.push_back(i);
        }
        if (!priv && batch.empty()) {
          ++steps;
          continue;
        }
      }
      BatchGradient g = batch_gradient(model, train, batch, options.optimizer, dp, lot, &noise_rng);
      opt.step(model, g.grad);
      ++steps;
      if (priv) {
        ++clipped_steps;
        clipped_total += g.report.clipped_fraction;
        medians.push_back(g.report.median_pre_clip_norm());
        spdlog::debug("step {} clipped_fraction={:.4f} median_pre_clip_norm={:.6g}", steps,
                      g.report.clipped_fraction, medians.back());
      }
    }

    EpochReport rep;
    rep.epoch = epoch + 1;
    rep.steps = steps;
    rep.train = nn::evaluate_metrics(model, train.features, train.labels);
    rep.test = nn::evaluate_metrics(model, test.features, test.labels);
    if (accountant && options.budget) {
      rep.epsilon = privacy::epsilon_after(*accountant, steps, options.budget->delta,
                                           options.conversion)
                        .epsilon;
    }
    if (clipped_steps > 0) {
      rep.clipped_fraction = clipped_total / static_cast<double>(clipped_steps);
      StepReport tmp;
      tmp.pre_clip_norms = medians;
      rep.median_pre_clip_norm = tmp.median_pre_clip_norm();
    }
    spdlog::info("epoch {} steps={} train_loss={:.4f} test_acc={:.4f}", rep.epoch, rep.steps,
                 rep.train.loss, rep.test.accuracy);
    if (on_epoch) on_epoch(rep);
    result.epochs.push_back(rep);
  }
  result.steps = steps;
  if (!result.epochs.empty()) result.epsilon = result.epochs.back().epsilon;
  result.model = std::move(model);
  return result;
}

}  // namespace dpfl::optim
