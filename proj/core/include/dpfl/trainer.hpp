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

#ifndef DPFL_TRAINER_HPP_
#define DPFL_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dpfl/accountant.hpp"
#include "dpfl/dataset.hpp"
#include "dpfl/dp_optim.hpp"
#include "dpfl/mlp.hpp"
#include "dpfl/rng.hpp"

namespace dpfl::optim {

enum class SamplingMode { kShuffle, kPoisson };

std::string_view to_string(SamplingMode m);
SamplingMode sampling_from_string(std::string_view s);

struct BatchGradient {
  Vector grad;
  double mean_loss = 0.0;
  std::size_t batch_size = 0;
  StepReport report;
};

// Gradient of the rows `indices` of `data` at `model`. Rows are visited in
// ascending index order so the result depends only on the set of rows.
//
// Non-private kinds return the exact mean gradient. Private kinds clip each
// per-sample gradient to dp->clip_norm, add noise and divide by `lot_size`; an
// empty index set is allowed there (Poisson lots can be empty) and yields
// noise / lot_size.
BatchGradient batch_gradient(const nn::MlpModel& model, const data::Dataset& data,
                             std::span<const std::size_t> indices, OptimizerKind kind,
                             const DpSpec* dp, std::size_t lot_size, Rng* noise_rng);

// Adds mu * (w - anchor) to `grad` (the FedProx proximal gradient).
void add_proximal(std::span<double> grad, std::span<const double> w,
                  std::span<const double> anchor, double mu);

// Owns the optimizer state for one training trajectory.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate, std::size_t dim);

  void step(nn::MlpModel& model, std::span<const double> grad);
  OptimizerKind kind() const { return kind_; }

 private:
  OptimizerKind kind_;
  double learning_rate_;
  AdamState adam_;
};

struct CentralOptions {
  OptimizerKind optimizer = OptimizerKind::kAdam;
  TrainConfig train;
  std::optional<DpSpec> dp;
  // When set for a private optimizer, training runs exactly until the
  // accountant's max_steps for this budget and train.epochs is ignored.
  std::optional<privacy::PrivacyBudget> budget;
  privacy::Conversion conversion = privacy::Conversion::kClassic;
  SamplingMode sampling = SamplingMode::kShuffle;
  std::uint64_t seed = 0;
  std::uint64_t step_limit = 10'000'000;
};

struct EpochReport {
  std::size_t epoch = 0;
  std::uint64_t steps = 0;
  nn::EvalResult train;
  nn::EvalResult test;
  std::optional<double> epsilon;
  double clipped_fraction = 0.0;
  double median_pre_clip_norm = 0.0;
};

struct CentralResult {
  nn::MlpModel model;
  std::uint64_t steps = 0;
  std::uint64_t planned_steps = 0;
  std::optional<double> epsilon;
  std::vector<EpochReport> epochs;
};

// Steps per epoch for N samples and lot size L: ceil(N / L).
std::uint64_t steps_per_epoch(std::size_t n, std::size_t lot_size);

// Centralized training loop. Noise and data order come from separate streams
// derived from options.seed. Throws BudgetError when a private run cannot take
// a single step within budget.
CentralResult train_central(nn::MlpModel model, const data::Dataset& train,
                            const data::Dataset& test, const CentralOptions& options,
                            const std::function<void(const EpochReport&)>& on_epoch = {});

}  // namespace dpfl::optim

#endif  // DPFL_TRAINER_HPP_
