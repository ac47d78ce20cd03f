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

#ifndef DPFL_EXPERIMENT_HPP_
#define DPFL_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "dpfl/config.hpp"
#include "dpfl/dataset.hpp"
#include "dpfl/fedsim.hpp"
#include "dpfl/metrics.hpp"
#include "dpfl/mlp.hpp"

namespace dpfl::exp {

struct PreparedData {
  data::Dataset train;
  data::Dataset val;
  data::Dataset test;
};

// Loads or synthesizes the dataset, splits it and (optionally) normalizes all
// splits with statistics from the training split.
PreparedData prepare_data(const ExperimentConfig& cfg);

nn::MlpConfig model_config(const ExperimentConfig& cfg, const data::Dataset& train);

// Noise multiplier that spends the budget over the configured central schedule
// (train.epochs passes at lot size train.lot_size), or the configured value.
double central_sigma(const ExperimentConfig& cfg, std::size_t n_train);

// Round configuration for federated modes; `n_train` sizes the LDP calibration.
fed::RoundConfig round_config(const ExperimentConfig& cfg, std::size_t n_train);

struct ExperimentResult {
  std::vector<MetricRecord> records;
  MetricsSummary summary;
  nn::MlpModel model;
  std::optional<double> sigma;
  std::uint64_t steps = 0;
  // Central private runs: the accountant's max_steps for the budget.
  std::uint64_t planned_steps = 0;
};

// Runs the configured mode end to end. Records stream to `metrics_path` when
// given. Throws ConfigError, DataError or BudgetError for the respective
// failure classes.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::optional<std::filesystem::path>& metrics_path = {});

}  // namespace dpfl::exp

#endif  // DPFL_EXPERIMENT_HPP_
