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

#ifndef DPFL_CONFIG_HPP_
#define DPFL_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dpfl/accountant.hpp"
#include "dpfl/dataset.hpp"
#include "dpfl/dp_optim.hpp"
#include "dpfl/mlp.hpp"
#include "dpfl/trainer.hpp"

namespace dpfl::exp {

// Flat dotted-key configuration, e.g. `train.lot_size=2048`.
using KeyValues = std::map<std::string, std::string, std::less<>>;

enum class Mode { kCentral, kCentralDp, kFed, kFedLdp };

std::string_view to_string(Mode m);
Mode mode_from_string(std::string_view s);
inline bool is_private(Mode m) { return m == Mode::kCentralDp || m == Mode::kFedLdp; }
inline bool is_federated(Mode m) { return m == Mode::kFed || m == Mode::kFedLdp; }

struct DataSection {
  std::optional<std::filesystem::path> path;
  data::SyntheticSpec synthetic;
  data::SplitSpec split;
  bool normalize = true;
};

struct DpSection {
  double clip_norm = 4.0;
  // Unset means calibrate sigma so the budget is spent over the configured
  // schedule.
  std::optional<double> sigma;
  privacy::PrivacyBudget budget;
  privacy::Conversion conversion = privacy::Conversion::kClassic;
};

struct FedSection {
  std::size_t clients = 5;
  double fraction = 1.0;
  std::size_t local_batch = 1024;
  std::size_t local_epochs = 5;
  std::size_t rounds = 20;
  double prox_mu = 0.0;
  std::size_t threads = 1;
};

struct ExperimentConfig {
  Mode mode = Mode::kCentral;
  std::uint64_t seed = 0;
  optim::SamplingMode sampling = optim::SamplingMode::kShuffle;
  DataSection data;
  std::vector<std::size_t> hidden_dims = {64, 64, 64};
  nn::Activation activation = nn::Activation::kReLU;
  optim::OptimizerKind optimizer = optim::OptimizerKind::kAdam;
  optim::TrainConfig train;
  std::optional<DpSection> dp;
  std::optional<FedSection> fed;
  bool wall_time = false;
};

// Parses `key = value` lines; '#' starts a comment. Throws ConfigError with the
// line number on malformed lines or duplicate keys.
KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values(const std::filesystem::path& path);

// Validates keys and values, applies defaults and cross-field rules. Unknown
// keys are rejected; errors name the offending key.
ExperimentConfig parse_config(const KeyValues& kv);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

// Every key with its effective value, defaults included. Round-trips through
// parse_config.
KeyValues to_key_values(const ExperimentConfig& cfg);

// Applies `key=value` overrides on top of `base`.
KeyValues with_overrides(KeyValues base, const std::vector<std::string>& overrides);

// One config per value of `key`, everything else held at `base`.
std::vector<ExperimentConfig> make_sweep(const KeyValues& base, const std::string& key,
                                         const std::vector<std::string>& values);

}  // namespace dpfl::exp

#endif  // DPFL_CONFIG_HPP_
