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

#ifndef DPFL_DATASET_HPP_
#define DPFL_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dpfl/matrix.hpp"
#include "dpfl/mlp.hpp"

namespace dpfl::data {

using nn::Label;

struct Dataset {
  Matrix features;
  std::vector<Label> labels;
  std::size_t num_classes = 2;
  std::string name;
  // Column names of the features, without the trailing `label`.
  std::vector<std::string> feature_names;

  std::size_t size() const { return labels.size(); }
  std::size_t num_features() const { return features.cols(); }

  // Rows at `indices`, in that order.
  Dataset subset(std::span<const std::size_t> indices) const;

  // Throws DataError when an invariant does not hold.
  void validate() const;
};

struct SplitSpec {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;

  void validate() const;
};

struct SplitResult {
  Dataset train;
  Dataset val;
  Dataset test;
};

struct SyntheticSpec {
  std::size_t n_samples = 10000;
  std::size_t n_features = 10;
  double class_separation = 6.0;
  double noise_std = 1.0;

  void validate() const;
};

// Reads a comma-separated file with a header row whose final column is the
// integer label. Parsing does not depend on the process locale.
Dataset load_csv(const std::filesystem::path& path);
// Writes values in shortest round-trip decimal form.
void save_csv(const Dataset& dataset, const std::filesystem::path& path);

// Seeded shuffle, then contiguous cut into floor(train N) / floor(val N) / rest.
SplitResult split(const Dataset& dataset, const SplitSpec& spec, std::uint64_t seed);

// Two balanced isotropic Gaussian classes whose means differ by
// class_separation along the first axis.
Dataset synth_blobs(const SyntheticSpec& spec, std::uint64_t seed);

// Per-feature z-score statistics fitted on training data only.
struct Normalizer {
  Vector mean;
  Vector scale;
};

Normalizer normalize_fit(const Dataset& train);
Dataset normalize_apply(const Normalizer& normalizer, const Dataset& dataset);

}  // namespace dpfl::data

#endif  // DPFL_DATASET_HPP_
