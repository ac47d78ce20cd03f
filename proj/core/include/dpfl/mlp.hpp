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

#ifndef DPFL_MLP_HPP_
#define DPFL_MLP_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dpfl/matrix.hpp"
#include "dpfl/rng.hpp"

namespace dpfl::nn {

using Label = int;

enum class Activation { kReLU, kTanh };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view s);

struct MlpConfig {
  std::size_t input_dim = 1;
  std::vector<std::size_t> hidden_dims = {64, 64, 64};
  std::size_t output_dim = 2;
  Activation activation = Activation::kReLU;

  // Throws std::invalid_argument on zero dims or an empty hidden list.
  void validate() const;

  friend bool operator==(const MlpConfig&, const MlpConfig&) = default;
};

// Read-only view of one dense layer. The weight is in_dim x out_dim, row-major,
// so a layer computes z = a * W + b.
struct LayerView {
  std::size_t in_dim;
  std::size_t out_dim;
  std::span<const double> weight;
  std::span<const double> bias;

  double w(std::size_t i, std::size_t j) const { return weight[i * out_dim + j]; }
};

// Multilayer perceptron with hidden activations and a linear output layer.
//
// Parameters live in one flat vector in canonical order: for each layer in
// order, the weight row-major followed by the bias. Optimizers and aggregators
// operate on that vector directly.
class MlpModel {
 public:
  MlpModel() = default;
  // Zero-initialized model with the shape implied by `config`.
  explicit MlpModel(MlpConfig config);

  const MlpConfig& config() const { return config_; }
  std::size_t num_layers() const { return offsets_.size(); }
  std::size_t parameter_count() const { return params_.size(); }

  LayerView layer(std::size_t l) const;
  // Offset of layer l's weight block within the flat parameter vector.
  std::size_t layer_offset(std::size_t l) const { return offsets_[l]; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  friend bool operator==(const MlpModel&, const MlpModel&) = default;

 private:
  MlpConfig config_;
  std::vector<std::size_t> offsets_;
  Vector params_;
};

// Activations retained by forward for the backward pass. activations[0] is the
// input batch; pre_activations[l] and activations[l + 1] belong to layer l. The
// final activation equals the logits.
struct ForwardCache {
  std::vector<Matrix> pre_activations;
  std::vector<Matrix> activations;

  std::size_t batch_size() const {
    return activations.empty() ? 0 : activations.front().rows();
  }
};

struct ForwardResult {
  Matrix logits;
  ForwardCache cache;
};

struct LossResult {
  double mean_loss = 0.0;
  Vector per_sample;
};

// One flat gradient row per sample.
struct PerSampleGrads {
  std::size_t batch_size = 0;
  Matrix grads;

  std::span<const double> operator[](std::size_t i) const { return grads.row(i); }
  std::span<double> operator[](std::size_t i) { return grads.row(i); }
};

struct EvalResult {
  double loss = 0.0;
  double accuracy = 0.0;
};

MlpModel init_model(const MlpConfig& config, std::uint64_t seed);

ForwardResult forward(const MlpModel& model, const Matrix& batch);
Matrix predict_logits(const MlpModel& model, const Matrix& batch);

Matrix softmax(const Matrix& logits);
LossResult cross_entropy(const Matrix& logits, std::span<const Label> labels);

PerSampleGrads backward_per_sample(const MlpModel& model, const ForwardCache& cache,
                                   std::span<const Label> labels);

// Fraction of rows whose argmax (lowest index on ties) equals the label.
double evaluate(const MlpModel& model, const Matrix& features, std::span<const Label> labels);
// Mean cross-entropy and accuracy in one pass.
EvalResult evaluate_metrics(const MlpModel& model, const Matrix& features,
                            std::span<const Label> labels);

Vector flatten_params(const MlpModel& model);
MlpModel unflatten_params(const MlpModel& shape, std::span<const double> params);

}  // namespace dpfl::nn

#endif  // DPFL_MLP_HPP_
