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

#include "dpfl/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace dpfl::nn {
namespace {

// Forward passes on large inputs are processed in row chunks to bound memory.
constexpr std::size_t kEvalChunk = 4096;

double activate(Activation a, double z) {
  switch (a) {
    case Activation::kReLU:
      return z > 0.0 ? z : 0.0;
    case Activation::kTanh:
      return std::tanh(z);
  }
  return z;
}

// Derivative expressed through the pre-activation z and activation value h.
double activate_grad(Activation a, double z, double h) {
  switch (a) {
    case Activation::kReLU:
      return z > 0.0 ? 1.0 : 0.0;
    case Activation::kTanh:
      return 1.0 - h * h;
  }
  return 1.0;
}

// out = in * W + b for a single layer.
Matrix affine(const LayerView& layer, const Matrix& in) {
  Matrix out(in.rows(), layer.out_dim);
  for (std::size_t r = 0; r < in.rows(); ++r) {
    auto x = in.row(r);
    auto y = out.row(r);
    std::copy(layer.bias.begin(), layer.bias.end(), y.begin());
    for (std::size_t i = 0; i < layer.in_dim; ++i) {
      const double xi = x[i];
      if (xi == 0.0) continue;
      const double* wrow = layer.weight.data() + i * layer.out_dim;
      for (std::size_t j = 0; j < layer.out_dim; ++j) y[j] += xi * wrow[j];
    }
  }
  return out;
}

std::size_t argmax_row(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < row.size(); ++j) {
    if (row[j] > row[best]) best = j;
  }
  return best;
}

double log_sum_exp(std::span<const double> row) {
  const double m = *std::max_element(row.begin(), row.end());
  double s = 0.0;
  for (double z : row) s += std::exp(z - m);
  return m + std::log(s);
}

void check_labels(std::span<const Label> labels, std::size_t rows, std::size_t classes) {
  if (labels.size() != rows) {
    throw std::invalid_argument("label count " + std::to_string(labels.size()) +
                                " does not match batch rows " + std::to_string(rows));
  }
  for (Label y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= classes) {
      throw std::invalid_argument("label " + std::to_string(y) + " out of range [0, " +
                                  std::to_string(classes) + ")");
    }
  }
}

}  // namespace

std::string_view to_string(Activation a) {
  return a == Activation::kReLU ? "relu" : "tanh";
}

Activation activation_from_string(std::string_view s) {
  if (s == "relu" || s == "ReLU") return Activation::kReLU;
  if (s == "tanh" || s == "Tanh") return Activation::kTanh;
  throw std::invalid_argument("unknown activation '" + std::string(s) + "'");
}

void MlpConfig::validate() const {
  if (input_dim == 0 || output_dim == 0) {
    throw std::invalid_argument("MlpConfig: input and output dims must be >= 1");
  }
  if (hidden_dims.empty()) throw std::invalid_argument("MlpConfig: hidden_dims is empty");
  for (std::size_t h : hidden_dims) {
    if (h == 0) throw std::invalid_argument("MlpConfig: hidden dims must be >= 1");
  }
}

MlpModel::MlpModel(MlpConfig config) : config_(std::move(config)) {
  config_.validate();
  std::size_t in = config_.input_dim;
  std::size_t total = 0;
  auto add_layer = [&](std::size_t out) {
    offsets_.push_back(total);
    total += in * out + out;
    in = out;
  };
  for (std::size_t h : config_.hidden_dims) add_layer(h);
  add_layer(config_.output_dim);
  params_.assign(total, 0.0);
}

LayerView MlpModel::layer(std::size_t l) const {
  const std::size_t in = l == 0 ? config_.input_dim : config_.hidden_dims[l - 1];
  const std::size_t out =
      l < config_.hidden_dims.size() ? config_.hidden_dims[l] : config_.output_dim;
  const double* base = params_.data() + offsets_[l];
  return LayerView{in, out, {base, in * out}, {base + in * out, out}};
}

MlpModel init_model(const MlpConfig& config, std::uint64_t seed) {
  MlpModel model(config);
  Rng rng(seed);
  auto params = model.params();
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    const LayerView view = model.layer(l);
    const double bound = 1.0 / std::sqrt(static_cast<double>(view.in_dim));
    std::uniform_real_distribution<double> dist(-bound, bound);
    const std::size_t off = model.layer_offset(l);
    for (std::size_t k = 0; k < view.weight.size(); ++k) params[off + k] = dist(rng);
  }
  return model;
}

ForwardResult forward(const MlpModel& model, const Matrix& batch) {
  const MlpConfig& cfg = model.config();
  if (batch.cols() != cfg.input_dim) {
    throw std::invalid_argument("forward: batch has " + std::to_string(batch.cols()) +
                                " columns, model expects " + std::to_string(cfg.input_dim));
  }
  ForwardResult result;
  ForwardCache& cache = result.cache;
  cache.activations.push_back(batch);
  const std::size_t n_layers = model.num_layers();
  for (std::size_t l = 0; l < n_layers; ++l) {
    Matrix z = affine(model.layer(l), cache.activations.back());
    if (l + 1 < n_layers) {
      Matrix h = z;
      for (double& v : h.data()) v = activate(cfg.activation, v);
      cache.pre_activations.push_back(std::move(z));
      cache.activations.push_back(std::move(h));
    } else {
      cache.pre_activations.push_back(z);
      cache.activations.push_back(std::move(z));
    }
  }
  result.logits = cache.activations.back();
  return result;
}

Matrix predict_logits(const MlpModel& model, const Matrix& batch) {
  if (batch.cols() != model.config().input_dim) {
    throw std::invalid_argument("predict_logits: feature dimension mismatch");
  }
  const std::size_t n_layers = model.num_layers();
  const Activation act = model.config().activation;
  Matrix out(batch.rows(), model.config().output_dim);
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < batch.rows(); start += kEvalChunk) {
    const std::size_t stop = std::min(batch.rows(), start + kEvalChunk);
    idx.resize(stop - start);
    for (std::size_t i = start; i < stop; ++i) idx[i - start] = i;
    Matrix a = batch.select_rows(idx);
    for (std::size_t l = 0; l < n_layers; ++l) {
      a = affine(model.layer(l), a);
      if (l + 1 < n_layers) {
        for (double& v : a.data()) v = activate(act, v);
      }
    }
    for (std::size_t i = start; i < stop; ++i) {
      auto src = a.row(i - start);
      std::copy(src.begin(), src.end(), out.row(i).begin());
    }
  }
  return out;
}

Matrix softmax(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto z = logits.row(r);
    const double lse = log_sum_exp(z);
    auto out = p.row(r);
    for (std::size_t j = 0; j < z.size(); ++j) out[j] = std::exp(z[j] - lse);
  }
  return p;
}

LossResult cross_entropy(const Matrix& logits, std::span<const Label> labels) {
  check_labels(labels, logits.rows(), logits.cols());
  LossResult result;
  result.per_sample.resize(logits.rows());
  double total = 0.0;
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto z = logits.row(r);
    const double loss = log_sum_exp(z) - z[static_cast<std::size_t>(labels[r])];
    result.per_sample[r] = loss;
    total += loss;
  }
  result.mean_loss = logits.rows() == 0 ? 0.0 : total / static_cast<double>(logits.rows());
  return result;
}

PerSampleGrads backward_per_sample(const MlpModel& model, const ForwardCache& cache,
                                   std::span<const Label> labels) {
  const std::size_t n_layers = model.num_layers();
  if (cache.activations.size() != n_layers + 1 || cache.pre_activations.size() != n_layers) {
    throw std::invalid_argument("backward_per_sample: cache depth does not match model");
  }
  for (std::size_t l = 0; l < n_layers; ++l) {
    const LayerView view = model.layer(l);
    if (cache.activations[l].cols() != view.in_dim ||
        cache.pre_activations[l].cols() != view.out_dim) {
      throw std::invalid_argument("backward_per_sample: cache shapes do not match model");
    }
  }
  const std::size_t batch = cache.batch_size();
  if (batch == 0) throw std::invalid_argument("backward_per_sample: empty batch");
  const Activation act = model.config().activation;
  check_labels(labels, batch, model.config().output_dim);

  PerSampleGrads out;
  out.batch_size = batch;
  out.grads = Matrix(batch, model.parameter_count());

  // d(loss_i)/d(logits_i) = softmax(logits_i) - onehot(y_i), kept per row.
  Matrix delta = softmax(cache.activations.back());
  for (std::size_t r = 0; r < batch; ++r) delta(r, static_cast<std::size_t>(labels[r])) -= 1.0;

  for (std::size_t l = n_layers; l-- > 0;) {
    const LayerView view = model.layer(l);
    const Matrix& input = cache.activations[l];
    const std::size_t off = model.layer_offset(l);
    for (std::size_t r = 0; r < batch; ++r) {
      auto g = out.grads.row(r);
      auto a = input.row(r);
      auto d = delta.row(r);
      double* gw = g.data() + off;
      for (std::size_t i = 0; i < view.in_dim; ++i) {
        const double ai = a[i];
        double* gw_row = gw + i * view.out_dim;
        for (std::size_t j = 0; j < view.out_dim; ++j) gw_row[j] = ai * d[j];
      }
      double* gb = gw + view.in_dim * view.out_dim;
      std::copy(d.begin(), d.end(), gb);
    }
    if (l == 0) break;
    // Propagate through W^T and the previous layer's activation derivative.
    const Matrix& z_prev = cache.pre_activations[l - 1];
    const Matrix& h_prev = cache.activations[l];
    Matrix next(batch, view.in_dim);
    for (std::size_t r = 0; r < batch; ++r) {
      auto d = delta.row(r);
      auto nr = next.row(r);
      for (std::size_t i = 0; i < view.in_dim; ++i) {
        const double* wrow = view.weight.data() + i * view.out_dim;
        double s = 0.0;
        for (std::size_t j = 0; j < view.out_dim; ++j) s += wrow[j] * d[j];
        nr[i] = s * activate_grad(act, z_prev(r, i), h_prev(r, i));
      }
    }
    delta = std::move(next);
  }
  return out;
}

double evaluate(const MlpModel& model, const Matrix& features, std::span<const Label> labels) {
  return evaluate_metrics(model, features, labels).accuracy;
}

EvalResult evaluate_metrics(const MlpModel& model, const Matrix& features,
                            std::span<const Label> labels) {
  if (features.rows() == 0) throw std::invalid_argument("evaluate: empty dataset");
  const Matrix logits = predict_logits(model, features);
  const LossResult loss = cross_entropy(logits, labels);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    if (argmax_row(logits.row(r)) == static_cast<std::size_t>(labels[r])) ++correct;
  }
  return {loss.mean_loss, static_cast<double>(correct) / static_cast<double>(logits.rows())};
}

Vector flatten_params(const MlpModel& model) {
  auto p = model.params();
  return Vector(p.begin(), p.end());
}

MlpModel unflatten_params(const MlpModel& shape, std::span<const double> params) {
  if (params.size() != shape.parameter_count()) {
    throw std::invalid_argument("unflatten_params: expected " +
                                std::to_string(shape.parameter_count()) + " values, got " +
                                std::to_string(params.size()));
  }
  MlpModel out = shape;
  std::copy(params.begin(), params.end(), out.params().begin());
  return out;
}

}  // namespace dpfl::nn
