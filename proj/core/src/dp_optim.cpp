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

#include "dpfl/dp_optim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace dpfl::optim {

void DpSpec::validate() const {
  if (!(clip_norm > 0.0)) throw std::invalid_argument("DpSpec: clip norm S must be > 0");
  if (!(noise_multiplier >= 0.0) || !std::isfinite(noise_multiplier)) {
    throw std::invalid_argument("DpSpec: noise multiplier sigma must be finite and >= 0");
  }
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning rate must be > 0");
  if (lot_size == 0) throw std::invalid_argument("TrainConfig: lot size must be >= 1");
}

double StepReport::median_pre_clip_norm() const {
  if (pre_clip_norms.empty()) return 0.0;
  std::vector<double> v = pre_clip_norms;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double hi = v[mid];
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

std::string_view to_string(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::kSgd: return "sgd";
    case OptimizerKind::kAdam: return "adam";
    case OptimizerKind::kDpSgd: return "dp-sgd";
    case OptimizerKind::kDpAdam: return "dp-adam";
  }
  return "?";
}

OptimizerKind optimizer_from_string(std::string_view s) {
  if (s == "sgd") return OptimizerKind::kSgd;
  if (s == "adam") return OptimizerKind::kAdam;
  if (s == "dp-sgd") return OptimizerKind::kDpSgd;
  if (s == "dp-adam") return OptimizerKind::kDpAdam;
  throw std::invalid_argument("unknown optimizer '" + std::string(s) + "'");
}

Vector clip_gradient(std::span<const double> g, double clip_norm) {
  if (!(clip_norm > 0.0)) throw std::invalid_argument("clip_gradient: S must be > 0");
  for (double x : g) {
    if (!std::isfinite(x)) throw std::invalid_argument("clip_gradient: non-finite gradient");
  }
  Vector out(g.begin(), g.end());
  const double ratio = l2_norm(g) / clip_norm;
  if (ratio > 1.0) {
    for (double& x : out) x /= ratio;
  }
  return out;
}

ClippedSum::ClippedSum(std::size_t dim, double clip_norm)
    : clip_norm_(clip_norm), sum_(dim, 0.0) {
  if (!(clip_norm > 0.0)) throw std::invalid_argument("ClippedSum: S must be > 0");
}

void ClippedSum::add(std::span<const double> g) {
  if (g.size() != sum_.size()) throw std::invalid_argument("ClippedSum: dimension mismatch");
  for (double x : g) {
    if (!std::isfinite(x)) throw std::invalid_argument("ClippedSum: non-finite gradient");
  }
  const double norm = l2_norm(g);
  const double ratio = norm / clip_norm_;
  norms_.push_back(norm);
  ++count_;
  if (ratio > 1.0) {
    ++clipped_;
    for (std::size_t j = 0; j < g.size(); ++j) sum_[j] += g[j] / ratio;
  } else {
    for (std::size_t j = 0; j < g.size(); ++j) sum_[j] += g[j];
  }
}

void ClippedSum::add(const nn::PerSampleGrads& grads) {
  for (std::size_t i = 0; i < grads.batch_size; ++i) add(grads[i]);
}

Vector privatize(const ClippedSum& clipped, const DpSpec& spec, std::size_t lot_size,
                 Rng& noise_rng, StepReport* report) {
  spec.validate();
  if (lot_size == 0) throw std::invalid_argument("privatize: lot size must be >= 1");
  const std::uint64_t seed = noise_rng();
  Vector out(clipped.sum().begin(), clipped.sum().end());
  if (spec.noise_multiplier > 0.0) {
    Rng step_rng(seed);
    std::normal_distribution<double> gauss(0.0, spec.noise_multiplier * spec.clip_norm);
    for (double& x : out) x += gauss(step_rng);
  }
  const double lot = static_cast<double>(lot_size);
  for (double& x : out) x /= lot;
  if (report != nullptr) {
    report->pre_clip_norms = clipped.pre_clip_norms();
    report->clipped_fraction =
        clipped.count() == 0 ? 0.0
                             : static_cast<double>(clipped.clipped()) /
                                   static_cast<double>(clipped.count());
    report->noise_seed = seed;
    report->grad_norm_after = l2_norm(out);
  }
  return out;
}

Vector noisy_mean(const nn::PerSampleGrads& grads, const DpSpec& spec, std::size_t lot_size,
                  Rng& noise_rng, StepReport* report) {
  if (grads.batch_size == 0) throw std::invalid_argument("noisy_mean: empty batch");
  ClippedSum sum(grads.grads.cols(), spec.clip_norm);
  sum.add(grads);
  return privatize(sum, spec, lot_size, noise_rng, report);
}

Vector mean_gradient(const nn::PerSampleGrads& grads) {
  if (grads.batch_size == 0) throw std::invalid_argument("mean_gradient: empty batch");
  Vector out(grads.grads.cols(), 0.0);
  for (std::size_t i = 0; i < grads.batch_size; ++i) {
    auto g = grads[i];
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += g[j];
  }
  const double n = static_cast<double>(grads.batch_size);
  for (double& x : out) x /= n;
  return out;
}

void sgd_step(std::span<double> params, std::span<const double> grad, double learning_rate) {
  if (params.size() != grad.size()) {
    throw std::invalid_argument("sgd_step: gradient length " + std::to_string(grad.size()) +
                                " != parameter count " + std::to_string(params.size()));
  }
  for (std::size_t j = 0; j < params.size(); ++j) params[j] -= learning_rate * grad[j];
}

void sgd_step(nn::MlpModel& model, std::span<const double> grad, double learning_rate) {
  sgd_step(model.params(), grad, learning_rate);
}

void dp_sgd_step(nn::MlpModel& model, std::span<const double> noisy_grad, double learning_rate) {
  sgd_step(model.params(), noisy_grad, learning_rate);
}

void adam_step(std::span<double> params, AdamState& state, std::span<const double> grad,
               double learning_rate) {
  if (params.size() != grad.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw std::invalid_argument("adam_step: dimension mismatch");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t j = 0; j < params.size(); ++j) {
    const double g = grad[j];
    state.m[j] = state.beta1 * state.m[j] + (1.0 - state.beta1) * g;
    state.v[j] = state.beta2 * state.v[j] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.m[j] / bc1;
    const double v_hat = state.v[j] / bc2;
    params[j] -= learning_rate * m_hat / (std::sqrt(v_hat) + state.eps_hat);
  }
}

void adam_step(nn::MlpModel& model, AdamState& state, std::span<const double> grad,
               double learning_rate) {
  adam_step(model.params(), state, grad, learning_rate);
}

void dp_adam_step(nn::MlpModel& model, AdamState& state, std::span<const double> noisy_grad,
                  double learning_rate) {
  adam_step(model.params(), state, noisy_grad, learning_rate);
}

}  // namespace dpfl::optim
