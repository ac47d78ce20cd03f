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

#ifndef DPFL_DP_OPTIM_HPP_
#define DPFL_DP_OPTIM_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dpfl/matrix.hpp"
#include "dpfl/mlp.hpp"
#include "dpfl/rng.hpp"

namespace dpfl::optim {

// Per-sample clipping bound S and noise multiplier sigma. Injected noise has
// per-coordinate standard deviation sigma * S before division by the lot size.
struct DpSpec {
  double clip_norm = 4.0;
  double noise_multiplier = 0.8;

  void validate() const;
};

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t lot_size = 1024;
  std::size_t epochs = 50;

  void validate() const;
};

struct AdamState {
  Vector m;
  Vector v;
  std::uint64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;

  explicit AdamState(std::size_t dim = 0) : m(dim, 0.0), v(dim, 0.0) {}
};

struct StepReport {
  std::vector<double> pre_clip_norms;
  double clipped_fraction = 0.0;
  std::uint64_t noise_seed = 0;
  double grad_norm_after = 0.0;

  double median_pre_clip_norm() const;
};

enum class OptimizerKind { kSgd, kAdam, kDpSgd, kDpAdam };

std::string_view to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(std::string_view s);
inline bool is_private(OptimizerKind k) {
  return k == OptimizerKind::kDpSgd || k == OptimizerKind::kDpAdam;
}
inline bool uses_adam(OptimizerKind k) {
  return k == OptimizerKind::kAdam || k == OptimizerKind::kDpAdam;
}

// g / max(1, |g|_2 / S).
Vector clip_gradient(std::span<const double> g, double clip_norm);

// Running sum of clipped per-sample gradients, accumulated in sample order.
class ClippedSum {
 public:
  ClippedSum(std::size_t dim, double clip_norm);

  void add(const nn::PerSampleGrads& grads);
  void add(std::span<const double> g);

  std::size_t count() const { return count_; }
  std::span<const double> sum() const { return sum_; }
  const std::vector<double>& pre_clip_norms() const { return norms_; }
  std::size_t clipped() const { return clipped_; }

 private:
  double clip_norm_;
  Vector sum_;
  std::vector<double> norms_;
  std::size_t count_ = 0;
  std::size_t clipped_ = 0;
};

// (sum + z) / L with z ~ N(0, (sigma S)^2 I). The per-step noise seed is drawn
// from `noise_rng` and recorded in `report`. sigma == 0 adds nothing.
Vector privatize(const ClippedSum& clipped, const DpSpec& spec, std::size_t lot_size,
                 Rng& noise_rng, StepReport* report = nullptr);

// Clip every row of `grads`, sum and privatize. Throws on an empty batch.
Vector noisy_mean(const nn::PerSampleGrads& grads, const DpSpec& spec, std::size_t lot_size,
                  Rng& noise_rng, StepReport* report = nullptr);

// Exact mean of the per-sample gradient rows, summed in row order.
Vector mean_gradient(const nn::PerSampleGrads& grads);

// theta <- theta - eta * g. The DP variant is the same update applied to an
// already privatized gradient.
void sgd_step(std::span<double> params, std::span<const double> grad, double learning_rate);
void sgd_step(nn::MlpModel& model, std::span<const double> grad, double learning_rate);
void dp_sgd_step(nn::MlpModel& model, std::span<const double> noisy_grad, double learning_rate);

// Bias-corrected Adam update.
void adam_step(std::span<double> params, AdamState& state, std::span<const double> grad,
               double learning_rate);
void adam_step(nn::MlpModel& model, AdamState& state, std::span<const double> grad,
               double learning_rate);
void dp_adam_step(nn::MlpModel& model, AdamState& state, std::span<const double> noisy_grad,
                  double learning_rate);

}  // namespace dpfl::optim

#endif  // DPFL_DP_OPTIM_HPP_
