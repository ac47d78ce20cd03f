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

#include <benchmark/benchmark.h>

#include <random>

#include "dpfl/dp_optim.hpp"
#include "dpfl/mlp.hpp"
#include "dpfl/rng.hpp"

namespace {

using namespace dpfl;

struct Batch {
  Matrix x;
  std::vector<nn::Label> y;
};

Batch make_batch(std::size_t n, std::size_t d) {
  Batch b{Matrix(n, d), std::vector<nn::Label>(n)};
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) b.x(i, j) = g(rng);
    b.y[i] = static_cast<nn::Label>(i % 2);
  }
  return b;
}

nn::MlpModel model(std::size_t width) {
  nn::MlpConfig c;
  c.input_dim = 10;
  c.hidden_dims = {width, width, width};
  c.output_dim = 2;
  return nn::init_model(c, 1);
}

void BM_Forward(benchmark::State& state) {
  const auto m = model(64);
  const Batch b = make_batch(static_cast<std::size_t>(state.range(0)), 10);
  for (auto _ : state) benchmark::DoNotOptimize(nn::forward(m, b.x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Forward)->Arg(64)->Arg(1024);

void BM_BackwardPerSample(benchmark::State& state) {
  const auto m = model(64);
  const Batch b = make_batch(static_cast<std::size_t>(state.range(0)), 10);
  const auto fwd = nn::forward(m, b.x);
  for (auto _ : state) benchmark::DoNotOptimize(nn::backward_per_sample(m, fwd.cache, b.y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BackwardPerSample)->Arg(64)->Arg(1024);

void BM_NoisyMean(benchmark::State& state) {
  const auto m = model(64);
  const Batch b = make_batch(1024, 10);
  const auto grads = nn::backward_per_sample(m, nn::forward(m, b.x).cache, b.y);
  Rng rng = make_rng(1, Stream::kNoise);
  for (auto _ : state) {
    benchmark::DoNotOptimize(optim::noisy_mean(grads, {4.0, 1.1}, 1024, rng, nullptr));
  }
}
BENCHMARK(BM_NoisyMean);

}  // namespace
