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

#include "dpfl/dataset.hpp"
#include "dpfl/fedsim.hpp"
#include "dpfl/mlp.hpp"

namespace {

using namespace dpfl;

void BM_ClientUpdate(benchmark::State& state) {
  data::SyntheticSpec spec;
  spec.n_samples = 2000;
  spec.n_features = 10;
  const data::Dataset ds = data::synth_blobs(spec, 1);
  fed::RoundConfig cfg;
  cfg.num_clients = 1;
  cfg.local_batch = 100;
  cfg.local_epochs = 1;
  if (state.range(0) != 0) {
    cfg.optimizer = optim::OptimizerKind::kDpAdam;
    cfg.ldp = fed::LdpSpec{{4.0, 1.1}, {1e6, 1e-5}};
  }
  nn::MlpConfig mc;
  mc.input_dim = 10;
  mc.hidden_dims = {64, 64, 64};
  mc.output_dim = 2;
  const nn::MlpModel global = nn::init_model(mc, 1);
  std::size_t round = 0;
  for (auto _ : state) {
    state.PauseTiming();
    auto clients = fed::make_clients({ds}, cfg);
    state.ResumeTiming();
    benchmark::DoNotOptimize(fed::client_update(clients[0], global, cfg, 7, round++));
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_ClientUpdate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
