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

// dpfl: train models, query the privacy accountant and generate synthetic data.
//
// Exit statuses: 0 success, 1 other failure, 2 configuration error, 3 data
// error, 4 privacy budget infeasible.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "dpfl/calculator.hpp"
#include "dpfl/config.hpp"
#include "dpfl/dataset.hpp"
#include "dpfl/errors.hpp"
#include "dpfl/experiment.hpp"
#include "dpfl/log.hpp"

namespace {

enum ExitCode : int { kOk = 0, kOther = 1, kConfig = 2, kData = 3, kBudget = 4 };

struct TrainArgs {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::vector<std::string> overrides;
};

struct AccountantArgs {
  dpfl::exp::AccountantQuery query;
  std::string conversion = "classic";
  bool json = false;
};

struct SynthArgs {
  dpfl::data::SyntheticSpec spec;
  std::uint64_t seed = 0;
  std::filesystem::path out;
};

int run_train(const TrainArgs& args) {
  dpfl::exp::KeyValues kv = dpfl::exp::read_key_values(args.config);
  if (args.seed) kv["seed"] = std::to_string(*args.seed);
  kv = dpfl::exp::with_overrides(std::move(kv), args.overrides);
  const dpfl::exp::ExperimentConfig cfg = dpfl::exp::parse_config(kv);
  const dpfl::exp::ExperimentResult res = dpfl::exp::run_experiment(cfg, args.out);
  const auto& s = res.summary;
  std::cout << "mode\t" << dpfl::exp::to_string(cfg.mode) << "\n";
  std::cout << "steps\t" << res.steps << "\n";
  if (res.sigma) std::cout << "sigma\t" << *res.sigma << "\n";
  if (s.final_test_acc) std::cout << "final_test_acc\t" << *s.final_test_acc << "\n";
  if (s.best_test_acc) std::cout << "best_test_acc\t" << *s.best_test_acc << "\n";
  if (s.final_epsilon) std::cout << "final_epsilon\t" << *s.final_epsilon << "\n";
  return kOk;
}

int run_accountant(AccountantArgs args) {
  args.query.conversion = dpfl::privacy::conversion_from_string(args.conversion);
  const dpfl::exp::AccountantAnswer ans = dpfl::exp::run_accountant_query(args.query);
  if (ans.at_grid_boundary) {
    spdlog::warn("best order {} lies on the edge of the order grid", ans.best_order);
  }
  if (args.json) {
    dpfl::exp::write_answer_json(std::cout, ans);
  } else {
    dpfl::exp::write_answer_tsv(std::cout, ans);
  }
  return kOk;
}

int run_synth(const SynthArgs& args) {
  args.spec.validate();
  dpfl::data::save_csv(dpfl::data::synth_blobs(args.spec, args.seed), args.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  dpfl::configure_logging_from_env();

  CLI::App app{"Differentially private centralized and federated training"};
  app.require_subcommand(1);

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "Run an experiment from a config file");
  train_cmd->add_option("--config", train.config, "key=value config file")->required();
  train_cmd->add_option("--seed", train.seed, "Override the config seed");
  train_cmd->add_option("--out", train.out, "Metrics output (JSON lines)");
  train_cmd->add_option("--set", train.overrides, "Extra key=value overrides");

  AccountantArgs acct;
  CLI::App* acct_cmd =
      app.add_subcommand("accountant", "Privacy accountant: epsilon, max steps or required sigma");
  acct_cmd->add_option("--sigma", acct.query.sigma, "Noise multiplier");
  acct_cmd->add_option("--q", acct.query.q, "Sampling rate");
  acct_cmd->add_option("--batch", acct.query.batch, "Lot size");
  acct_cmd->add_option("--n", acct.query.n, "Dataset size");
  acct_cmd->add_option("--steps", acct.query.steps, "Number of steps");
  acct_cmd->add_option("--epochs", acct.query.epochs, "Epochs (steps = epochs * ceil(n / batch))");
  acct_cmd->add_option("--delta", acct.query.delta, "Target delta")->capture_default_str();
  acct_cmd->add_option("--target-eps", acct.query.target_epsilon, "Target epsilon (inverse queries)");
  acct_cmd->add_option("--conversion", acct.conversion, "RDP to (eps, delta) conversion")
      ->check(CLI::IsMember({"classic", "tight"}))
      ->capture_default_str();
  acct_cmd->add_flag("--json", acct.json, "Print one JSON object instead of TSV");

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Write a two-class Gaussian blobs CSV");
  synth_cmd->add_option("--n-samples", synth.spec.n_samples)->capture_default_str();
  synth_cmd->add_option("--n-features", synth.spec.n_features)->capture_default_str();
  synth_cmd->add_option("--separation", synth.spec.class_separation)->capture_default_str();
  synth_cmd->add_option("--noise", synth.spec.noise_std)->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*train_cmd) return run_train(train);
    if (*acct_cmd) return run_accountant(acct);
    if (*synth_cmd) return run_synth(synth);
  } catch (const dpfl::ConfigError& e) {
    spdlog::error("config error: {}", e.what());
    return kConfig;
  } catch (const dpfl::DataError& e) {
    spdlog::error("data error: {}", e.what());
    return kData;
  } catch (const dpfl::BudgetError& e) {
    spdlog::error("budget infeasible: {}", e.what());
    return kBudget;
  } catch (const std::invalid_argument& e) {
    spdlog::error("invalid argument: {}", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kOther;
  }
  return kOther;
}
