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

#include "dpfl/calculator.hpp"

#include <charconv>
#include <cmath>

#include <nlohmann/json.hpp>

#include "dpfl/errors.hpp"
#include "dpfl/trainer.hpp"

namespace dpfl::exp {
namespace {

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double resolve_q(const AccountantQuery& query) {
  if (query.q) {
    if (query.batch) throw ConfigError("give either q or batch, not both");
    if (!(*query.q > 0.0 && *query.q <= 1.0)) throw ConfigError("q: must lie in (0, 1]");
    return *query.q;
  }
  if (!query.batch || !query.n) throw ConfigError("sampling rate needs q or both batch and n");
  if (*query.batch == 0 || *query.n == 0) throw ConfigError("batch and n must be positive");
  if (*query.batch > *query.n) throw ConfigError("batch: exceeds n");
  return static_cast<double>(*query.batch) / static_cast<double>(*query.n);
}

std::optional<std::uint64_t> resolve_steps(const AccountantQuery& query) {
  if (query.steps) {
    if (query.epochs) throw ConfigError("give either steps or epochs, not both");
    return query.steps;
  }
  if (!query.epochs) return std::nullopt;
  if (!query.batch || !query.n) throw ConfigError("epochs: needs batch and n");
  return *query.epochs * optim::steps_per_epoch(*query.n, *query.batch);
}

}  // namespace

std::string_view to_string(QueryKind k) {
  switch (k) {
    case QueryKind::kEpsilon:
      return "epsilon";
    case QueryKind::kMaxSteps:
      return "max_steps";
    case QueryKind::kSigma:
      return "sigma";
  }
  return "?";
}

AccountantAnswer run_accountant_query(const AccountantQuery& query) {
  if (!(query.delta > 0.0 && query.delta < 1.0)) throw ConfigError("delta: must lie in (0, 1)");
  if (query.sigma && !(*query.sigma > 0.0)) throw ConfigError("sigma: must be positive");
  AccountantAnswer ans;
  ans.q = resolve_q(query);
  ans.delta = query.delta;
  ans.target_epsilon = query.target_epsilon;
  const std::optional<std::uint64_t> steps = resolve_steps(query);

  if (query.target_epsilon) {
    const privacy::PrivacyBudget budget{*query.target_epsilon, query.delta};
    if (!(budget.epsilon > 0.0)) throw ConfigError("target-eps: must be positive");
    if (query.sigma) {
      if (steps) throw ConfigError("target-eps with sigma asks for max steps; drop steps/epochs");
      ans.kind = QueryKind::kMaxSteps;
      ans.sigma = *query.sigma;
      ans.steps = privacy::max_steps({ans.q, ans.sigma}, budget, query.conversion);
      if (ans.steps == 0) throw BudgetError("a single step already exceeds the target epsilon");
    } else {
      if (!steps) throw ConfigError("target-eps without sigma needs steps or epochs");
      ans.kind = QueryKind::kSigma;
      ans.steps = *steps;
      privacy::SigmaSearch search;
      search.conversion = query.conversion;
      ans.sigma = privacy::sigma_for_budget(ans.q, ans.steps, budget, search);
    }
  } else {
    if (!query.sigma) throw ConfigError("forward query needs sigma");
    if (!steps) throw ConfigError("forward query needs steps or epochs");
    ans.kind = QueryKind::kEpsilon;
    ans.sigma = *query.sigma;
    ans.steps = *steps;
  }

  const privacy::AccountantState state({ans.q, ans.sigma});
  const privacy::EpsilonResult eps =
      privacy::epsilon_after(state, ans.steps, query.delta, query.conversion);
  ans.epsilon = eps.epsilon;
  ans.best_order = eps.best_order;
  ans.at_grid_boundary = eps.at_grid_boundary;
  return ans;
}

void write_answer_tsv(std::ostream& out, const AccountantAnswer& a) {
  out << "query\tq\tsigma\tsteps\tdelta\tepsilon\tbest_order\tat_boundary\ttarget_epsilon\n";
  out << to_string(a.kind) << '\t' << fmt_double(a.q) << '\t' << fmt_double(a.sigma) << '\t'
      << a.steps << '\t' << fmt_double(a.delta) << '\t' << fmt_double(a.epsilon) << '\t'
      << fmt_double(a.best_order) << '\t' << (a.at_grid_boundary ? "true" : "false") << '\t'
      << (a.target_epsilon ? fmt_double(*a.target_epsilon) : std::string("-")) << '\n';
}

void write_answer_json(std::ostream& out, const AccountantAnswer& a) {
  nlohmann::ordered_json j;
  j["query"] = to_string(a.kind);
  j["q"] = a.q;
  j["sigma"] = a.sigma;
  j["steps"] = a.steps;
  j["delta"] = a.delta;
  j["epsilon"] = a.epsilon;
  j["best_order"] = a.best_order;
  j["at_boundary"] = a.at_grid_boundary;
  j["target_epsilon"] = a.target_epsilon ? nlohmann::ordered_json(*a.target_epsilon) : nlohmann::ordered_json(nullptr);
  out << j.dump() << '\n';
}

}  // namespace dpfl::exp
