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

#ifndef DPFL_CALCULATOR_HPP_
#define DPFL_CALCULATOR_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "dpfl/accountant.hpp"

namespace dpfl::exp {

// Parameters of an accountant query. The sampling rate comes from `q` or from
// batch / n; the step count from `steps` or from epochs * ceil(n / batch).
struct AccountantQuery {
  std::optional<double> sigma;
  std::optional<double> q;
  std::optional<std::uint64_t> batch;
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> steps;
  std::optional<std::uint64_t> epochs;
  double delta = 1e-5;
  std::optional<double> target_epsilon;
  privacy::Conversion conversion = privacy::Conversion::kClassic;
};

enum class QueryKind {
  kEpsilon,   // sigma and steps given
  kMaxSteps,  // sigma and target epsilon given
  kSigma,     // steps and target epsilon given
};

struct AccountantAnswer {
  QueryKind kind = QueryKind::kEpsilon;
  double q = 0.0;
  double sigma = 0.0;
  std::uint64_t steps = 0;
  double delta = 0.0;
  // Epsilon at (q, sigma, steps); for inverse queries the forward re-check.
  double epsilon = 0.0;
  double best_order = 0.0;
  bool at_grid_boundary = false;
  std::optional<double> target_epsilon;
};

std::string_view to_string(QueryKind k);

// Throws ConfigError on an inconsistent parameter set and BudgetError on an
// infeasible inverse query.
AccountantAnswer run_accountant_query(const AccountantQuery& query);

// Tab-separated header plus one row.
void write_answer_tsv(std::ostream& out, const AccountantAnswer& answer);
void write_answer_json(std::ostream& out, const AccountantAnswer& answer);

}  // namespace dpfl::exp

#endif  // DPFL_CALCULATOR_HPP_
