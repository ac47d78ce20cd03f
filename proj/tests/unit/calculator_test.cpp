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

#include <sstream>

#include <gtest/gtest.h>

#include "dpfl/calculator.hpp"
#include "dpfl/errors.hpp"

namespace dpfl::exp {
namespace {

AccountantQuery anchor_query() {
  AccountantQuery q;
  q.sigma = 0.8;
  q.batch = 2048;
  q.n = 30000;
  q.epochs = 50;
  q.delta = 1e-5;
  return q;
}

TEST(Calculator, ForwardAnchor) {
  const AccountantAnswer a = run_accountant_query(anchor_query());
  EXPECT_EQ(a.kind, QueryKind::kEpsilon);
  EXPECT_EQ(a.steps, 750u);
  EXPECT_DOUBLE_EQ(a.q, 2048.0 / 30000.0);
  EXPECT_NEAR(a.epsilon, 22.59, 0.1 * 22.59);
}

TEST(Calculator, HugeNoiseNearZero) {
  AccountantQuery q = anchor_query();
  q.sigma = 1e6;
  EXPECT_LT(run_accountant_query(q).epsilon, 0.05);
}

TEST(Calculator, InverseSigmaIsForwardVerifiedMinimum) {
  AccountantQuery q = anchor_query();
  q.sigma.reset();
  q.target_epsilon = 8.0;
  const AccountantAnswer a = run_accountant_query(q);
  EXPECT_EQ(a.kind, QueryKind::kSigma);
  EXPECT_LE(a.epsilon, 8.0);
  AccountantQuery lower = anchor_query();
  lower.sigma = a.sigma - 1e-4;
  EXPECT_GT(run_accountant_query(lower).epsilon, 8.0);
}

TEST(Calculator, InverseMaxSteps) {
  AccountantQuery q = anchor_query();
  q.epochs.reset();
  q.target_epsilon = 22.59;
  const AccountantAnswer a = run_accountant_query(q);
  EXPECT_EQ(a.kind, QueryKind::kMaxSteps);
  EXPECT_LE(a.epsilon, 22.59);
  AccountantQuery next = anchor_query();
  next.epochs.reset();
  next.steps = a.steps + 1;
  EXPECT_GT(run_accountant_query(next).epsilon, 22.59);
}

TEST(Calculator, InconsistentQueriesRejected) {
  AccountantQuery q = anchor_query();
  q.q = 0.1;
  EXPECT_THROW(run_accountant_query(q), ConfigError);
  AccountantQuery no_steps = anchor_query();
  no_steps.epochs.reset();
  EXPECT_THROW(run_accountant_query(no_steps), ConfigError);
  AccountantQuery no_sigma = anchor_query();
  no_sigma.sigma.reset();
  EXPECT_THROW(run_accountant_query(no_sigma), ConfigError);
  AccountantQuery big_batch = anchor_query();
  big_batch.batch = 40000;
  EXPECT_THROW(run_accountant_query(big_batch), ConfigError);
}

TEST(Calculator, InfeasibleInverseIsBudgetError) {
  AccountantQuery q;
  q.sigma = 0.3;
  q.q = 1.0;
  q.target_epsilon = 0.01;
  EXPECT_THROW(run_accountant_query(q), BudgetError);
}

TEST(Calculator, RowFormats) {
  const AccountantAnswer a = run_accountant_query(anchor_query());
  std::ostringstream tsv;
  write_answer_tsv(tsv, a);
  const std::string t = tsv.str();
  EXPECT_EQ(t.substr(0, t.find('\n')),
            "query\tq\tsigma\tsteps\tdelta\tepsilon\tbest_order\tat_boundary\ttarget_epsilon");
  EXPECT_NE(t.find("epsilon\t0.06826666666666667\t0.8\t750\t1e-05\t"), std::string::npos) << t;
  std::ostringstream json;
  write_answer_json(json, a);
  EXPECT_EQ(json.str().rfind("{\"query\":\"epsilon\"", 0), 0u) << json.str();
}

}  // namespace
}  // namespace dpfl::exp
