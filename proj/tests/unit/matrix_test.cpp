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

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "dpfl/matrix.hpp"

namespace dpfl {
namespace {

TEST(Matrix, RowMajorLayout) {
  Matrix m(2, 3, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(m(1, 0), 4.0);
  EXPECT_EQ(m.row(1)[2], 6.0);
}

TEST(Matrix, SelectRowsKeepsRequestedOrder) {
  Matrix m(3, 2, {0, 1, 10, 11, 20, 21});
  const std::size_t idx[] = {2, 0, 2};
  const Matrix s = m.select_rows(idx);
  EXPECT_EQ(s, Matrix(3, 2, {20, 21, 0, 1, 20, 21}));
}

TEST(Matrix, RejectsMismatchedData) {
  EXPECT_THROW(Matrix(2, 2, std::vector<double>{1, 2, 3}), std::invalid_argument);
}

TEST(Matrix, AllFinite) {
  Matrix m(1, 2, {1.0, 2.0});
  EXPECT_TRUE(m.all_finite());
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(m.all_finite());
}

TEST(L2Norm, MatchesPythagorasAndAvoidsOverflow) {
  const double v[] = {3.0, 4.0};
  EXPECT_DOUBLE_EQ(l2_norm(v), 5.0);
  const double big[] = {3e200, 4e200};
  EXPECT_DOUBLE_EQ(l2_norm(big), 5e200);
  const double zero[] = {0.0, 0.0};
  EXPECT_EQ(l2_norm(zero), 0.0);
}

}  // namespace
}  // namespace dpfl
