// Copyright 2026 The fairalloc Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fairalloc/core_model.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fairalloc/errors.hpp"
#include "fairalloc/rng.hpp"
#include "gtest/gtest.h"

namespace fairalloc {
namespace {

DemandTrace OneHotTrace(std::size_t N, std::vector<std::vector<std::int32_t>> rounds) {
  DemandTrace trace(N, rounds.front().size(), FamilyKind::kSharedCache);
  for (auto& r : rounds) trace.push_back(DemandMatrix::one_hot(N, std::move(r)));
  return trace;
}

TEST(FairnessParamsTest, RejectsOutOfRangeValues) {
  FairnessParams p;
  EXPECT_NO_THROW(p.validate());
  p.alpha = 1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.alpha = -0.1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.alpha = 0.5;
  p.delta = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.delta = 1.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.delta = 1.0;
  p.mu = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.mu = 0.5;
  p.weights = {1.0, -1.0};
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(FairnessParamsTest, WeightsDefaultToOnes) {
  FairnessParams p;
  EXPECT_EQ(p.weight_vector(3), (std::vector<double>{1, 1, 1}));
  p.weights = {2.0, 0.5};
  EXPECT_EQ(p.weight(1), 0.5);
  EXPECT_THROW(p.weight_vector(3), std::invalid_argument);
}

TEST(DemandMatrixTest, OneHotHasDenseSemantics) {
  const auto x = DemandMatrix::one_hot(4, {2, 0});
  EXPECT_EQ(x.rows(), 4u);
  EXPECT_EQ(x.cols(), 2u);
  EXPECT_EQ(x.at(2, 0), 1.0);
  EXPECT_EQ(x.at(1, 0), 0.0);
  EXPECT_EQ(x.at(0, 1), 1.0);
  EXPECT_EQ(x.l1_norm(0), 1.0);
  const auto d = DemandMatrix::dense(4, 2, {0, 0, 1, 0, 1, 0, 0, 0});
  EXPECT_EQ(x, d);
  EXPECT_THROW(DemandMatrix::one_hot(4, {4}), DataError);
  EXPECT_THROW(DemandMatrix::dense(2, 1, {0.5, -0.1}), DataError);
  EXPECT_THROW(DemandMatrix::dense(2, 1, {0.5}), DataError);
}

TEST(DemandTraceTest, RejectsShapeChangesAndSlicesPrefixes) {
  auto trace = OneHotTrace(3, {{0, 1}, {1, 2}, {2, 0}});
  EXPECT_THROW(trace.push_back(DemandMatrix::one_hot(4, {0, 1})), DataError);
  EXPECT_THROW(trace.push_back(DemandMatrix::one_hot(3, {0})), DataError);
  const auto p = trace.prefix(2);
  EXPECT_EQ(p.horizon(), 2u);
  EXPECT_EQ(p[1], trace[1]);
  EXPECT_THROW(trace.prefix(4), std::out_of_range);
}

TEST(ValidateTraceTest, OneHotTraceHasNoViolations) {
  const auto trace = OneHotTrace(5, {{0, 4}, {3, 3}, {1, 2}});
  EXPECT_TRUE(validate_trace(trace, FairnessParams{}).empty());
}

TEST(ValidateTraceTest, ZeroColumnViolatesLowerBound) {
  DemandTrace trace(2, 2, FamilyKind::kSharedCache);
  trace.push_back(DemandMatrix::one_hot(2, {0, 1}));
  trace.push_back(DemandMatrix::dense(2, 2, {0.5, 0.5, 0.0, 0.0}));
  FairnessParams p;
  p.delta = 0.1;
  const auto v = validate_trace(trace, p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].round, 1u);
  ASSERT_TRUE(v[0].agent.has_value());
  EXPECT_EQ(*v[0].agent, 1u);
  EXPECT_NE(v[0].message.find("round 2 agent 2"), std::string::npos);
}

TEST(ValidateTraceTest, ColumnAboveOneViolatesUpperBound) {
  DemandTrace trace(2, 1, FamilyKind::kSharedCache);
  trace.push_back(DemandMatrix::dense(2, 1, {0.8, 0.5}));
  FairnessParams p;
  p.delta = 0.1;
  const auto v = validate_trace(trace, p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].message.find("exceeds"), std::string::npos);
}

TEST(ValidateTraceTest, EmptyTraceIsReported) {
  DemandTrace trace(2, 1, FamilyKind::kSharedCache);
  EXPECT_EQ(validate_trace(trace, FairnessParams{}).size(), 1u);
}

TEST(AccrueTest, UnitInnerProducts) {
  const auto s = accrue(RewardState::initial(2), DemandMatrix::one_hot(2, {0, 1}),
                        AllocationMatrix(2, 2, {1, 0, 0, 1}));
  EXPECT_EQ(s.R, (std::vector<double>{2, 2}));
  EXPECT_EQ(s.t, 1u);
}

TEST(AccrueTest, SharedHalfAllocation) {
  const std::vector<double> y{0.5, 0.5};
  const auto s = accrue(RewardState::initial(2), DemandMatrix::one_hot(2, {0, 1}),
                        AllocationMatrix::shared(y, 2));
  EXPECT_EQ(s.R, (std::vector<double>{1.5, 1.5}));
}

TEST(AccrueTest, OrthogonalDemandAddsNothing) {
  RewardState start{{3.0, 1.0}, 0};
  const std::vector<double> y{1.0, 0.0};
  const auto s = accrue(start, DemandMatrix::one_hot(2, {1, 1}), AllocationMatrix::shared(y, 2));
  EXPECT_EQ(s.R, (std::vector<double>{3, 1}));
}

TEST(AccrueTest, DimensionMismatchThrows) {
  EXPECT_THROW(accrue(RewardState::initial(2), DemandMatrix::one_hot(3, {0, 1}),
                      AllocationMatrix(2, 2, {1, 0, 0, 1})),
               DataError);
  EXPECT_THROW(accrue(RewardState::initial(3), DemandMatrix::one_hot(2, {0, 1}),
                      AllocationMatrix(2, 2, {1, 0, 0, 1})),
               DataError);
}

TEST(AccrueProperty, IncrementsInUnitIntervalAndOrderInsensitive) {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t N = 2 + rng.below(5), m = 1 + rng.below(3);
    std::vector<DemandMatrix> xs;
    std::vector<AllocationMatrix> ys;
    for (int t = 0; t < 20; ++t) {
      std::vector<double> e(N * m);
      for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < N; ++j) s += e[i * N + j] = rng.uniform();
        for (std::size_t j = 0; j < N; ++j) e[i * N + j] /= s;
      }
      xs.push_back(DemandMatrix::dense(N, m, e));
      std::vector<double> a(N * m);
      for (double& v : a) v = rng.uniform();
      ys.emplace_back(N, m, a);
    }
    RewardState fwd = RewardState::initial(m), rev = RewardState::initial(m);
    for (int t = 0; t < 20; ++t) {
      const auto before = fwd.R;
      fwd = accrue(fwd, xs[t], ys[t]);
      for (std::size_t i = 0; i < m; ++i) {
        EXPECT_GE(fwd.R[i] - before[i], 0.0);
        EXPECT_LE(fwd.R[i] - before[i], 1.0 + 1e-12);
      }
    }
    for (int t = 19; t >= 0; --t) rev = accrue(rev, xs[t], ys[t]);
    for (std::size_t i = 0; i < m; ++i) EXPECT_NEAR(fwd.R[i], rev.R[i], 1e-12);
  }
}

TEST(FamilyTagTest, RoundTrips) {
  for (auto k : {FamilyKind::kSharedCache, FamilyKind::kJobSimplex, FamilyKind::kBirkhoff}) {
    EXPECT_EQ(parse_family_tag(family_tag(k)), k);
  }
  EXPECT_THROW(parse_family_tag("graph"), DataError);
}

}  // namespace
}  // namespace fairalloc
