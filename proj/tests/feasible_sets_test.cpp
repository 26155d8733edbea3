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

#include "fairalloc/feasible_sets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fairalloc/assignment.hpp"
#include "fairalloc/errors.hpp"
#include "fairalloc/harness.hpp"
#include "fairalloc/rng.hpp"
#include "gtest/gtest.h"

namespace fairalloc {
namespace {

void ExpectVecNear(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j], b[j], tol) << "index " << j;
}

// Every vertex of a tiny family.
std::vector<std::vector<double>> Vertices(const FeasibleFamily& f) {
  std::vector<std::vector<double>> out;
  if (f.kind() == FamilyKind::kBirkhoff) {
    const std::size_t m = f.agents();
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::vector<double> y(m * m, 0.0);
      for (std::size_t i = 0; i < m; ++i) y[i * m + perm[i]] = 1.0;
      out.push_back(y);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
  }
  const std::size_t n = f.dim(), k = f.capacity();
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    std::vector<double> y(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) y[j] = (mask >> j) & 1u ? 1.0 : 0.0;
    out.push_back(y);
  }
  return out;
}

TEST(FeasibleFamilyTest, UniformPointAndDiameter) {
  const auto cache = FeasibleFamily::shared_cache(4, 2, 3);
  EXPECT_EQ(cache.uniform_point(), (std::vector<double>{0.5, 0.5, 0.5, 0.5}));
  EXPECT_TRUE(cache.contains(cache.uniform_point()));
  EXPECT_DOUBLE_EQ(FeasibleFamily::shared_cache(20, 8, 2).diameter(), 4.0);
  EXPECT_DOUBLE_EQ(diameter(FeasibleFamily::birkhoff(2)), 2.0);
  EXPECT_DOUBLE_EQ(FeasibleFamily::job_simplex(7).diameter(), std::sqrt(2.0));
  EXPECT_EQ(FeasibleFamily::job_simplex(2).uniform_point(), (std::vector<double>{0.5, 0.5}));
  for (double v : FeasibleFamily::birkhoff(3).uniform_point()) EXPECT_DOUBLE_EQ(v, 1.0 / 3);
  EXPECT_TRUE(FeasibleFamily::birkhoff(3).contains(FeasibleFamily::birkhoff(3).uniform_point()));
}

TEST(FeasibleFamilyTest, DiameterBoundsVertexDistances) {
  for (const auto& f : {FeasibleFamily::shared_cache(5, 2, 1), FeasibleFamily::job_simplex(4),
                        FeasibleFamily::birkhoff(3), FeasibleFamily::birkhoff(4)}) {
    const auto vs = Vertices(f);
    double worst = 0.0;
    for (const auto& a : vs) {
      for (const auto& b : vs) {
        double d = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) d += (a[j] - b[j]) * (a[j] - b[j]);
        worst = std::max(worst, std::sqrt(d));
      }
    }
    EXPECT_LE(worst, f.diameter() + 1e-12) << f.describe();
  }
}

TEST(FeasibleFamilyTest, InvalidParametersThrow) {
  EXPECT_THROW(FeasibleFamily::shared_cache(3, 4, 1), std::invalid_argument);
  EXPECT_THROW(FeasibleFamily::shared_cache(3, 0, 1), std::invalid_argument);
  EXPECT_THROW(FeasibleFamily::job_simplex(0), std::invalid_argument);
  EXPECT_THROW(FeasibleFamily::birkhoff(0), std::invalid_argument);
}

TEST(FeasibleFamilyTest, Contains) {
  const auto cache = FeasibleFamily::shared_cache(3, 2, 1);
  EXPECT_TRUE(cache.contains(std::vector<double>{0.9, 0.8, 0.3}));
  EXPECT_FALSE(cache.contains(std::vector<double>{1.2, 0.8, 0.0}));
  EXPECT_FALSE(cache.contains(std::vector<double>{0.5, 0.5, 0.5}));
  EXPECT_FALSE(cache.contains(std::vector<double>{0.5, 0.5}));
  const auto b = FeasibleFamily::birkhoff(2);
  EXPECT_TRUE(b.contains(std::vector<double>{0.3, 0.7, 0.7, 0.3}));
  EXPECT_FALSE(b.contains(std::vector<double>{0.3, 0.7, 0.6, 0.4}));
}

TEST(ProjectTest, FeasiblePointIsFixed) {
  const auto f = FeasibleFamily::shared_cache(3, 2, 1);
  ExpectVecNear(project(f, std::vector<double>{0.9, 0.8, 0.3}), {0.9, 0.8, 0.3}, 1e-12);
  const auto b = FeasibleFamily::birkhoff(2);
  ExpectVecNear(project(b, std::vector<double>{1, 0, 0, 1}), {1, 0, 0, 1}, 1e-10);
}

TEST(ProjectTest, ClipsToVertex) {
  const auto f = FeasibleFamily::shared_cache(3, 1, 1);
  const std::vector<double> v{2, 0, 0};
  const auto p = project(f, v);
  ExpectVecNear(p, {1, 0, 0}, 1e-12);
  // Grid oracle at 1e-3.
  ExpectVecNear(grid_project_cache(v, 1, 1e-3), {1, 0, 0}, 1e-12);
  // KKT: coordinates strictly inside (0,1) share v - p; clipped ones bound it.
  EXPECT_GE(v[0] - p[0], 0.0 - 1e-12);
}

TEST(ProjectTest, RejectsBadInput) {
  const auto f = FeasibleFamily::job_simplex(3);
  EXPECT_THROW(project(f, std::vector<double>{1, NAN, 0}), DataError);
  EXPECT_THROW(project(f, std::vector<double>{1, 0}), DataError);
}

TEST(ProjectTest, SimplexKnownValue) {
  const auto f = FeasibleFamily::job_simplex(3);
  ExpectVecNear(project(f, std::vector<double>{0.5, 0.5, -1}), {0.5, 0.5, 0.0}, 1e-12);
  ExpectVecNear(project(f, std::vector<double>{1, 0.6, 0}), {0.7, 0.3, 0.0}, 1e-12);
}

class ProjectionProperty : public ::testing::TestWithParam<int> {};

TEST_P(ProjectionProperty, VariationalInequalityAndIdempotence) {
  const std::vector<FeasibleFamily> families{
      FeasibleFamily::shared_cache(5, 2, 1), FeasibleFamily::shared_cache(6, 3, 1),
      FeasibleFamily::job_simplex(4), FeasibleFamily::birkhoff(3), FeasibleFamily::birkhoff(4)};
  const auto& f = families[static_cast<std::size_t>(GetParam())];
  SplitMix64 rng(100 + GetParam());
  std::vector<std::vector<double>> zs(500);
  for (auto& z : zs) z = random_feasible_point(f, rng);
  for (const auto& z : zs) ASSERT_TRUE(f.contains(z));
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(f.dim());
    for (double& x : v) x = 4.0 * rng.uniform() - 1.5;
    const auto a = audit_projection(f, v, zs);
    EXPECT_TRUE(a.feasible);
    EXPECT_LE(a.vi_residual, 1e-7);
    EXPECT_LE(a.sampled_residual, 1e-7);
    ExpectVecNear(project(f, a.projection), a.projection, 1e-9);
  }
}

INSTANTIATE_TEST_SUITE_P(Families, ProjectionProperty, ::testing::Range(0, 5));

TEST(ProjectCappedSimplexTest, MatchesGridOracleAtN3) {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(3), p(3);
    for (double& x : v) x = 3.0 * rng.uniform() - 1.0;
    const std::size_t k = 1 + rng.below(2);
    project_capped_simplex(v, static_cast<double>(k), p);
    const auto g = grid_project_cache(v, k, 1e-3);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(p[j], g[j], 1e-3);
  }
}

TEST(ProjectBirkhoffTest, ReportsConvergence) {
  DykstraReport rep;
  const auto p = project_birkhoff(std::vector<double>{0.9, 0.3, 0.2, 0.6}, 2, &rep);
  EXPECT_GT(rep.sweeps, 0);
  EXPECT_LT(rep.last_change, 1e-10);
  EXPECT_TRUE(FeasibleFamily::birkhoff(2).contains(p));
}

TEST(LmoTest, Examples) {
  ExpectVecNear(lmo(FeasibleFamily::shared_cache(4, 2, 1), std::vector<double>{3, 1, 2, 0}),
                {1, 0, 1, 0}, 0.0);
  ExpectVecNear(lmo(FeasibleFamily::job_simplex(3), std::vector<double>{0, 5, 1}), {0, 1, 0},
                0.0);
  ExpectVecNear(lmo(FeasibleFamily::birkhoff(2), std::vector<double>{1, 0, 0, 1}),
                {1, 0, 0, 1}, 0.0);
}

TEST(LmoTest, TiesGoToLowestIndex) {
  ExpectVecNear(lmo(FeasibleFamily::shared_cache(4, 2, 1), std::vector<double>{1, 2, 2, 2}),
                {0, 1, 1, 0}, 0.0);
  ExpectVecNear(lmo(FeasibleFamily::job_simplex(3), std::vector<double>{4, 4, 4}), {1, 0, 0},
                0.0);
}

TEST(LmoProperty, BeatsEveryVertexAndRandomPoint) {
  SplitMix64 rng(9);
  for (const auto& f : {FeasibleFamily::shared_cache(5, 2, 1), FeasibleFamily::job_simplex(4),
                        FeasibleFamily::birkhoff(3), FeasibleFamily::birkhoff(4)}) {
    const auto vs = Vertices(f);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> g(f.dim());
      for (double& x : g) x = rng.uniform() * 2.0 - 1.0;
      const auto v = lmo(f, g);
      ASSERT_TRUE(f.contains(v));
      const double best = std::inner_product(g.begin(), g.end(), v.begin(), 0.0);
      for (const auto& z : vs) {
        EXPECT_GE(best, std::inner_product(g.begin(), g.end(), z.begin(), 0.0) - 1e-12);
      }
      const auto z = random_feasible_point(f, rng);
      EXPECT_GE(best, std::inner_product(g.begin(), g.end(), z.begin(), 0.0) - 1e-12);
    }
  }
}

TEST(AssignmentTest, MatchesBruteForce) {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(6);
    std::vector<double> w(n * n);
    for (double& x : w) x = std::floor(rng.uniform() * 10.0) - 3.0;
    const auto perm = max_weight_assignment(w, n);
    double got = 0.0;
    for (std::size_t r = 0; r < n; ++r) got += w[r * n + perm[r]];
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    double best = -1e300;
    do {
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += w[r * n + p[r]];
      best = std::max(best, s);
    } while (std::next_permutation(p.begin(), p.end()));
    EXPECT_DOUBLE_EQ(got, best);
  }
}

TEST(AssignmentTest, PerfectMatchingDetectsAbsence) {
  const std::vector<char> ok{1, 1, 0, 1};
  const auto m = perfect_matching(ok, 2);
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ((*m)[0], 0u);
  EXPECT_EQ((*m)[1], 1u);
  const std::vector<char> bad{1, 0, 1, 0};
  EXPECT_FALSE(perfect_matching(bad, 2).has_value());
}

TEST(AgentRewardsTest, LayoutsPerFamily) {
  const auto cache = FeasibleFamily::shared_cache(3, 1, 2);
  const std::vector<double> y{0.2, 0.3, 0.5};
  EXPECT_EQ(agent_rewards(cache, DemandMatrix::one_hot(3, {2, 0}), y),
            (std::vector<double>{0.5, 0.2}));
  const auto sched = FeasibleFamily::job_simplex(2);
  const auto r = agent_rewards(sched, DemandMatrix::dense(1, 2, {0.5, 1.0}),
                               std::vector<double>{0.25, 0.75});
  ExpectVecNear(r, {0.125, 0.75}, 1e-15);
  const auto b = FeasibleFamily::birkhoff(2);
  // agent 1 wants resource 2, agent 2 wants resource 1; y is the swap.
  EXPECT_EQ(agent_rewards(b, DemandMatrix::one_hot(2, {1, 0}), std::vector<double>{0, 1, 1, 0}),
            (std::vector<double>{1, 1}));
  EXPECT_THROW(check_demand_shape(b, DemandMatrix::one_hot(3, {0, 1})), DataError);
}

TEST(AgentRewardsTest, GradientMatchesFiniteDifferences) {
  SplitMix64 rng(21);
  for (const auto& f : {FeasibleFamily::shared_cache(4, 2, 3), FeasibleFamily::job_simplex(3),
                        FeasibleFamily::birkhoff(3)}) {
    std::vector<double> e(f.library() * f.agents());
    for (double& x : e) x = rng.uniform();
    const auto x = DemandMatrix::dense(f.library(), f.agents(), e);
    std::vector<double> coeff(f.agents());
    for (double& c : coeff) c = rng.uniform();
    std::vector<double> g(f.dim(), 0.0);
    add_agent_gradient(f, x, coeff, g);
    std::vector<double> y(f.dim());
    for (double& v : y) v = rng.uniform();
    auto F = [&](const std::vector<double>& yy) {
      const auto r = agent_rewards(f, x, yy);
      return std::inner_product(coeff.begin(), coeff.end(), r.begin(), 0.0);
    };
    for (std::size_t j = 0; j < y.size(); ++j) {
      auto yp = y, ym = y;
      yp[j] += 1e-6;
      ym[j] -= 1e-6;
      EXPECT_NEAR((F(yp) - F(ym)) / 2e-6, g[j], 1e-8);
    }
  }
}

TEST(AllocationMatrixTest, SharedColumnsAreIdentical) {
  const auto f = FeasibleFamily::shared_cache(3, 1, 2);
  const auto a = to_allocation_matrix(f, std::vector<double>{0.2, 0.3, 0.5});
  EXPECT_EQ(a.rows(), 3u);
  EXPECT_EQ(a.cols(), 2u);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(a.at(j, 0), a.at(j, 1));
  const auto s = to_allocation_matrix(FeasibleFamily::job_simplex(2), std::vector<double>{0.4, 0.6});
  EXPECT_EQ(s.rows(), 1u);
  EXPECT_EQ(s.at(0, 1), 0.6);
}

}  // namespace
}  // namespace fairalloc
