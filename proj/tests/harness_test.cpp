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

#include "fairalloc/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "fairalloc/fairness.hpp"
#include "fairalloc/offline_benchmark.hpp"
#include "gtest/gtest.h"

namespace fairalloc {
namespace {

std::string ReadAll(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ExperimentConfig SmallConfig() {
  ExperimentConfig c;
  c.family = FeasibleFamily::shared_cache(20, 3, 3);
  c.trace = TraceSpec::parse_generator("zipf:0.8");
  c.alphas = {0.0, 0.25, 0.5, 0.75};
  c.horizons = {64, 128, 256, 512, 1024, 2048, 4096, 8192};
  c.seeds = {11, 12};
  return c;
}

TEST(CAlphaRegretTest, Examples) {
  const std::vector<double> R{4.0, 9.0};
  const std::vector<double> w{1.0, 1.0};
  EXPECT_DOUBLE_EQ(c_alpha_regret(13.0, R, 0.0, w), 0.0);
  EXPECT_NEAR(c_alpha_regret(10.0, R, 0.5, w), 10.0 - approx_factor(0.5) * 10.0, 1e-12);
  EXPECT_NEAR(c_alpha_regret(0.0, R, 0.5, w), -approx_factor(0.5) * 10.0, 1e-12);
}

TEST(SlopeFitTest, ExactPowerLaw) {
  std::vector<std::pair<double, double>> pts;
  for (int e = 10; e <= 17; ++e) {
    const double T = std::ldexp(1.0, e);
    pts.emplace_back(T, 3.0 * std::sqrt(T));
  }
  EXPECT_NEAR(slope_fit(pts), 0.5, 1e-12);
  for (auto& p : pts) p.second = 7.0;
  EXPECT_NEAR(slope_fit(pts), 0.0, 1e-12);
}

TEST(SlopeFitTest, SqrtLogIsNearlyFlat) {
  std::vector<std::pair<double, double>> pts;
  for (int e = 10; e <= 17; ++e) {
    const double T = std::ldexp(1.0, e);
    pts.emplace_back(T, std::sqrt(std::log(T)));
  }
  const double s = slope_fit(pts);
  EXPECT_GT(s, 0.0);
  EXPECT_LT(s, 0.08);
}

TEST(SlopeFitTest, RejectsBadInput) {
  std::vector<std::pair<double, double>> pts{{1, 1}, {2, 2}, {4, 4}};
  EXPECT_THROW(slope_fit(pts), std::invalid_argument);
  pts.emplace_back(8, 0.0);
  EXPECT_THROW(slope_fit(pts), std::invalid_argument);
  pts.back().second = 8.0;
  EXPECT_NEAR(slope_fit(pts), 1.0, 1e-12);
  pts = {{2, 1}, {2, 2}, {2, 3}, {2, 4}};
  EXPECT_THROW(slope_fit(pts), std::invalid_argument);
}

TEST(ExperimentConfigTest, Validate) {
  auto c = SmallConfig();
  EXPECT_NO_THROW(c.validate());
  c.horizons = {10, 10};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SmallConfig();
  c.alphas = {1.0};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SmallConfig();
  c.seeds.clear();
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SmallConfig();
  c.horizons = {0};
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(RunExperimentTest, ShapeAndOrder) {
  const auto c = SmallConfig();
  const auto rows = run_experiment(c);
  ASSERT_EQ(rows.size(), 4u * 8u * 2u);
  std::size_t r = 0;
  for (double a : c.alphas) {
    for (auto s : c.seeds) {
      for (auto T : c.horizons) {
        EXPECT_EQ(rows[r].alpha, a);
        EXPECT_EQ(rows[r].seed, s);
        EXPECT_EQ(rows[r].T, T);
        ++r;
      }
    }
  }
  for (const auto& row : rows) {
    ASSERT_EQ(row.R.size(), 3u);
    EXPECT_LE(row.min_rate, row.max_rate);
    EXPECT_GE(row.surrogate_regret, row.c_alpha_regret - 1e-6 * row.T);
    double sum = 0;
    for (double v : row.R) sum += v - 1.0;
    EXPECT_LE(sum, 3.0 * row.T + 1e-9);
  }
}

TEST(RunExperimentTest, CheckpointsMatchFreshRuns) {
  auto c = SmallConfig();
  c.alphas = {0.5};
  c.seeds = {3};
  c.horizons = {100, 300, 700};
  const auto rows = run_experiment(c);
  for (std::size_t h = 0; h < c.horizons.size(); ++h) {
    auto single = c;
    single.horizons = {c.horizons[h]};
    const auto fresh = run_experiment(single);
    ASSERT_EQ(fresh.size(), 1u);
    EXPECT_EQ(fresh[0].R, rows[h].R);
    EXPECT_EQ(fresh[0].fairness_offline, rows[h].fairness_offline);
    EXPECT_EQ(fresh[0].surrogate_regret, rows[h].surrogate_regret);
  }
}

TEST(RunExperimentTest, LowerBoundRegeneratesPerHorizon) {
  ExperimentConfig c;
  c.family = FeasibleFamily::shared_cache(20, 1, 2);
  c.trace = TraceSpec::parse_generator("lb:0.3:1");
  c.alphas = {0.5};
  c.horizons = {50, 200};
  const auto rows = run_experiment(c);
  auto single = c;
  single.horizons = {50};
  EXPECT_EQ(run_experiment(single)[0].R, rows[0].R);
}

TEST(RunExperimentTest, CsvIsByteIdentical) {
  const auto c = SmallConfig();
  const auto dir = std::filesystem::path(::testing::TempDir());
  write_metrics_csv(run_experiment(c), dir / "a.csv");
  write_metrics_csv(run_experiment(c), dir / "b.csv");
  const auto a = ReadAll(dir / "a.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, ReadAll(dir / "b.csv"));
  EXPECT_FALSE(std::filesystem::exists(dir / "a.csv.tmp"));
}

TEST(RunExperimentTest, IntegralModeReportsRealizedRewards) {
  auto c = SmallConfig();
  c.mode = Mode::kIntegral;
  c.alphas = {0.5};
  c.seeds = {1};
  c.horizons = {500};
  const auto row = run_experiment(c).at(0);
  EXPECT_NE(row.R, row.R_fractional);
  for (double v : row.R) EXPECT_EQ(v, std::floor(v));
}

TEST(MetricsTableTest, Header) {
  auto c = SmallConfig();
  c.alphas = {0.25};
  c.seeds = {1};
  c.horizons = {32};
  const auto table = metrics_table(run_experiment(c));
  const std::string head = table.str().substr(0, table.str().find('\n'));
  EXPECT_EQ(head,
            "T,alpha,seed,mode,fairness_online,fairness_offline,c_alpha_regret,"
            "surrogate_regret,min_rate,max_rate,R_1,R_2,R_3,fairness_online_raw,"
            "c_alpha_regret_raw");
  const std::string body = table.str().substr(head.size() + 1);
  EXPECT_EQ(body.rfind("32,0.25,1,frac,", 0), 0u);
  EXPECT_EQ(std::count(body.begin(), body.end(), ','), 14);
}

TEST(CsvTest, FormatDoubleRoundTrips) {
  SplitMix64 rng(9);
  for (int i = 0; i < 1000; ++i) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<int>(rng.below(40)) - 20);
    const auto s = format_double(v);
    double back = 0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, v) << s;
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(3.0), "3");
}

TEST(CsvTest, AtomicWriteReplaces) {
  const auto p = std::filesystem::path(::testing::TempDir()) / "atomic.txt";
  atomic_write(p, "first");
  atomic_write(p, "second");
  EXPECT_EQ(ReadAll(p), "second");
  EXPECT_THROW(atomic_write("/nonexistent-dir/x.csv", "x"), std::exception);
}

TEST(RandomGeneratorsTest, OutputsAreFeasible) {
  SplitMix64 rng(4);
  const std::vector<FeasibleFamily> fams{FeasibleFamily::shared_cache(10, 3, 2),
                                         FeasibleFamily::job_simplex(4),
                                         FeasibleFamily::birkhoff(4)};
  for (const auto& f : fams) {
    for (int i = 0; i < 50; ++i) EXPECT_TRUE(f.contains(random_feasible_point(f, rng)));
  }
  for (int i = 0; i < 50; ++i) {
    const auto d = random_doubly_stochastic(5, rng);
    EXPECT_TRUE(FeasibleFamily::birkhoff(5).contains(d));
    const auto y = random_inclusion_vector(12, 4, rng);
    EXPECT_TRUE(FeasibleFamily::shared_cache(12, 4, 1).contains(y));
  }
}

TEST(AuditProjectionTest, ExactResidualIsTiny) {
  SplitMix64 rng(6);
  const auto f = FeasibleFamily::birkhoff(4);
  std::vector<std::vector<double>> samples;
  for (int i = 0; i < 20; ++i) samples.push_back(random_feasible_point(f, rng));
  std::vector<double> v(16);
  for (double& x : v) x = 4 * rng.uniform() - 2;
  const auto a = audit_projection(f, v, samples);
  EXPECT_TRUE(a.feasible);
  EXPECT_LE(a.vi_residual, 1e-8);
  EXPECT_LE(a.sampled_residual, a.vi_residual + 1e-12);
}

TEST(GridProjectCacheTest, MatchesProjection) {
  const std::vector<double> v{0.9, 0.4, -0.2};
  const auto g = grid_project_cache(v, 1, 0.01);
  const auto p = project(FeasibleFamily::shared_cache(3, 1, 1), v);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(g[j], p[j], 0.011);
}

TEST(EmpiricalMarginalsTest, Cache) {
  const std::vector<double> y{0.5, 0.25, 0.75, 0.5};
  const auto m = empirical_marginals(FeasibleFamily::shared_cache(4, 2, 1), y, 40000, 3);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_NEAR(m[j], y[j], 4 * std::sqrt(y[j] * (1 - y[j]) / 40000));
  }
}

}  // namespace
}  // namespace fairalloc
