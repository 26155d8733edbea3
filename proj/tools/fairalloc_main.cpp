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

#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairalloc/adversaries.hpp"
#include "fairalloc/csv.hpp"
#include "fairalloc/errors.hpp"
#include "fairalloc/fairness.hpp"
#include "fairalloc/feasible_sets.hpp"
#include "fairalloc/harness.hpp"
#include "fairalloc/offline_benchmark.hpp"
#include "fairalloc/trace_io.hpp"

namespace {

using namespace fairalloc;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNoConvergence = 3 };

struct Options {
  std::vector<double> alphas;
  std::vector<std::size_t> horizons;
  std::string family = "cache";
  std::size_t N = 50;
  std::size_t k = 5;
  std::size_t m = 4;
  std::string trace_path;
  std::string gen;
  std::string mode = "frac";
  std::vector<std::uint64_t> seeds{1};
  double step_scale = kDefaultStepScale;
  std::optional<double> delta;
  std::string out;
  std::string save_trace;
  std::size_t draws = 100000;
  std::size_t trials = 200;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--alpha", o.alphas, "fairness exponents a[,a...]")->delimiter(',');
  cmd->add_option("--T", o.horizons, "horizons n[,n...], ascending")->delimiter(',');
  cmd->add_option("--family", o.family, "cache|sched|match")
      ->check(CLI::IsMember({"cache", "sched", "match"}));
  cmd->add_option("--N", o.N, "library size (cache)");
  cmd->add_option("--k", o.k, "cache capacity");
  cmd->add_option("--m", o.m, "number of agents");
  auto* trace = cmd->add_option("--trace", o.trace_path, "trace file");
  auto* gen = cmd->add_option("--gen", o.gen, "zipf:s | lb:eta:inst | uniform");
  trace->excludes(gen);
  cmd->add_option("--mode", o.mode, "frac|int")->check(CLI::IsMember({"frac", "int"}));
  cmd->add_option("--seed", o.seeds, "seeds s[,s...]")->delimiter(',');
  cmd->add_option("--step-scale", o.step_scale, "multiplier on D/sqrt(S)");
  cmd->add_option("--delta", o.delta, "demand lower bound");
  cmd->add_option("--out", o.out, "output CSV path (stdout if absent)");
}

FeasibleFamily make_family(const Options& o) {
  switch (parse_family_tag(o.family)) {
    case FamilyKind::kSharedCache: return FeasibleFamily::shared_cache(o.N, o.k, o.m);
    case FamilyKind::kJobSimplex: return FeasibleFamily::job_simplex(o.m);
    case FamilyKind::kBirkhoff: return FeasibleFamily::birkhoff(o.m);
  }
  throw std::logic_error("unknown family");
}

ExperimentConfig make_config(const Options& o) {
  ExperimentConfig c;
  c.family = make_family(o);
  if (!o.trace_path.empty()) {
    c.trace = TraceSpec::file(o.trace_path);
  } else if (!o.gen.empty()) {
    c.trace = TraceSpec::parse_generator(o.gen);
  } else {
    c.trace = TraceSpec::parse_generator(c.family.kind() == FamilyKind::kSharedCache
                                             ? "zipf:0.8"
                                             : "uniform");
  }
  const double default_delta = c.family.kind() == FamilyKind::kJobSimplex ? 0.1 : 1.0;
  c.delta = o.delta.value_or(default_delta);
  c.trace.delta = c.delta;
  if (!o.alphas.empty()) c.alphas = o.alphas;
  if (!o.horizons.empty()) c.horizons = o.horizons;
  c.seeds = o.seeds;
  c.mode = parse_mode(o.mode);
  c.step_scale = o.step_scale;
  c.validate();
  return c;
}

void emit(const Options& o, const std::string& csv) {
  if (o.out.empty()) {
    std::cout << csv;
  } else {
    atomic_write(o.out, csv);
  }
}

int cmd_simulate(const Options& o) {
  const ExperimentConfig c = make_config(o);
  if (!o.save_trace.empty()) {
    save_trace(make_trace(c.trace, c.family, c.horizons.back(), c.seeds.front()), o.save_trace);
  }
  emit(o, metrics_table(run_experiment(c)).str());
  return kOk;
}

int cmd_offline(const Options& o) {
  const ExperimentConfig c = make_config(o);
  CsvTable t;
  t.header = {"T", "alpha", "seed", "fairness_offline", "fw_gap", "iterations"};
  for (std::size_t i = 0; i < c.family.agents(); ++i) {
    t.header.push_back("Rstar_" + std::to_string(i + 1));
  }
  for (double alpha : c.alphas) {
    for (std::uint64_t seed : c.seeds) {
      std::optional<DemandTrace> shared;
      if (prefix_stable(c.trace)) shared = make_trace(c.trace, c.family, c.horizons.back(), seed);
      for (std::size_t T : c.horizons) {
        const DemandTrace trace = shared ? *shared : make_trace(c.trace, c.family, T, seed);
        OfflineOptions opts;
        opts.tol = c.offline_rel_tol * std::pow(static_cast<double>(T), 1.0 - alpha);
        const auto sol = offline_optimal(c.family, trace, alpha, {}, opts, T);
        std::vector<std::string> row{std::to_string(T), format_double(alpha),
                                     std::to_string(seed), format_double(sol.value),
                                     format_double(sol.fw_gap),
                                     std::to_string(sol.iterations)};
        for (double r : sol.per_agent_R) row.push_back(format_double(r));
        t.rows.push_back(std::move(row));
      }
    }
  }
  emit(o, t.str());
  return kOk;
}

int cmd_phase_scan(const Options& o) {
  Options defaults = o;
  if (defaults.alphas.empty()) defaults.alphas = {0.0, 0.25, 0.5, 0.75};
  if (defaults.horizons.empty()) {
    for (int e = 10; e <= 17; ++e) defaults.horizons.push_back(std::size_t{1} << e);
  }
  const ExperimentConfig c = make_config(defaults);
  const auto rows = run_experiment(c);
  CsvTable t;
  t.header = {"alpha", "slope", "reference_slope", "surrogate_first", "surrogate_last"};
  const std::size_t n_T = c.horizons.size();
  const std::size_t n_seed = c.seeds.size();
  for (std::size_t a = 0; a < c.alphas.size(); ++a) {
    std::vector<std::pair<double, double>> pts;
    bool positive = true;
    for (std::size_t h = 0; h < n_T; ++h) {
      double mean = 0.0;
      for (std::size_t s = 0; s < n_seed; ++s) {
        mean += rows[(a * n_seed + s) * n_T + h].surrogate_regret;
      }
      mean /= static_cast<double>(n_seed);
      positive = positive && mean > 0.0;
      pts.emplace_back(static_cast<double>(c.horizons[h]), mean);
    }
    const double slope = positive && pts.size() >= 4
                             ? slope_fit(pts)
                             : std::numeric_limits<double>::quiet_NaN();
    t.rows.push_back({format_double(c.alphas[a]), format_double(slope),
                      format_double(std::max(0.0, 0.5 - c.alphas[a])),
                      format_double(pts.front().second), format_double(pts.back().second)});
  }
  emit(o, t.str());
  return kOk;
}

int cmd_lb_curve(const Options& o) {
  std::vector<double> alphas = o.alphas;
  if (alphas.empty()) {
    for (int i = 1; i <= 19; ++i) alphas.push_back(0.05 * i);
  }
  CsvTable t;
  t.header = {"alpha", "lb_ratio", "eta_star", "c_alpha"};
  for (double a : alphas) {
    const LowerBound lb = lb_ratio(a);
    t.rows.push_back({format_double(a), format_double(lb.ratio), format_double(lb.eta_star),
                      format_double(approx_factor(a))});
  }
  emit(o, t.str());
  return kOk;
}

int cmd_sample_test(const Options& o) {
  const FeasibleFamily family = make_family(o);
  CsvTable t;
  t.header = {"seed", "index", "p", "empirical", "bound", "ok"};
  std::size_t failures = 0;
  for (std::uint64_t seed : o.seeds) {
    SplitMix64 rng(derive_seed(seed, 0x5350'4C45ULL));
    const std::vector<double> y =
        family.kind() == FamilyKind::kSharedCache
            ? random_inclusion_vector(family.library(), family.capacity(), rng)
            : random_feasible_point(family, rng);
    const auto freq = empirical_marginals(family, y, o.draws, seed);
    for (std::size_t j = 0; j < y.size(); ++j) {
      const double bound =
          4.0 * std::sqrt(y[j] * (1.0 - y[j]) / static_cast<double>(o.draws)) + 1e-12;
      const bool ok = std::abs(freq[j] - y[j]) <= bound;
      failures += ok ? 0 : 1;
      t.rows.push_back({std::to_string(seed), std::to_string(j + 1), format_double(y[j]),
                        format_double(freq[j]), format_double(bound), ok ? "1" : "0"});
    }
  }
  emit(o, t.str());
  std::cerr << "sample-test: " << t.rows.size() - failures << "/" << t.rows.size()
            << " marginals within bound\n";
  return kOk;
}

int cmd_project_test(const Options& o) {
  const FeasibleFamily family = make_family(o);
  CsvTable t;
  t.header = {"seed", "trial", "vi_residual", "sampled_residual", "feasible", "grid_distance"};
  const bool grid = family.kind() == FamilyKind::kSharedCache && family.library() <= 3;
  for (std::uint64_t seed : o.seeds) {
    SplitMix64 rng(derive_seed(seed, 0x5052'4F4AULL));
    std::vector<std::vector<double>> samples(500);
    for (auto& z : samples) z = random_feasible_point(family, rng);
    for (std::size_t trial = 0; trial < o.trials; ++trial) {
      std::vector<double> v(family.dim());
      for (double& x : v) x = 4.0 * rng.uniform() - 1.5;
      const auto a = audit_projection(family, v, samples);
      std::string grid_dist = "nan";
      if (grid) {
        const auto g = grid_project_cache(v, family.capacity(), 1e-3);
        double d = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) d = std::max(d, std::abs(g[j] - a.projection[j]));
        grid_dist = format_double(d);
      }
      t.rows.push_back({std::to_string(seed), std::to_string(trial + 1),
                        format_double(a.vi_residual), format_double(a.sampled_residual),
                        a.feasible ? "1" : "0", grid_dist});
    }
  }
  emit(o, t.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online alpha-fair allocation experiments"};
  app.require_subcommand(1);
  Options o;
  auto* simulate = app.add_subcommand("simulate", "run the policy and emit metrics CSV");
  auto* offline = app.add_subcommand("offline", "offline optimum per horizon");
  auto* phase = app.add_subcommand("phase-scan", "surrogate-regret growth exponents");
  auto* lb = app.add_subcommand("lb-curve", "lower bound vs approximation factor");
  auto* sample = app.add_subcommand("sample-test", "integral sampling marginal audit");
  auto* proj = app.add_subcommand("project-test", "projection audit");
  for (auto* cmd : {simulate, offline, phase, lb, sample, proj}) add_common(cmd, o);
  simulate->add_option("--save-trace", o.save_trace, "also write the first seed's trace");
  sample->add_option("--draws", o.draws, "draws per seed")->check(CLI::PositiveNumber);
  proj->add_option("--trials", o.trials, "random inputs per seed")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  try {
    if (*simulate) return cmd_simulate(o);
    if (*offline) return cmd_offline(o);
    if (*phase) return cmd_phase_scan(o);
    if (*lb) return cmd_lb_curve(o);
    if (*sample) return cmd_sample_test(o);
    if (*proj) return cmd_project_test(o);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << " (final gap " << e.final_gap() << ")\n";
    return kNoConvergence;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}
