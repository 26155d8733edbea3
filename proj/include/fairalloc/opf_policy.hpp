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

#ifndef FAIRALLOC_OPF_POLICY_HPP_
#define FAIRALLOC_OPF_POLICY_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "fairalloc/core_model.hpp"
#include "fairalloc/feasible_sets.hpp"
#include "fairalloc/rng.hpp"

namespace fairalloc {

enum class Mode { kFractional, kIntegral };

std::string_view mode_tag(Mode mode);  // "frac" / "int"
Mode parse_mode(std::string_view tag);

// Default multiplier on D / sqrt(S); gives the adaptive step D / sqrt(2 S).
inline constexpr double kDefaultStepScale = 0.70710678118654752440;

struct PolicyConfig {
  FairnessParams params;
  double step_scale = kDefaultStepScale;
  // Diameter bound D; the family's bound when absent.
  std::optional<double> diameter;
  Mode mode = Mode::kFractional;
  std::uint64_t seed = 0;
};

// Online Proportional Fair policy: projected online gradient ascent with
// adaptive step sizes on the gradients w_i x_i / R_i^alpha.
//
// Each round the caller reads act() and then reveals the demand with feed().
// feed() first credits the committed fractional allocation, then takes the
// ascent step with the gradient built from the updated rewards. For the
// shared cache the agent gradients are summed onto the single shared vector.
//
// In integral mode act() additionally draws an integral allocation with
// E[Y] = y, independently every round. The fractional dynamics are not
// affected by the draws; realized integral rewards are tracked separately.
//
// Single owner: act()/feed() must not run concurrently on one instance.
class OpfPolicy {
 public:
  OpfPolicy(FeasibleFamily family, PolicyConfig config);

  const FeasibleFamily& family() const { return family_; }
  const PolicyConfig& config() const { return config_; }

  // Allocation committed for the upcoming round.
  const std::vector<double>& act();
  // Current fractional allocation y (no side effects).
  const std::vector<double>& fractional() const { return y_; }

  void feed(const DemandMatrix& demand);

  // Fractional cumulative rewards, starting at 1.
  const std::vector<double>& rewards() const { return R_; }
  // 1 + realized integral rewards (integral mode); equals rewards() otherwise.
  const std::vector<double>& realized_rewards() const;
  double gradient_energy() const { return S_; }
  double diameter() const { return diameter_; }
  // Step used by the most recent update (0 before any update).
  double last_step() const { return last_step_; }
  // Gradient of the most recent update in decision layout.
  const std::vector<double>& last_gradient() const { return g_; }
  const std::vector<double>& last_increments() const { return inc_; }
  const std::vector<double>& last_realized_increments() const;
  std::size_t rounds() const { return rounds_; }

 private:
  void ascend_shared_cache(const DemandMatrix& demand);
  void ascend_dense(const DemandMatrix& demand);

  FeasibleFamily family_;
  PolicyConfig config_;
  std::vector<double> weights_;
  double diameter_;
  std::vector<double> y_;
  std::vector<double> R_;
  std::vector<double> realized_R_;
  double S_ = 0.0;
  double last_step_ = 0.0;
  std::vector<double> g_;
  std::vector<double> inc_;
  std::vector<double> realized_inc_;
  std::vector<double> coeff_;
  std::size_t rounds_ = 0;
  SplitMix64 rng_;
  std::vector<double> sample_;
  bool sampled_ = false;
  // Shared cache: sorted indices with y_j > 0, and the gradient's support.
  std::vector<std::size_t> support_;
  std::vector<std::size_t> touched_;
  std::vector<std::size_t> candidates_;
  std::vector<double> scratch_in_;
  std::vector<double> scratch_out_;
};

struct RunOptions {
  bool keep_allocations = false;
  bool keep_gradients = false;
};

// Result of one policy run over a trace.
struct RunRecord {
  explicit RunRecord(FeasibleFamily f) : family(std::move(f)) {}

  FeasibleFamily family;
  Mode mode = Mode::kFractional;
  double alpha = 0.0;
  std::vector<double> weights;
  std::size_t horizon = 0;
  std::size_t agents = 0;
  // Row-major T x m: fractional <x_i(t), y_i(t)>.
  std::vector<double> increments;
  // Row-major T x m: R_i(t) before round t is credited (first row is all 1).
  std::vector<double> rewards_before;
  // Row-major T x m: integral-mode realized increments (empty otherwise).
  std::vector<double> realized_increments;
  std::vector<double> final_rewards;
  std::vector<double> final_realized_rewards;
  // Optional per-round committed allocation and update gradient.
  std::vector<std::vector<double>> allocations;
  std::vector<std::vector<double>> gradients;

  // Fractional rewards after the first `rounds` rounds (offset included).
  std::vector<double> rewards_after(std::size_t rounds) const;
  // Realized rewards (offset included) after `rounds` rounds; fractional
  // rewards in fractional mode.
  std::vector<double> realized_after(std::size_t rounds) const;
};

// Runs the policy over the whole trace. Throws DataError if the trace does
// not fit the family or violates the demand bounds for config.params.delta.
RunRecord run_policy(const FeasibleFamily& family, const DemandTrace& trace,
                     const PolicyConfig& config, const RunOptions& options = {});

}  // namespace fairalloc

#endif  // FAIRALLOC_OPF_POLICY_HPP_
