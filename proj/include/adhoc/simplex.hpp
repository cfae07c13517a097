// Copyright 2026 The adhoc Authors
//
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

// simplex.hpp: Nelder-Mead maximization of a black-box fidelity.
//
// The calibrator only ever sees the objective callback; it has no notion of
// the system behind it.

#pragma once

#include "adhoc/fidelity.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace adhoc {

using Params = std::vector<double>;

/// Black-box figure of merit to maximize. Metadata (n, m) of noisy
/// estimates feeds the noise-floor halting rule.
using FidelityObjective = std::function<FidelityEstimate(std::span<const double>)>;

/// Wraps a plain scalar objective.
FidelityObjective scalar_objective(std::function<double(std::span<const double>)> f);

struct NelderMeadCoefficients {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
};

enum class SimplexInit {
  axis,      ///< base plus one vertex per coordinate displaced by its spread
  gaussian,  ///< base plus k Gaussian-perturbed copies (seeded)
};

enum class StepKind { reflect, expand, contract_outside, contract_inside, shrink };
std::string to_string(StepKind kind);

struct SimplexState {
  std::vector<Params> vertices;  ///< sorted best first
  std::vector<FidelityEstimate> estimates;
  int eval_count = 0;
  int iterations = 0;
  std::vector<double> worst_history;  ///< Phi_w after init and after each step
  StepKind last_step = StepKind::reflect;
  int last_step_evals = 0;

  int dimension() const { return vertices.empty() ? 0 : static_cast<int>(vertices.front().size()); }
  double best() const { return estimates.front().value; }
  double worst() const { return estimates.back().value; }
};

/// Vertex geometry only (no evaluations). Throws ValidationError on a
/// non-positive spread, or after 10 degenerate Gaussian draws.
std::vector<Params> simplex_vertices(const Params& base, const Params& spread, SimplexInit init,
                                     std::uint64_t seed);

/// Builds and evaluates the k + 1 vertices.
SimplexState init_simplex(const FidelityObjective& objective, const Params& base,
                          const Params& spread, SimplexInit init = SimplexInit::axis,
                          std::uint64_t seed = 0);

/// One Nelder-Mead iteration.
SimplexState nm_step(SimplexState state, const FidelityObjective& objective,
                     const NelderMeadCoefficients& coef = {});

struct HaltingRule {
  double target_fidelity = 1.0;
  int max_evals = 1000;
  int window = 5;
  enum class Threshold { fixed, noise } threshold_source = Threshold::fixed;
  double fixed_threshold = 0.0;
  /// Hilbert-space dimension and sigma_p reading used by Threshold::noise.
  int noise_dim = 2;
  SigmaConvention sigma_convention = SigmaConvention::verbatim;

  void validate(int k) const;
};

enum class HaltReason { target_reached, budget, noise_floor };
std::string to_string(HaltReason r);

struct IterationRecord {
  int iteration = 0;
  int eval_count = 0;
  double best = 0.0;
  double worst = 0.0;
  double delta_worst = 0.0;
  double threshold = 0.0;
};

struct CalibrationResult {
  Params best;
  double best_fidelity = 0.0;
  int eval_count = 0;
  HaltReason halt_reason = HaltReason::budget;
  std::vector<IterationRecord> history;
  double final_mean_delta_worst = 0.0;  ///< over the last window
  double final_threshold = 0.0;
};

/// Iterates nm_step until the target is reached, the evaluation budget
/// cannot cover another worst-case step (k + 2 calls), or the mean
/// improvement of Phi_w over the last `window` steps drops below the
/// threshold. eval_count never exceeds max_evals.
CalibrationResult calibrate(const FidelityObjective& objective, const Params& initial,
                            const Params& spread, const HaltingRule& rule, std::uint64_t seed = 0,
                            SimplexInit init = SimplexInit::axis);

}  // namespace adhoc
