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

// grape.hpp: open-loop pulse optimization on a model.
//
// The process fidelity Phi = |Tr(T^dagger P U P)|^2 / d^2 is differentiated
// exactly: each slice derivative d exp(-i H_j dt) / du_cj is taken in the
// eigenbasis of H_j (divided differences of exp(-i lambda dt)), so there is
// no O(dt) approximation in the gradient.

#pragma once

#include "adhoc/linalg.hpp"
#include "adhoc/model.hpp"
#include "adhoc/parallel.hpp"
#include "adhoc/pulses.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace adhoc {

class OptimizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FidelityGradient {
  double fidelity = 0.0;
  RMatrix gradient;  ///< channels x slices, dPhi/du
};

/// Phi and dPhi/du_cj for physical controls u.
FidelityGradient process_fidelity_gradient(const SystemModel& model, const ControlSet& controls,
                                           const Unitary& target, const Projector& projector,
                                           Execution exec = Execution::parallel);

/// dPhi/du_cj only.
RMatrix grape_gradient(const SystemModel& model, const ControlSet& controls,
                       const Unitary& target, const Projector& projector,
                       Execution exec = Execution::parallel);

struct GrapeOptions {
  int max_iter = 1000;
  double grad_tol = 1e-12;
  double infidelity_goal = 1e-14;
  /// Symmetric amplitude bound |V| <= bound, enforced by clipping. Off by default.
  std::optional<double> amplitude_bound;
  /// When set, the optimized variable is the generator output V and the
  /// model sees u = apply_transfer(chain, V).
  std::optional<TransferChain> chain;
  Execution exec = Execution::parallel;
};

struct OpenLoopResult {
  ControlSet controls;              ///< optimized generator controls
  double initial_infidelity = 1.0;
  double final_infidelity = 1.0;
  int iterations = 0;
  int evaluations = 0;              ///< fidelity+gradient evaluations
  std::vector<double> gradient_norm_history;
  std::vector<double> infidelity_history;  ///< after each accepted iteration, [0] = initial
  std::string stop_reason;          ///< goal | gradient | max_iter | line_search
};

/// BFGS with Armijo backtracking, minimizing 1 - Phi. The line search only
/// accepts strict decreases, so infidelity_history is nonincreasing.
OpenLoopResult optimize_open(const SystemModel& model, const ControlSet& initial,
                             const Unitary& target, const Projector& projector,
                             const GrapeOptions& opts = {});

}  // namespace adhoc
