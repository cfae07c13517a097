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

// fidelity.hpp: gate quality measures and their noisy estimators.
//
// Every measure has two entry points: one taking the full-space Unitary and
// a projector, and one taking the already projected d x d block P U P (the
// hot path used by optimizers, see projected_gate()).

#pragma once

#include "adhoc/linalg.hpp"
#include "adhoc/model.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace adhoc {

enum class FidelityKind { process, average_analytic, average_sampled, cz_phase, noisy };

std::string to_string(FidelityKind kind);
FidelityKind fidelity_kind_from_string(const std::string& s);

struct FidelityEstimate {
  double value = 0.0;
  FidelityKind kind = FidelityKind::process;
  int samples = 0;       ///< m (trials) or number of sampled states
  int depolarized = 0;   ///< n
  double p_bar = 0.0;
  double sigma_p = 0.0;
  double std_error = 0.0;

  void validate() const;
};

/// How the depolarization-rate uncertainty is read from m trials.
enum class SigmaConvention {
  verbatim,      ///< 1 / (12 sqrt(m))
  uniform_var,   ///< 1 / sqrt(12 m)
};

double sigma_p(int m, SigmaConvention conv);

/// |Tr(T^dagger P U P)|^2 / d^2
double process_fidelity(const Unitary& u, const Unitary& target, const Projector& projector);
double process_fidelity(const CMatrix& projected, const Unitary& target);

/// (Tr(M^dagger M) + |Tr M|^2) / (d (d + 1)),  M = T^dagger P U P.
double avg_fidelity_analytic(const Unitary& u, const Unitary& target,
                             const Projector& projector);
double avg_fidelity_analytic(const CMatrix& projected, const Unitary& target);

/// A quantum channel on full-space density matrices.
using StateChannel = std::function<CMatrix(const CMatrix& rho)>;

StateChannel unitary_channel(const Unitary& u);

/// Monte-Carlo average fidelity over Haar-random pure states of the
/// computational subspace. Reports the sample standard error.
FidelityEstimate avg_fidelity_sampled(const StateChannel& channel, Eigen::Index full_dim,
                                      const Unitary& target, const Projector& projector,
                                      int n_states, std::uint64_t seed);
/// Same estimator for the coherent channel given by a projected gate.
FidelityEstimate avg_fidelity_sampled(const CMatrix& projected, const Unitary& target,
                                      int n_states, std::uint64_t seed);

/// CZ phase-tailored measure from the diagonal elements of |01>, |10>, |11>:
///   sum |U_kk|^2 / 6 (1 + (-1)^{i j} cos arg U_kk).
/// `three` lists the basis indices of |01>, |10>, |11> in that order.
double cz_phase_fidelity(const Unitary& u, const Projector& three);
/// From the projected 4x4 gate in the order |00>, |01>, |10>, |11>.
double cz_phase_fidelity(const CMatrix& projected4);

/// Process fidelity against T (+) diag(e^{i phi_k}) with every free phase
/// chosen optimally: (|Tr(T^dagger P U P)| + sum_k |U_kk|)^2 / D^2 where
/// D = d + #free. Used for the DRAG X gate whose |2> phase is arbitrary.
double process_fidelity_free_phases(const Unitary& u, const Unitary& target,
                                    const Projector& projector, const std::vector<int>& free);

/// Draws n ~ Binomial(m, p) depolarizations and returns
///   n / (m d) + (m - n) / m * phi.
FidelityEstimate depolarize_estimate(double phi, double p, int m, int d, std::uint64_t seed,
                                     SigmaConvention conv = SigmaConvention::verbatim);

/// Resolution floor of a depolarized fidelity estimate with n of m trials:
///   (d phi - p - s) / (d (1 - p - s)) - (d phi - p + s) / (d (1 - p + s)),
/// p = n/m, s = sigma_p(m).
double noise_threshold(int n, int m, double phi_dep, int d,
                       SigmaConvention conv = SigmaConvention::verbatim);

}  // namespace adhoc
