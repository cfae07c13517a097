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

// systems.hpp: the concrete controlled systems.
//
// Units: frequencies are angular (rad/ns), times in ns. The random two-level
// system is dimensionless.

#pragma once

#include "adhoc/linalg.hpp"
#include "adhoc/model.hpp"

#include <cstdint>
#include <numbers>
#include <utility>

namespace adhoc {

constexpr double mhz_to_angular(double mhz) { return 2.0 * std::numbers::pi * mhz * 1e-3; }
constexpr double ghz_to_angular(double ghz) { return 2.0 * std::numbers::pi * ghz; }
constexpr double angular_to_mhz(double w) { return w / (2.0 * std::numbers::pi) * 1e3; }

/// Parameters of two anharmonic qubits coupled through a bus resonator,
/// in the frame rotating at the bus frequency.
struct QbqParams {
  double g1 = mhz_to_angular(40.0);
  double g2 = mhz_to_angular(54.0);
  double delta1 = mhz_to_angular(-59.0);
  double delta2 = mhz_to_angular(-71.0);
  int qubit_levels = 3;
  int bus_levels = 3;
  double offset1 = 0.0;  ///< DC offset on qubit 1's detuning (rad/ns)
  double offset2 = 0.0;

  void validate() const;
  bool operator==(const QbqParams&) const = default;
};

/// Basis bookkeeping for |q1, q2, bus> = q1 (x) q2 (x) bus.
struct QbqLayout {
  int qubit_levels;
  int bus_levels;
  int dim() const { return qubit_levels * qubit_levels * bus_levels; }
  int index(int q1, int q2, int bus) const {
    return (q1 * qubit_levels + q2) * bus_levels + bus;
  }
};

/// Random TLS: drift and single control with entries built from independent
/// uniform draws on [-0.5, 0.5], plus a Haar-random 2x2 target.
std::pair<SystemModel, Unitary> random_tls(std::uint64_t seed);

/// Resonantly driven three-level ladder (0, 0, anharmonicity) with the x and
/// y drive quadratures as controls.
SystemModel three_level_drag(double anharmonicity);

/// Qubit-bus-qubit model; controls are the two qubit number operators (the
/// qubit-bus detunings). Projector: {|00,0>, |01,0>, |10,0>, |11,0>}.
SystemModel qubit_bus_qubit(const QbqParams& p);

/// Total excitation number n_1 + n_2 + a^dagger a.
CMatrix qbq_excitation_number(const QbqParams& p);

/// CZ = diag(1, 1, 1, -1) on the computational basis.
Unitary cz_gate();

}  // namespace adhoc
