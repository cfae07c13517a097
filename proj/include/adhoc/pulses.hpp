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

// pulses.hpp: pulse shapes and the generator-to-system transfer chain.

#pragma once

#include "adhoc/linalg.hpp"
#include "adhoc/model.hpp"

#include <vector>

namespace adhoc {

/// Gaussian x quadrature centred at T/2 with a derivative (DRAG) y quadrature.
struct GaussianDragParams {
  double amplitude = 0.0;   ///< rad/ns
  double sigma = 1.0;       ///< ns
  double drag_scale = 0.0;  ///< multiplies dOmega_x/dt; -1/(2 Delta) is DRAG
};

/// Channel 0: A exp(-(t - T/2)^2 / 2 sigma^2) at slice midpoints.
/// Channel 1: drag_scale * dOmega_x/dt, evaluated analytically.
ControlSet render_gaussian_drag(const GaussianDragParams& p, const TimeGrid& grid);

/// Generator output V -> physical control u:
///   u_c = K * (gain_c V_c + offset_c) + dc_c
/// with K a unit-area Gaussian of width kernel_sigma. Pulses are zero outside
/// [0, T]. Empty gain/offset/dc vectors mean identity / zero for every channel.
struct TransferChain {
  double kernel_sigma = 0.0;  ///< ns; 0 means no filtering
  std::vector<double> gain;
  std::vector<double> offset;
  std::vector<double> dc_offsets;

  void validate(int channels) const;
};

/// Kernel weights k_m, m = -M..M, on a grid of spacing dt. Each weight is the
/// Gaussian's mass over its slice cell, truncated at |t| <= 5 sigma and
/// renormalized to unit sum. sigma = 0 gives {1}.
std::vector<double> transfer_kernel(double sigma, double dt);

ControlSet apply_transfer(const TransferChain& chain, const ControlSet& v);

/// Transpose of the linear part of apply_transfer: maps dF/du to dF/dV.
RMatrix transfer_adjoint(const TransferChain& chain, const TimeGrid& grid,
                         const RMatrix& grad_u);

}  // namespace adhoc
