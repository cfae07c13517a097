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

// model.hpp: the two value types every stage passes around, a controlled
// system H = H_d + sum_i u_i(t) H_c,i and a piecewise-constant control table.

#pragma once

#include "adhoc/linalg.hpp"

#include <span>
#include <string>
#include <vector>

namespace adhoc {

/// Ordered basis indices spanning the logical (computational) subspace.
using Projector = std::vector<int>;

/// Drift plus control Hamiltonians on one Hilbert space.
///
/// On construction the basis is partitioned into the connected components of
/// the joint sparsity pattern of all operators. Every H(t) of the model is
/// block diagonal in that partition, which propagation exploits; for the
/// qubit-bus-qubit model the blocks are the excitation-number sectors.
class SystemModel {
 public:
  SystemModel(HermitianOp drift, std::vector<HermitianOp> controls,
              Projector computational, std::string label);

  const HermitianOp& drift() const { return drift_; }
  const std::vector<HermitianOp>& controls() const { return controls_; }
  int num_controls() const { return static_cast<int>(controls_.size()); }
  Eigen::Index dim() const { return drift_.dim(); }
  const Projector& projector() const { return projector_; }
  const std::string& label() const { return label_; }

  /// Disjoint index sets, each sorted ascending, ordered by smallest index.
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }

 private:
  HermitianOp drift_;
  std::vector<HermitianOp> controls_;
  Projector projector_;
  std::string label_;
  std::vector<std::vector<int>> blocks_;
};

/// channels x slices table of control amplitudes on a TimeGrid.
class ControlSet {
 public:
  ControlSet(TimeGrid grid, RMatrix values);
  static ControlSet zeros(TimeGrid grid, int channels);

  const TimeGrid& grid() const { return grid_; }
  const RMatrix& values() const { return values_; }
  RMatrix& mutable_values() { return values_; }
  int channels() const { return static_cast<int>(values_.rows()); }
  int slices() const { return static_cast<int>(values_.cols()); }
  double operator()(int channel, int slice) const { return values_(channel, slice); }

  /// Channel-major flattening, the closed-loop parameter layout.
  std::vector<double> flatten() const;
  static ControlSet unflatten(TimeGrid grid, int channels, std::span<const double> flat);

 private:
  TimeGrid grid_;
  RMatrix values_;
};

/// Restriction of a full-space matrix to the projector's index set.
CMatrix restrict_to(const CMatrix& full, const Projector& projector);

}  // namespace adhoc
