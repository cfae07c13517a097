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

// propagate.hpp: time evolution under piecewise-constant controls.
//
// U = U_N ... U_1 with U_j = exp(-i (H_d + sum_c u_cj H_c) dt). The slice
// exponentials are independent and computed by an OpenMP kernel; the serial
// variant is the reference the kernel is tested against. Both are evaluated
// block by block over SystemModel::blocks().

#pragma once

#include "adhoc/linalg.hpp"
#include "adhoc/model.hpp"
#include "adhoc/parallel.hpp"

#include <vector>

namespace adhoc {

struct Propagation {
  Unitary total;
  std::vector<Unitary> slices;
};

/// Full-space propagator and the per-slice propagators.
Propagation propagate(const SystemModel& model, const ControlSet& controls,
                      Execution exec = Execution::parallel);

/// Eigen-data of one slice generator restricted to a block.
struct SliceSpectrum {
  RVector eigenvalues;
  CMatrix eigenvectors;
  CMatrix propagator;
};

/// Evolution of one invariant block.
struct BlockEvolution {
  std::vector<int> indices;
  std::vector<SliceSpectrum> slices;
  CMatrix total;
};

enum class BlockSelection {
  all,
  computational,  ///< only blocks intersecting the model's projector
};

/// Blockwise evolution. With BlockSelection::computational only the blocks
/// that the fidelity measures can see are exponentiated.
class Evolution {
 public:
  Evolution(const SystemModel& model, const ControlSet& controls, BlockSelection selection,
            Execution exec = Execution::parallel);

  const std::vector<BlockEvolution>& blocks() const { return blocks_; }
  Eigen::Index dim() const { return dim_; }
  int num_slices() const { return num_slices_; }
  BlockSelection selection() const { return selection_; }

  /// P U P in projector order (d x d).
  CMatrix projected(const Projector& projector) const;
  /// Dense total propagator; requires BlockSelection::all.
  Unitary total() const;
  /// Dense propagator of slice j; requires BlockSelection::all.
  Unitary slice(int j) const;

 private:
  Eigen::Index dim_;
  int num_slices_;
  BlockSelection selection_;
  std::vector<BlockEvolution> blocks_;
};

/// Convenience: projected gate of the model's own projector.
CMatrix projected_gate(const SystemModel& model, const ControlSet& controls,
                       Execution exec = Execution::parallel);

/// Sub-matrix m(idx, idx).
CMatrix block_of(const CMatrix& m, const std::vector<int>& idx);

}  // namespace adhoc
