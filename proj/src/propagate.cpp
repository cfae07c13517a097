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

#include "adhoc/propagate.hpp"

#include "adhoc/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <set>
#include <stdexcept>

namespace adhoc {

CMatrix block_of(const CMatrix& m, const std::vector<int>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  CMatrix out(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) out(r, c) = m(idx[r], idx[c]);
  return out;
}

namespace {

struct BlockOperators {
  CMatrix drift;
  std::vector<CMatrix> controls;
};

SliceSpectrum slice_spectrum(const BlockOperators& ops, const ControlSet& controls, int j,
                             double dt) {
  CMatrix h = ops.drift;
  for (std::size_t c = 0; c < ops.controls.size(); ++c)
    h.noalias() += controls(static_cast<int>(c), j) * ops.controls[c];
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("propagate: eigendecomposition failed");
  SliceSpectrum s;
  s.eigenvalues = es.eigenvalues();
  s.eigenvectors = es.eigenvectors();
  CVector phases(s.eigenvalues.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k)
    phases(k) = std::polar(1.0, -s.eigenvalues(k) * dt);
  s.propagator = s.eigenvectors * phases.asDiagonal() * s.eigenvectors.adjoint();
  return s;
}

}  // namespace

Evolution::Evolution(const SystemModel& model, const ControlSet& controls,
                     BlockSelection selection, Execution exec)
    : dim_(model.dim()), num_slices_(controls.slices()), selection_(selection) {
  if (controls.channels() != model.num_controls())
    throw ValidationError("propagate: control channel count differs from model");

  std::set<int> wanted(model.projector().begin(), model.projector().end());
  std::vector<BlockOperators> ops;
  for (const auto& idx : model.blocks()) {
    if (selection == BlockSelection::computational &&
        std::none_of(idx.begin(), idx.end(), [&](int k) { return wanted.count(k) > 0; }))
      continue;
    BlockEvolution b;
    b.indices = idx;
    b.slices.resize(num_slices_);
    blocks_.push_back(std::move(b));
    BlockOperators o;
    o.drift = block_of(model.drift().matrix(), idx);
    for (const auto& h : model.controls()) o.controls.push_back(block_of(h.matrix(), idx));
    ops.push_back(std::move(o));
  }

  const int nb = static_cast<int>(blocks_.size());
  const int work = nb * num_slices_;
  const double dt = controls.grid().dt();
  parallel_for(work, exec, [&](int w) {
    const int b = w / num_slices_;
    const int j = w % num_slices_;
    blocks_[b].slices[j] = slice_spectrum(ops[b], controls, j, dt);
  });

  for (auto& b : blocks_) {
    const auto n = static_cast<Eigen::Index>(b.indices.size());
    b.total = CMatrix::Identity(n, n);
    for (const auto& s : b.slices) b.total = s.propagator * b.total;
  }
}

CMatrix Evolution::projected(const Projector& projector) const {
  const auto d = static_cast<Eigen::Index>(projector.size());
  std::vector<int> block_of_index(dim_, -1);
  std::vector<int> pos_in_block(dim_, -1);
  for (int b = 0; b < static_cast<int>(blocks_.size()); ++b)
    for (int k = 0; k < static_cast<int>(blocks_[b].indices.size()); ++k) {
      block_of_index[blocks_[b].indices[k]] = b;
      pos_in_block[blocks_[b].indices[k]] = k;
    }
  CMatrix out = CMatrix::Zero(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) {
      const int br = block_of_index[projector[r]];
      const int bc = block_of_index[projector[c]];
      if (br < 0 || bc < 0)
        throw ValidationError("Evolution::projected: projector index outside evolved blocks");
      if (br != bc) continue;
      out(r, c) = blocks_[br].total(pos_in_block[projector[r]], pos_in_block[projector[c]]);
    }
  return out;
}

Unitary Evolution::total() const {
  if (selection_ != BlockSelection::all)
    throw std::logic_error("Evolution::total requires all blocks");
  CMatrix u = CMatrix::Zero(dim_, dim_);
  for (const auto& b : blocks_)
    for (std::size_t r = 0; r < b.indices.size(); ++r)
      for (std::size_t c = 0; c < b.indices.size(); ++c)
        u(b.indices[r], b.indices[c]) = b.total(r, c);
  return Unitary::unchecked(std::move(u));
}

Unitary Evolution::slice(int j) const {
  if (selection_ != BlockSelection::all)
    throw std::logic_error("Evolution::slice requires all blocks");
  CMatrix u = CMatrix::Zero(dim_, dim_);
  for (const auto& b : blocks_)
    for (std::size_t r = 0; r < b.indices.size(); ++r)
      for (std::size_t c = 0; c < b.indices.size(); ++c)
        u(b.indices[r], b.indices[c]) = b.slices[j].propagator(r, c);
  return Unitary::unchecked(std::move(u));
}

Propagation propagate(const SystemModel& model, const ControlSet& controls, Execution exec) {
  Evolution ev(model, controls, BlockSelection::all, exec);
  std::vector<Unitary> slices;
  slices.reserve(ev.num_slices());
  for (int j = 0; j < ev.num_slices(); ++j) slices.push_back(ev.slice(j));
  return Propagation{ev.total(), std::move(slices)};
}

CMatrix projected_gate(const SystemModel& model, const ControlSet& controls, Execution exec) {
  return Evolution(model, controls, BlockSelection::computational, exec)
      .projected(model.projector());
}

}  // namespace adhoc
