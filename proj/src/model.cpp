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

#include "adhoc/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace adhoc {

namespace {

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

std::vector<std::vector<int>> connected_blocks(const HermitianOp& drift,
                                               const std::vector<HermitianOp>& controls) {
  const int n = static_cast<int>(drift.dim());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto join = [&](const CMatrix& m) {
    for (int r = 0; r < n; ++r)
      for (int c = r + 1; c < n; ++c)
        if (m(r, c) != Complex(0.0, 0.0)) {
          const int a = find_root(parent, r);
          const int b = find_root(parent, c);
          if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
  };
  join(drift.matrix());
  for (const auto& h : controls) join(h.matrix());

  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) groups[find_root(parent, i)].push_back(i);
  std::vector<std::vector<int>> out;
  out.reserve(groups.size());
  for (auto& [root, idx] : groups) out.push_back(std::move(idx));
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

}  // namespace

SystemModel::SystemModel(HermitianOp drift, std::vector<HermitianOp> controls,
                         Projector computational, std::string label)
    : drift_(std::move(drift)),
      controls_(std::move(controls)),
      projector_(std::move(computational)),
      label_(std::move(label)) {
  if (controls_.empty()) throw ValidationError("SystemModel: no control Hamiltonians");
  for (const auto& h : controls_)
    if (h.dim() != drift_.dim())
      throw ValidationError("SystemModel: control dimension differs from drift");
  if (projector_.empty()) throw ValidationError("SystemModel: empty projector");
  std::set<int> seen;
  for (int k : projector_) {
    if (k < 0 || k >= drift_.dim())
      throw ValidationError("SystemModel: projector index out of range");
    if (!seen.insert(k).second)
      throw ValidationError("SystemModel: duplicate projector index");
  }
  blocks_ = connected_blocks(drift_, controls_);
}

ControlSet::ControlSet(TimeGrid grid, RMatrix values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.rows() < 1) throw ValidationError("ControlSet: need at least one channel");
  if (values_.cols() != grid_.slices())
    throw ValidationError("ControlSet: column count differs from grid slices");
  if (!values_.allFinite()) throw ValidationError("ControlSet: non-finite amplitude");
}

ControlSet ControlSet::zeros(TimeGrid grid, int channels) {
  return ControlSet(grid, RMatrix::Zero(channels, grid.slices()));
}

std::vector<double> ControlSet::flatten() const {
  std::vector<double> out;
  out.reserve(values_.size());
  for (int c = 0; c < channels(); ++c)
    for (int j = 0; j < slices(); ++j) out.push_back(values_(c, j));
  return out;
}

ControlSet ControlSet::unflatten(TimeGrid grid, int channels, std::span<const double> flat) {
  if (channels < 1 ||
      flat.size() != static_cast<std::size_t>(channels) * static_cast<std::size_t>(grid.slices()))
    throw ValidationError("ControlSet::unflatten: size mismatch");
  RMatrix v(channels, grid.slices());
  std::size_t k = 0;
  for (int c = 0; c < channels; ++c)
    for (int j = 0; j < grid.slices(); ++j) v(c, j) = flat[k++];
  return ControlSet(grid, std::move(v));
}

CMatrix restrict_to(const CMatrix& full, const Projector& projector) {
  const auto d = static_cast<Eigen::Index>(projector.size());
  CMatrix out(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) out(r, c) = full(projector[r], projector[c]);
  return out;
}

}  // namespace adhoc
