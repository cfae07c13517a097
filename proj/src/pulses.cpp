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

#include "adhoc/pulses.hpp"

#include <cmath>
#include <numbers>

namespace adhoc {

ControlSet render_gaussian_drag(const GaussianDragParams& p, const TimeGrid& grid) {
  if (!(p.sigma > 0.0)) throw ValidationError("render_gaussian_drag: sigma must be > 0");
  const int n = grid.slices();
  const double centre = 0.5 * grid.total_time();
  RMatrix v(2, n);
  for (int j = 0; j < n; ++j) {
    const double x = grid.midpoint(j) - centre;
    const double g = p.amplitude * std::exp(-x * x / (2.0 * p.sigma * p.sigma));
    v(0, j) = g;
    v(1, j) = p.drag_scale * g * (-x / (p.sigma * p.sigma));
  }
  return ControlSet(grid, std::move(v));
}

void TransferChain::validate(int channels) const {
  if (!(kernel_sigma >= 0.0) || !std::isfinite(kernel_sigma))
    throw ValidationError("TransferChain: kernel_sigma must be >= 0");
  auto check_size = [&](const std::vector<double>& v, const char* what) {
    if (!v.empty() && static_cast<int>(v.size()) != channels)
      throw ValidationError(std::string("TransferChain: ") + what + " size differs from channels");
  };
  check_size(gain, "gain");
  check_size(offset, "offset");
  check_size(dc_offsets, "dc_offsets");
  for (double g : gain)
    if (!(g > 0.0)) throw ValidationError("TransferChain: gains must be > 0");
}

std::vector<double> transfer_kernel(double sigma, double dt) {
  if (!(sigma >= 0.0)) throw ValidationError("transfer_kernel: sigma must be >= 0");
  if (sigma == 0.0) return {1.0};
  const int m_max = static_cast<int>(std::ceil(5.0 * sigma / dt));
  const double s = sigma * std::numbers::sqrt2;
  auto cdf = [&](double t) { return 0.5 * std::erf(t / s); };
  std::vector<double> k(2 * m_max + 1);
  double sum = 0.0;
  for (int m = -m_max; m <= m_max; ++m) {
    const double lo = std::max((m - 0.5) * dt, -5.0 * sigma);
    const double hi = std::min((m + 0.5) * dt, 5.0 * sigma);
    const double w = hi > lo ? cdf(hi) - cdf(lo) : 0.0;
    k[m + m_max] = w;
    sum += w;
  }
  for (double& w : k) w /= sum;
  return k;
}

ControlSet apply_transfer(const TransferChain& chain, const ControlSet& v) {
  chain.validate(v.channels());
  const int nc = v.channels();
  const int n = v.slices();
  const auto k = transfer_kernel(chain.kernel_sigma, v.grid().dt());
  const int m_max = static_cast<int>(k.size() / 2);
  RMatrix u = RMatrix::Zero(nc, n);
  for (int c = 0; c < nc; ++c) {
    const double gain = chain.gain.empty() ? 1.0 : chain.gain[c];
    const double off = chain.offset.empty() ? 0.0 : chain.offset[c];
    const double dc = chain.dc_offsets.empty() ? 0.0 : chain.dc_offsets[c];
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int m = -m_max; m <= m_max; ++m) {
        const int i = j - m;
        if (i < 0 || i >= n) continue;
        acc += k[m + m_max] * (gain * v(c, i) + off);
      }
      u(c, j) = acc + dc;
    }
  }
  return ControlSet(v.grid(), std::move(u));
}

RMatrix transfer_adjoint(const TransferChain& chain, const TimeGrid& grid,
                         const RMatrix& grad_u) {
  const int nc = static_cast<int>(grad_u.rows());
  chain.validate(nc);
  const int n = static_cast<int>(grad_u.cols());
  if (n != grid.slices()) throw ValidationError("transfer_adjoint: grid mismatch");
  const auto k = transfer_kernel(chain.kernel_sigma, grid.dt());
  const int m_max = static_cast<int>(k.size() / 2);
  RMatrix g = RMatrix::Zero(nc, n);
  for (int c = 0; c < nc; ++c) {
    const double gain = chain.gain.empty() ? 1.0 : chain.gain[c];
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int m = -m_max; m <= m_max; ++m) {
        const int j = i + m;
        if (j < 0 || j >= n) continue;
        acc += k[m + m_max] * grad_u(c, j);
      }
      g(c, i) = gain * acc;
    }
  }
  return g;
}

}  // namespace adhoc
