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

#include "adhoc/grape.hpp"

#include "adhoc/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace adhoc {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

/// Divided differences of f(l) = exp(-i l dt):
///   G_ab = (f(l_a) - f(l_b)) / (l_a - l_b),  G_aa = f'(l_a),
/// in the cancellation-free form -i dt exp(-i (l_a + l_b) dt / 2) sinc((l_a - l_b) dt / 2).
CMatrix divided_differences(const RVector& lambda, double dt) {
  const Eigen::Index n = lambda.size();
  CMatrix g(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      const double mean = 0.5 * (lambda(a) + lambda(b));
      const double half_gap = 0.5 * (lambda(a) - lambda(b)) * dt;
      g(a, b) = Complex(0.0, -dt) * std::polar(1.0, -mean * dt) * sinc(half_gap);
    }
  return g;
}

struct BlockTarget {
  int block;
  CMatrix target_adjoint;  ///< (embedded target restricted to the block)^dagger
};

}  // namespace

FidelityGradient process_fidelity_gradient(const SystemModel& model, const ControlSet& controls,
                                           const Unitary& target, const Projector& projector,
                                           Execution exec) {
  const auto d = target.dim();
  if (static_cast<Eigen::Index>(projector.size()) != d)
    throw ValidationError("grape: target dimension differs from projector rank");
  const BlockSelection sel =
      projector == model.projector() ? BlockSelection::computational : BlockSelection::all;
  const Evolution ev(model, controls, sel, exec);
  const int n = ev.num_slices();
  const int nc = controls.channels();
  const double dt = controls.grid().dt();

  std::vector<int> owner(model.dim(), -1), pos(model.dim(), -1);
  for (int b = 0; b < static_cast<int>(ev.blocks().size()); ++b)
    for (int k = 0; k < static_cast<int>(ev.blocks()[b].indices.size()); ++k) {
      owner[ev.blocks()[b].indices[k]] = b;
      pos[ev.blocks()[b].indices[k]] = k;
    }

  // Target entries T_rc only pair with U inside a common block.
  std::vector<BlockTarget> targets;
  for (int b = 0; b < static_cast<int>(ev.blocks().size()); ++b) {
    const auto sz = static_cast<Eigen::Index>(ev.blocks()[b].indices.size());
    CMatrix tb = CMatrix::Zero(sz, sz);
    bool any = false;
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c) {
        if (projector[r] < 0 || projector[r] >= model.dim() || projector[c] < 0 ||
            projector[c] >= model.dim())
          throw ValidationError("grape: projector index out of range");
        if (owner[projector[r]] == b && owner[projector[c]] == b) {
          tb(pos[projector[r]], pos[projector[c]]) = target.matrix()(r, c);
          any = true;
        }
      }
    if (any) targets.push_back({b, tb.adjoint()});
  }

  Complex tr(0.0, 0.0);
  for (const auto& t : targets) tr += (t.target_adjoint * ev.blocks()[t.block].total).trace();
  const double dd = static_cast<double>(d);

  // Prefix products fwd[j] = U_{j-1}..U_0 and suffix products bwd[j] = U_{n-1}..U_j.
  struct Products {
    std::vector<CMatrix> fwd, bwd, controls;
  };
  std::vector<Products> prod(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const auto& blk = ev.blocks()[targets[t].block];
    const auto sz = static_cast<Eigen::Index>(blk.indices.size());
    auto& p = prod[t];
    p.fwd.assign(n + 1, CMatrix::Identity(sz, sz));
    p.bwd.assign(n + 1, CMatrix::Identity(sz, sz));
    for (int j = 0; j < n; ++j) p.fwd[j + 1] = blk.slices[j].propagator * p.fwd[j];
    for (int j = n - 1; j >= 0; --j) p.bwd[j] = p.bwd[j + 1] * blk.slices[j].propagator;
    for (const auto& h : model.controls()) p.controls.push_back(block_of(h.matrix(), blk.indices));
  }

  FidelityGradient out;
  out.fidelity = std::norm(tr) / (dd * dd);
  out.gradient = RMatrix::Zero(nc, n);
  const Complex scale = std::conj(tr) * (2.0 / (dd * dd));
  parallel_for(n, exec, [&](int j) {
    std::vector<Complex> dtr(nc, Complex(0.0, 0.0));
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const auto& spec = ev.blocks()[targets[t].block].slices[j];
      const auto& p = prod[t];
      const CMatrix& v = spec.eigenvectors;
      const CMatrix w = v.adjoint() * (p.fwd[j] * targets[t].target_adjoint * p.bwd[j + 1]) * v;
      const CMatrix g = divided_differences(spec.eigenvalues, dt);
      for (int c = 0; c < nc; ++c) {
        const CMatrix hc = v.adjoint() * p.controls[c] * v;
        // Tr(V (G o Hc') V^dagger W) = sum_ab G_ab Hc'_ab W'_ba
        dtr[c] += (g.cwiseProduct(hc).cwiseProduct(w.transpose())).sum();
      }
    }
    for (int c = 0; c < nc; ++c) out.gradient(c, j) = std::real(scale * dtr[c]);
  });
  return out;
}

RMatrix grape_gradient(const SystemModel& model, const ControlSet& controls,
                       const Unitary& target, const Projector& projector, Execution exec) {
  return process_fidelity_gradient(model, controls, target, projector, exec).gradient;
}

namespace {

struct Objective {
  const SystemModel& model;
  const TimeGrid grid;
  const int channels;
  const Unitary& target;
  const Projector& projector;
  const GrapeOptions& opts;
  int evaluations = 0;

  /// 1 - Phi and its gradient with respect to the flat generator vector.
  double operator()(const RVector& x, RVector& grad) {
    ++evaluations;
    ControlSet v = ControlSet::unflatten(grid, channels, std::span<const double>(x.data(), x.size()));
    const ControlSet u = opts.chain ? apply_transfer(*opts.chain, v) : v;
    const FidelityGradient fg = process_fidelity_gradient(model, u, target, projector, opts.exec);
    RMatrix gv = opts.chain ? transfer_adjoint(*opts.chain, grid, fg.gradient) : fg.gradient;
    grad.resize(x.size());
    Eigen::Index k = 0;
    for (int c = 0; c < channels; ++c)
      for (int j = 0; j < grid.slices(); ++j) grad(k++) = -gv(c, j);
    const double f = 1.0 - fg.fidelity;
    if (!std::isfinite(f) || !grad.allFinite()) {
      std::ostringstream os;
      os << "optimize_open: non-finite objective after " << evaluations << " evaluations";
      throw OptimizationError(os.str());
    }
    return f;
  }
};

void clip(RVector& x, const std::optional<double>& bound) {
  if (!bound) return;
  x = x.cwiseMax(-*bound).cwiseMin(*bound);
}

}  // namespace

OpenLoopResult optimize_open(const SystemModel& model, const ControlSet& initial,
                             const Unitary& target, const Projector& projector,
                             const GrapeOptions& opts) {
  if (opts.max_iter < 1 || !(opts.grad_tol > 0.0) || !(opts.infidelity_goal > 0.0))
    throw ValidationError("optimize_open: options must be positive");
  if (opts.amplitude_bound && !(*opts.amplitude_bound > 0.0))
    throw ValidationError("optimize_open: amplitude bound must be positive");
  if (initial.channels() != model.num_controls())
    throw ValidationError("optimize_open: channel count differs from model");

  Objective obj{model, initial.grid(), initial.channels(), target, projector, opts};
  const auto flat = initial.flatten();
  RVector x = Eigen::Map<const RVector>(flat.data(), static_cast<Eigen::Index>(flat.size()));
  clip(x, opts.amplitude_bound);
  const Eigen::Index n = x.size();

  RVector g;
  double f = obj(x, g);
  OpenLoopResult res{ControlSet::unflatten(initial.grid(), initial.channels(), flat), 1.0, 1.0,
                     0, 0, {}, {}, {}};
  res.initial_infidelity = f;
  res.infidelity_history.push_back(f);
  res.gradient_norm_history.push_back(g.norm());

  RMatrix h_inv = RMatrix::Identity(n, n);
  bool fresh = true;  // h_inv is the (scaled) identity
  std::string reason = "max_iter";
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    if (f <= opts.infidelity_goal) {
      reason = "goal";
      break;
    }
    if (g.norm() < opts.grad_tol) {
      reason = "gradient";
      break;
    }
    RVector dir = -h_inv * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {  // lost descent: restart from steepest descent
      h_inv.setIdentity();
      fresh = true;
      dir = -g;
      slope = -g.squaredNorm();
    }
    // First step along -g: at most a unit move in control space, and no
    // longer than the linear model needs to remove the whole infidelity
    // (matters for warm starts, where a unit move can leave the basin).
    double step = 1.0;
    if (fresh && it == 0)
      step = std::min({1.0, 1.0 / g.cwiseAbs().maxCoeff(), f / g.squaredNorm()});
    RVector x_new, g_new;
    double f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + step * dir;
      clip(x_new, opts.amplitude_bound);
      f_new = obj(x_new, g_new);
      if (f_new < f && f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      if (f_new < f && ls >= 40) {  // rounding-level regime: take any decrease
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!fresh) {  // retry once with a steepest-descent restart
        h_inv.setIdentity();
        fresh = true;
        --it;
        continue;
      }
      reason = "line_search";
      break;
    }
    const RVector s = x_new - x;
    const RVector y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      if (fresh) {
        h_inv *= sy / y.squaredNorm();
        fresh = false;
      }
      const double rho = 1.0 / sy;
      const RVector hy = h_inv * y;
      const double yhy = y.dot(hy);
      h_inv += ((1.0 + rho * yhy) * rho) * (s * s.transpose()) -
               rho * (hy * s.transpose() + s * hy.transpose());
    }
    x = std::move(x_new);
    g = std::move(g_new);
    f = f_new;
    res.infidelity_history.push_back(f);
    res.gradient_norm_history.push_back(g.norm());
  }
  if (it >= opts.max_iter) {
    reason = f <= opts.infidelity_goal ? "goal" : "max_iter";
  }

  res.controls = ControlSet::unflatten(initial.grid(), initial.channels(),
                                       std::span<const double>(x.data(), x.size()));
  res.final_infidelity = std::max(0.0, f);
  res.iterations = static_cast<int>(res.infidelity_history.size()) - 1;
  res.evaluations = obj.evaluations;
  res.stop_reason = reason;
  return res;
}

}  // namespace adhoc
