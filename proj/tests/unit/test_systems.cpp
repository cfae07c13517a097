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

#include "adhoc/fidelity.hpp"
#include "adhoc/propagate.hpp"
#include "adhoc/pulses.hpp"
#include "adhoc/systems.hpp"
#include "doctest.h"
#include "oracles.hpp"

#include <numbers>

using namespace adhoc;

TEST_CASE("random two-level systems: hermitian, bounded, reproducible") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    auto [m, target] = random_tls(s);
    // |h2 + i h3| <= sqrt(0.5^2 + 0.5^2) for entries drawn from [-0.5, 0.5].
    CHECK(m.drift().matrix().cwiseAbs().maxCoeff() <= 0.5 * std::sqrt(2.0) + 1e-15);
    CHECK(m.controls()[0].matrix().cwiseAbs().maxCoeff() <= 0.5 * std::sqrt(2.0) + 1e-15);
    CHECK(target.unitarity_defect() < 1e-10);
  }
  auto [a, ta] = random_tls(11);
  auto [b, tb] = random_tls(11);
  CHECK(a.drift().matrix() == b.drift().matrix());
  CHECK(a.controls()[0].matrix() == b.controls()[0].matrix());
  CHECK(ta.matrix() == tb.matrix());
}

TEST_CASE("random two-level entries are uniform on [-0.5, 0.5]") {
  // One-sample Kolmogorov-Smirnov test on the real diagonal entries.
  std::vector<double> xs;
  for (std::uint64_t s = 0; s < 2000; ++s) xs.push_back(random_tls(s).first.drift().matrix()(0, 0).real());
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = xs[i] + 0.5;
    d = std::max({d, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
  }
  CHECK(d < 1.63 / std::sqrt(n));  // 1% critical value
}

TEST_CASE("three-level drive model") {
  const SystemModel m = three_level_drag(-1.25);
  const CMatrix& hd = m.drift().matrix();
  CHECK(hd(2, 2) == Complex(-1.25));
  CHECK((hd.cwiseAbs().array() > 0.0).count() == 1);
  CHECK(m.controls()[0].matrix()(1, 2).real() == doctest::Approx(std::sqrt(2.0) / 2.0));
  CHECK(m.controls()[0].matrix()(1, 2).imag() == 0.0);
  CHECK(m.num_controls() == 2);
  CHECK_THROWS_AS(three_level_drag(0.0), ValidationError);
}

TEST_CASE("qubit-bus swap time") {
  // g1/2pi = 1/(2 * 12.6 ns); a full |1,0,bus 0> -> |0,0,bus 1> swap should take 12.6 ns.
  QbqParams p;
  p.g1 = 2.0 * std::numbers::pi / (2.0 * 12.6);
  p.g2 = 1e-9;  // park qubit 2 so the excitation only swaps with the bus
  const SystemModel m = qubit_bus_qubit(p);
  const QbqLayout lay{p.qubit_levels, p.bus_levels};
  const int from = lay.index(1, 0, 0), to = lay.index(0, 0, 1);
  // Fine-grid scan of the transfer probability.
  double best_t = 0.0, best_p = 0.0;
  const double dt = 0.01;
  const CMatrix step = oracle::taylor_expm(m.drift().matrix(), dt);
  CMatrix u = CMatrix::Identity(m.dim(), m.dim());
  for (int k = 1; k <= 2000; ++k) {
    u = step * u;
    const double pr = std::norm(u(to, from));
    if (pr > best_p) {
      best_p = pr;
      best_t = k * dt;
    }
  }
  CHECK(best_p > 0.999);
  CHECK(std::abs(best_t - 12.6) / 12.6 < 0.02);
}

TEST_CASE("excitation number is conserved without control") {
  const QbqParams p;
  const SystemModel m = qubit_bus_qubit(p);
  const CMatrix n = qbq_excitation_number(p);
  CHECK(max_norm(commutator(m.drift().matrix(), n)) < 1e-12);
  for (const auto& c : m.controls()) CHECK(max_norm(commutator(c.matrix(), n)) < 1e-12);
  const QbqLayout lay{p.qubit_levels, p.bus_levels};
  const Unitary u = propagate(m, ControlSet::zeros(TimeGrid(30.0, 30), 2)).total;
  const CVector psi = u.matrix().col(lay.index(1, 0, 0));
  const Complex mean = psi.dot(n * psi);
  CHECK(std::abs(mean - 1.0) < 1e-9);
}

TEST_CASE("zero offsets leave the drift untouched") {
  QbqParams p;
  const CMatrix base = qubit_bus_qubit(p).drift().matrix();
  p.offset1 = 0.0;
  p.offset2 = 0.0;
  CHECK(qubit_bus_qubit(p).drift().matrix() == base);
  p.offset1 = 0.1;
  const CMatrix shifted = qubit_bus_qubit(p).drift().matrix();
  const QbqLayout lay{p.qubit_levels, p.bus_levels};
  CHECK(shifted(lay.index(1, 0, 0), lay.index(1, 0, 0)).real() == doctest::Approx(0.1));
  CHECK(shifted(lay.index(2, 0, 0), lay.index(2, 0, 0)).real() ==
        doctest::Approx(0.2 + p.delta1));
}

TEST_CASE("parameter validation") {
  QbqParams p;
  p.g1 = 0.0;
  CHECK_THROWS_AS(qubit_bus_qubit(p), ValidationError);
  p = QbqParams{};
  p.delta2 = 0.1;
  CHECK_THROWS_AS(qubit_bus_qubit(p), ValidationError);
}

TEST_CASE("cz target") {
  const Unitary cz = cz_gate();
  CHECK(cz.matrix().diagonal() == CVector((CVector(4) << 1, 1, 1, -1).finished()));
}

// --- pulses ----------------------------------------------------------------

TEST_CASE("gaussian pulse shape") {
  const TimeGrid g(20.0, 41);
  GaussianDragParams p{0.7, 3.0, 0.0};
  const ControlSet c = render_gaussian_drag(p, g);
  CHECK(c.values().row(1).cwiseAbs().maxCoeff() == 0.0);
  // centre slice midpoint sits at T/2 exactly for odd N
  CHECK(std::abs(c(0, 20) - 0.7) <= 0.7 * g.dt() * g.dt() / (8.0 * 9.0) + 1e-15);
  CHECK(render_gaussian_drag({0.0, 3.0, 0.5}, g).values().cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(render_gaussian_drag({1.0, 0.0, 0.0}, g), ValidationError);
  // DRAG quadrature is the scaled time derivative of the Gaussian.
  const ControlSet d = render_gaussian_drag({0.7, 3.0, 0.25}, g);
  for (int j = 0; j < g.slices(); ++j) {
    const double x = g.midpoint(j) - 10.0;
    CHECK(d(1, j) == doctest::Approx(0.25 * 0.7 * std::exp(-x * x / 18.0) * (-x / 9.0)));
  }
}

TEST_CASE("transfer chain: delta kernel, constants and quadrature") {
  const TimeGrid g(40.0, 40);
  RMatrix v = RMatrix::Random(2, 40);
  const ControlSet c(g, v);
  CHECK(apply_transfer(TransferChain{}, c).values() == v);

  TransferChain chain;
  chain.kernel_sigma = 2.0;
  const ControlSet flat(g, RMatrix::Constant(1, 40, 0.37));
  const ControlSet out = apply_transfer(chain, flat);
  for (int j = 12; j < 28; ++j) CHECK(std::abs(out(0, j) - 0.37) < 1e-6);

  // Square pulse on [10, 20) ns, sigma 1 ns, against direct quadrature of the
  // continuous convolution evaluated at slice midpoints.
  chain.kernel_sigma = 1.0;
  RMatrix sq = RMatrix::Zero(1, 40);
  sq.block(0, 10, 1, 10).setOnes();
  const ControlSet filtered = apply_transfer(chain, ControlSet(g, sq));
  for (int j = 0; j < 40; ++j) {
    const double t = g.midpoint(j);
    auto gauss = [&](double s) {
      return std::exp(-(t - s) * (t - s) / 2.0) / std::sqrt(2.0 * std::numbers::pi);
    };
    const double want = oracle::simpson(gauss, 10.0, 20.0, 2000);
    CHECK(std::abs(filtered(0, j) - want) <= 1e-3 * std::max(want, 1e-3));
  }
}

TEST_CASE("transfer adjoint is the transpose of the linear part") {
  const TimeGrid g(12.0, 12);
  TransferChain chain;
  chain.kernel_sigma = 1.3;
  chain.gain = {1.1, 0.9};
  RMatrix a = RMatrix::Random(2, 12), b = RMatrix::Random(2, 12);
  // <T a, b> = <a, T^T b> for the offset-free chain
  const double lhs = (apply_transfer(chain, ControlSet(g, a)).values().array() * b.array()).sum();
  const double rhs = (a.array() * transfer_adjoint(chain, g, b).array()).sum();
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("gain, offset and dc offset") {
  const TimeGrid g(4.0, 4);
  TransferChain chain;
  chain.gain = {2.0};
  chain.offset = {0.5};
  chain.dc_offsets = {0.1};
  const ControlSet out = apply_transfer(chain, ControlSet(g, RMatrix::Ones(1, 4)));
  for (int j = 0; j < 4; ++j) CHECK(out(0, j) == doctest::Approx(2.6));
  chain.gain = {-1.0};
  CHECK_THROWS_AS(apply_transfer(chain, ControlSet(g, RMatrix::Ones(1, 4))), ValidationError);
}
