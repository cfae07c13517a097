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

#include "adhoc/systems.hpp"

#include "adhoc/random.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

namespace adhoc {

namespace {

CMatrix raising(int levels) {
  CMatrix m = CMatrix::Zero(levels, levels);
  for (int n = 0; n + 1 < levels; ++n) m(n + 1, n) = std::sqrt(static_cast<double>(n + 1));
  return m;
}

CMatrix kron3(const CMatrix& a, const CMatrix& b, const CMatrix& c) {
  return Eigen::kroneckerProduct(Eigen::kroneckerProduct(a, b).eval(), c).eval();
}

CMatrix tls_matrix(double h1, double h2, double h3, double h4) {
  CMatrix m(2, 2);
  m << h1, Complex(h2, h3), Complex(h2, -h3), h4;
  return m;
}

}  // namespace

void QbqParams::validate() const {
  if (!(g1 > 0.0) || !(g2 > 0.0)) throw ValidationError("QbqParams: couplings must be > 0");
  if (!(delta1 < 0.0) || !(delta2 < 0.0))
    throw ValidationError("QbqParams: non-linearities must be < 0");
  if (qubit_levels < 2 || bus_levels < 2)
    throw ValidationError("QbqParams: levels must be >= 2");
  if (!std::isfinite(offset1) || !std::isfinite(offset2))
    throw ValidationError("QbqParams: non-finite offset");
}

std::pair<SystemModel, Unitary> random_tls(std::uint64_t seed) {
  Rng rng(derive_seed(seed, {0x71}));
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  double d[4], c[4];
  for (double& x : d) x = u(rng);
  for (double& x : c) x = u(rng);
  SystemModel model(HermitianOp(tls_matrix(d[0], d[1], d[2], d[3])),
                    {HermitianOp(tls_matrix(c[0], c[1], c[2], c[3]))}, Projector{0, 1},
                    "random-tls");
  return {std::move(model), haar_unitary(2, derive_seed(seed, {0x72}))};
}

SystemModel three_level_drag(double anharmonicity) {
  if (anharmonicity == 0.0 || !std::isfinite(anharmonicity))
    throw ValidationError("three_level_drag: anharmonicity must be nonzero");
  const double r2 = std::sqrt(2.0);
  CMatrix drift = CMatrix::Zero(3, 3);
  drift(2, 2) = anharmonicity;
  CMatrix hx(3, 3);
  hx << 0.0, 1.0, 0.0,  //
      1.0, 0.0, r2,     //
      0.0, r2, 0.0;
  CMatrix hy(3, 3);
  hy << 0.0, -1.0, 0.0,  //
      1.0, 0.0, -r2,     //
      0.0, r2, 0.0;
  const Complex half_i(0.0, 0.5);
  return SystemModel(HermitianOp(drift), {HermitianOp(0.5 * hx), HermitianOp(half_i * hy)},
                     Projector{0, 1}, "three-level-drag");
}

SystemModel qubit_bus_qubit(const QbqParams& p) {
  p.validate();
  const int ql = p.qubit_levels;
  const int bl = p.bus_levels;
  const CMatrix iq = CMatrix::Identity(ql, ql);
  const CMatrix ib = CMatrix::Identity(bl, bl);
  const CMatrix sp = raising(ql);
  const CMatrix a = raising(bl).adjoint();
  const CMatrix num = sp * sp.adjoint();
  CMatrix kerr = CMatrix::Zero(ql, ql);  // Delta n(n-1)/2, i.e. Delta |2><2| for 3 levels
  for (int n = 2; n < ql; ++n) kerr(n, n) = 0.5 * n * (n - 1);

  const CMatrix sp1 = kron3(sp, iq, ib);
  const CMatrix sp2 = kron3(iq, sp, ib);
  const CMatrix bus = kron3(iq, iq, a);
  const CMatrix n1 = kron3(num, iq, ib);
  const CMatrix n2 = kron3(iq, num, ib);

  CMatrix drift = p.delta1 * kron3(kerr, iq, ib) + p.delta2 * kron3(iq, kerr, ib);
  drift += 0.5 * p.g1 * (sp1 * bus + sp1.adjoint() * bus.adjoint());
  drift += 0.5 * p.g2 * (sp2 * bus + sp2.adjoint() * bus.adjoint());
  drift += p.offset1 * n1 + p.offset2 * n2;

  const QbqLayout lay{ql, bl};
  Projector proj{lay.index(0, 0, 0), lay.index(0, 1, 0), lay.index(1, 0, 0), lay.index(1, 1, 0)};
  return SystemModel(HermitianOp::symmetrized(drift), {HermitianOp(n1), HermitianOp(n2)},
                     std::move(proj), "qubit-bus-qubit");
}

CMatrix qbq_excitation_number(const QbqParams& p) {
  const int ql = p.qubit_levels;
  const int bl = p.bus_levels;
  const CMatrix iq = CMatrix::Identity(ql, ql);
  const CMatrix ib = CMatrix::Identity(bl, bl);
  const CMatrix sp = raising(ql);
  const CMatrix a = raising(bl).adjoint();
  return kron3(sp * sp.adjoint(), iq, ib) + kron3(iq, sp * sp.adjoint(), ib) +
         kron3(iq, iq, a.adjoint() * a);
}

Unitary cz_gate() {
  CMatrix m = CMatrix::Identity(4, 4);
  m(3, 3) = -1.0;
  return Unitary(std::move(m));
}

}  // namespace adhoc
