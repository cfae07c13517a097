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

#include "adhoc/expsim.hpp"
#include "adhoc/fidelity.hpp"
#include "adhoc/grape.hpp"
#include "adhoc/propagate.hpp"
#include "adhoc/systems.hpp"
#include "doctest.h"
#include "oracles.hpp"

#include <numbers>
#include <random>

using namespace adhoc;

namespace {

double phi_of(const SystemModel& m, const ControlSet& u, const Unitary& t) {
  return process_fidelity(propagate(m, u, Execution::serial).total, t, m.projector());
}

ControlSet random_pulse(const TimeGrid& g, int channels, double scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, scale);
  RMatrix v(channels, g.slices());
  for (int c = 0; c < channels; ++c)
    for (int j = 0; j < g.slices(); ++j) v(c, j) = z(rng);
  return ControlSet(g, v);
}

/// Max relative componentwise error between the gradient and central differences.
double fd_check(const SystemModel& m, const ControlSet& u, const Unitary& t, double h = 1e-6) {
  const RMatrix g = grape_gradient(m, u, t, m.projector(), Execution::serial);
  double worst = 0.0;
  const double scale = std::max(g.cwiseAbs().maxCoeff(), 1e-3);
  for (int c = 0; c < u.channels(); ++c) {
    for (int j = 0; j < u.slices(); ++j) {
      ControlSet a = u, b = u;
      a.mutable_values()(c, j) += h;
      b.mutable_values()(c, j) -= h;
      const double fd = (phi_of(m, a, t) - phi_of(m, b, t)) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - g(c, j)) / std::max(std::abs(fd), scale));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("gradient matches central differences on random two-level systems") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto [m, t] = random_tls(s);
    const ControlSet u = random_pulse(TimeGrid(10.0, 20), 1, 1.0, s);
    CHECK(fd_check(m, u, t) < 1e-6);
  }
}

TEST_CASE("gradient matches central differences on the three-level drive model") {
  const SystemModel m = three_level_drag(-1.2);
  const Unitary x(pauli_x());
  for (std::uint64_t s = 0; s < 20; ++s) {
    const ControlSet u = random_pulse(TimeGrid(6.0, 12), 2, 0.5, 50 + s);
    CHECK(fd_check(m, u, x) < 1e-6);
  }
}

TEST_CASE("gradient matches central differences on the qubit-bus-qubit model") {
  QbqParams p;
  for (std::uint64_t s = 0; s < 20; ++s) {
    p.offset1 = 0.001 * static_cast<double>(s);
    const SystemModel m = qubit_bus_qubit(p);
    const ControlSet u = random_pulse(TimeGrid(20.0, 10), 2, 0.3, 100 + s);
    CHECK(fd_check(m, u, cz_gate()) < 1e-6);
  }
}

TEST_CASE("gradient vanishes at a perfect pulse") {
  const SystemModel m(HermitianOp(CMatrix::Zero(2, 2)), {HermitianOp(0.5 * pauli_x())}, Projector{0, 1}, "x");
  const Unitary target(Complex(0.0, -1.0) * pauli_x());
  const ControlSet u(TimeGrid(std::numbers::pi, 10), RMatrix::Ones(1, 10));
  CHECK(phi_of(m, u, target) == doctest::Approx(1.0));
  CHECK(grape_gradient(m, u, target, m.projector()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("gradient obeys the chain rule under control rescaling") {
  auto [m, t] = random_tls(4);
  const SystemModel twice(m.drift(), {HermitianOp(2.0 * m.controls()[0].matrix())}, m.projector(), "x2");
  const ControlSet u = random_pulse(TimeGrid(10.0, 20), 1, 1.0, 8);
  ControlSet half = u;
  half.mutable_values() *= 0.5;
  CHECK(phi_of(twice, half, t) == doctest::Approx(phi_of(m, u, t)).epsilon(1e-12));
  const RMatrix g1 = grape_gradient(m, u, t, m.projector());
  const RMatrix g2 = grape_gradient(twice, half, t, twice.projector());
  CHECK((g2 - 2.0 * g1).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("gradient through the transfer chain matches finite differences") {
  QbqParams p;
  const SystemModel m = qubit_bus_qubit(p);
  TransferChain chain;
  chain.kernel_sigma = 1.0;
  const ControlSet v = random_pulse(TimeGrid(20.0, 20), 2, 0.3, 9);
  const RMatrix gu = grape_gradient(m, apply_transfer(chain, v), cz_gate(), m.projector());
  const RMatrix gv = transfer_adjoint(chain, v.grid(), gu);
  auto f = [&](const ControlSet& x) { return phi_of(m, apply_transfer(chain, x), cz_gate()); };
  for (int j : {0, 7, 19}) {
    ControlSet a = v, b = v;
    a.mutable_values()(1, j) += 1e-6;
    b.mutable_values()(1, j) -= 1e-6;
    CHECK((f(a) - f(b)) / 2e-6 == doctest::Approx(gv(1, j)).epsilon(1e-6));
  }
}

TEST_CASE("serial and parallel gradients agree bit for bit") {
  const SystemModel m = qubit_bus_qubit(QbqParams{});
  const ControlSet u = random_pulse(TimeGrid(20.0, 20), 2, 0.3, 2);
  CHECK(grape_gradient(m, u, cz_gate(), m.projector(), Execution::serial) ==
        grape_gradient(m, u, cz_gate(), m.projector(), Execution::parallel));
}

TEST_CASE("optimizer keeps an optimal start") {
  const SystemModel m(HermitianOp(CMatrix::Zero(2, 2)), {HermitianOp(0.5 * pauli_x())}, Projector{0, 1}, "x");
  const Unitary target(Complex(0.0, -1.0) * pauli_x());
  const ControlSet u(TimeGrid(std::numbers::pi, 10), RMatrix::Ones(1, 10));
  const OpenLoopResult r = optimize_open(m, u, target, m.projector());
  CHECK(r.final_infidelity < 1e-12);
  CHECK(r.stop_reason == "goal");
  CHECK((r.controls.values() - u.values()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("optimizer converges on random two-level systems") {
  int ok = 0, admissible = 0;
  GrapeOptions o;
  o.max_iter = 500;
  o.infidelity_goal = 1e-10;
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto [m, t] = random_tls(s);
    if (controllability_eta(m) < 0.05) continue;
    ++admissible;
    const OpenLoopResult r = optimize_open(m, random_pulse(TimeGrid(10.0, 20), 1, 0.01, s), t, m.projector(), o);
    ok += r.final_infidelity < 1e-10;
    CHECK(r.infidelity_history.front() >= r.infidelity_history.back());
  }
  CHECK(ok >= 0.95 * admissible);
}

TEST_CASE("amplitude bound is respected") {
  auto [m, t] = random_tls(6);
  GrapeOptions o;
  o.amplitude_bound = 0.2;
  o.max_iter = 50;
  const OpenLoopResult r = optimize_open(m, random_pulse(TimeGrid(10.0, 20), 1, 1.0, 1), t, m.projector(), o);
  CHECK(r.controls.values().cwiseAbs().maxCoeff() <= 0.2);
  o.amplitude_bound = -1.0;
  CHECK_THROWS_AS(optimize_open(m, random_pulse(TimeGrid(10.0, 20), 1, 1.0, 1), t, m.projector(), o),
                  ValidationError);
}

TEST_CASE("cz on the nominal system reaches machine precision") {
  const NominalSpec spec;
  const SystemModel m = qubit_bus_qubit(spec.nominal);
  GrapeOptions o;
  o.max_iter = 3000;
  o.chain = nominal_chain(spec);
  const ControlSet u0 = random_pulse(TimeGrid(50.0, 50), 2, 0.01, 1);
  const OpenLoopResult r = optimize_open(m, u0, cz_gate(), m.projector(), o);
  CHECK(r.final_infidelity < 1e-8);
}
