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
#include "adhoc/propagate.hpp"
#include "adhoc/random.hpp"
#include "adhoc/simplex.hpp"
#include "adhoc/stats.hpp"
#include "doctest.h"

#include <cmath>
#include <concepts>
#include <type_traits>

using namespace adhoc;

namespace {

// nothing in the black box should hand out the realization
template <class T>
concept LeaksParams = requires(const T& t) { t.params(); } || requires(const T& t) { t.realization(); } ||
                      requires(const T& t) { t.model(); } || requires(const T& t) { t.chain(); };

ControlSet ramp(const TimeGrid& g) {
  RMatrix v(2, g.slices());
  for (int j = 0; j < g.slices(); ++j) {
    v(0, j) = 0.05 * std::sin(0.3 * j);
    v(1, j) = -0.04 * std::cos(0.2 * j);
  }
  return ControlSet(g, v);
}

}  // namespace

static_assert(!LeaksParams<BlackBox>);
static_assert(std::is_same_v<decltype(std::declval<const BlackBox&>().objective(0)), FidelityObjective>);

TEST_CASE("xi = 0 reproduces the nominal system") {
  NominalSpec spec;
  spec.xi = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const SystemRealization r = realize(spec, s);
    CHECK(r.params == spec.nominal);
    CHECK(r.sigma_filt == spec.sigma_filt);
  }
}

TEST_CASE("relative spread of the coupling is four percent") {
  const NominalSpec spec;
  std::vector<double> rel, off;
  for (std::uint64_t s = 0; s < 50000; ++s) {
    const SystemRealization r = realize(spec, s);
    rel.push_back(r.params.g1 / spec.nominal.g1 - 1.0);
    off.push_back(r.params.offset1);
    CHECK(r.sigma_filt >= 0.0);
  }
  auto sd = [](const std::vector<double>& v) {
    const double m = stats::mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / (v.size() - 1));
  };
  CHECK(std::abs(stats::mean(rel)) < 3.0 * 0.04 / std::sqrt(50000.0));
  CHECK(sd(rel) == doctest::Approx(0.04).epsilon(0.03));
  CHECK(sd(off) == doctest::Approx(spec.offset_std()).epsilon(0.03));
}

TEST_CASE("realizations scale along a common ray in xi") {
  NominalSpec a, b;
  a.xi = 1.0;
  b.xi = 2.0;
  const SystemRealization ra = realize(a, 42), rb = realize(b, 42);
  if (ra.attempts == 1 && rb.attempts == 1) {
    CHECK(rb.params.g1 - b.nominal.g1 == doctest::Approx(2.0 * (ra.params.g1 - a.nominal.g1)));
    CHECK(rb.params.offset2 == doctest::Approx(2.0 * ra.params.offset2));
  }
}

TEST_CASE("offset readings differ by two pi") {
  NominalSpec spec;
  const double plain = spec.offset_std();
  spec.offset_reading = OffsetReading::angular;
  CHECK(spec.offset_std() == doctest::Approx(2.0 * std::numbers::pi * plain));
  CHECK(plain == doctest::Approx(0.0061));
  CHECK_THROWS_AS(offset_reading_from_string("degrees"), ValidationError);
}

TEST_CASE("controllability of the Pauli pair") {
  const SystemModel m(HermitianOp(0.5 * pauli_z()), {HermitianOp(0.5 * pauli_x())}, Projector{0, 1}, "p");
  CHECK(controllability_eta(m) == doctest::Approx(0.5));
}

TEST_CASE("controllability vanishes for a control parallel to the drift") {
  const SystemModel m(HermitianOp(0.7 * pauli_z()), {HermitianOp(-1.3 * pauli_z())}, Projector{0, 1}, "z");
  CHECK(controllability_eta(m) == 0.0);
}

TEST_CASE("control distance in trivial cases") {
  const TimeGrid g(10.0, 5);
  const ControlSet init = ControlSet::zeros(g, 2);
  ControlSet mod(g, RMatrix::Constant(2, 5, 1.0));
  CHECK(control_distance_theta(init, mod, mod) == 0.0);
  ControlSet sys(g, RMatrix::Constant(2, 5, 3.0));
  CHECK(control_distance_theta(init, mod, sys) == doctest::Approx(2.0));
  CHECK(control_distance_theta(init, mod, init) == doctest::Approx(1.0));
  CHECK_THROWS_AS(control_distance_theta(init, init, sys), ValidationError);
  CHECK_THROWS_AS(control_distance_theta(init, mod, ControlSet::zeros(TimeGrid(10.0, 6), 2)),
                  ValidationError);
}

TEST_CASE("black box matches a direct simulation of the realization") {
  const NominalSpec spec;
  const SystemRealization r = realize(spec, 3);
  const TimeGrid g(50.0, 50);
  const ControlSet v = ramp(g);
  Estimator est;
  est.kind = FidelityKind::process;
  const BlackBox box(r, g, cz_gate(), est);
  const SystemModel m = qubit_bus_qubit(r.params);
  const Unitary u = propagate(m, apply_transfer(realized_chain(r), v), Execution::serial).total;
  CHECK(box.evaluate(v, 0).value == doctest::Approx(process_fidelity(u, cz_gate(), m.projector())).epsilon(1e-12));
  CHECK_THROWS_AS(box.evaluate(ControlSet::zeros(TimeGrid(50.0, 40), 2), 0), ValidationError);
}

TEST_CASE("calibration drives the black box only through its objective") {
  const NominalSpec spec;
  const SystemRealization r = realize(spec, 4);
  const TimeGrid g(50.0, 10);
  const BlackBox box(r, g, cz_gate(), Estimator{});
  const FidelityObjective f = box.objective(9);
  HaltingRule rule;
  rule.max_evals = 60;
  const CalibrationResult c = calibrate(f, ramp(g).flatten(), Params(20, 0.05), rule);
  CHECK(c.eval_count <= 60);
  CHECK(c.best_fidelity >= box.evaluate(ramp(g), 0).value);
}

TEST_CASE("noisy objectives with the same seed see the same noise") {
  const SystemRealization r = realize(NominalSpec{}, 5);
  const TimeGrid g(50.0, 10);
  Estimator est;
  est.kind = FidelityKind::noisy;
  est.p = 0.1;
  const BlackBox box(r, g, cz_gate(), est);
  FidelityObjective a = box.objective(1), b = box.objective(1), c = box.objective(2);
  const Params x = ramp(g).flatten();
  bool any_diff = false;
  for (int i = 0; i < 20; ++i) {
    const double va = a(x).value;
    CHECK(va == b(x).value);
    any_diff |= va != c(x).value;
  }
  CHECK(any_diff);
}

TEST_CASE("serial and parallel black boxes agree") {
  const SystemRealization r = realize(NominalSpec{}, 6);
  const TimeGrid g(50.0, 50);
  Estimator est;
  est.kind = FidelityKind::average_sampled;
  est.n_states = 50;
  const BlackBox s(r, g, cz_gate(), est, Execution::serial);
  const BlackBox p(r, g, cz_gate(), est, Execution::parallel);
  CHECK(s.evaluate(ramp(g), 77).value == p.evaluate(ramp(g), 77).value);
  const auto ser = parallel_map<double>(8, Execution::serial, [&](int i) {
    return s.evaluate(ramp(g), static_cast<std::uint64_t>(i)).value;
  });
  const auto par = parallel_map<double>(8, Execution::parallel, [&](int i) {
    return s.evaluate(ramp(g), static_cast<std::uint64_t>(i)).value;
  });
  CHECK(ser == par);
}

TEST_CASE("estimator validation") {
  Estimator e;
  e.kind = FidelityKind::noisy;
  e.p = 1.5;
  CHECK_THROWS_AS(e.validate(), ValidationError);
  e.p = 0.1;
  e.m = 0;
  CHECK_THROWS_AS(e.validate(), ValidationError);
  NominalSpec spec;
  spec.xi = -1.0;
  CHECK_THROWS_AS(realize(spec, 0), ValidationError);
}
