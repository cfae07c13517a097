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
#include <random>

using namespace adhoc;

namespace {

const Projector kQubit{0, 1};

/// Haar-random pure state from normalized complex Gaussians (independent of the library).
CVector random_state(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  CVector v(d);
  for (int i = 0; i < d; ++i) v(i) = Complex(z(rng), z(rng));
  return v / v.norm();
}

/// Monte-Carlo mean of |<psi| V^dagger M |psi>|^2 with its standard error.
std::pair<double, double> state_average(const CMatrix& m, const CMatrix& v, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double s = 0.0, s2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const CVector psi = random_state(static_cast<int>(m.rows()), rng);
    const double f = std::norm((v * psi).dot(m * psi));
    s += f;
    s2 += f * f;
  }
  const double mean = s / n;
  return {mean, std::sqrt((s2 / n - mean * mean) / n)};
}

}  // namespace

TEST_CASE("process fidelity basics") {
  const Unitary t = haar_unitary(2, 5);
  CHECK(process_fidelity(t, t, kQubit) == doctest::Approx(1.0));
  for (double a : {0.3, 1.7, -2.9}) {
    const Unitary ph(std::exp(Complex(0.0, a)) * t.matrix());
    CHECK(process_fidelity(ph, t, kQubit) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(process_fidelity(Unitary(pauli_x()), Unitary::identity(2), kQubit) == doctest::Approx(0.0));
  CHECK_THROWS_AS(process_fidelity(t, Unitary::identity(3), kQubit), ValidationError);
}

TEST_CASE("average fidelity closed form") {
  const Unitary t = haar_unitary(2, 9);
  CHECK(avg_fidelity_analytic(t, t, kQubit) == doctest::Approx(1.0));
  CHECK(avg_fidelity_analytic(CMatrix(CMatrix::Zero(2, 2)), Unitary::identity(2)) == doctest::Approx(0.0));
  CHECK(avg_fidelity_analytic(Unitary(pauli_z()), Unitary::identity(2), kQubit) ==
        doctest::Approx(1.0 / 3.0));
  const auto [mean, se] = state_average(pauli_z(), CMatrix::Identity(2, 2), 100000, 77);
  CHECK(std::abs(mean - 1.0 / 3.0) < 3.0 * se);
}

TEST_CASE("average and process fidelity are consistent without leakage") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    for (int d : {2, 4}) {
      const Unitary u = haar_unitary(d, 100 + s), t = haar_unitary(d, 200 + s);
      Projector p(d);
      std::iota(p.begin(), p.end(), 0);
      const double phi = process_fidelity(u, t, p);
      CHECK(std::abs(avg_fidelity_analytic(u, t, p) - (d * phi + 1.0) / (d + 1.0)) < 1e-12);
    }
  }
}

TEST_CASE("sampled average fidelity agrees with the closed form") {
  const StateChannel id = [](const CMatrix& rho) { return rho; };
  const FidelityEstimate e = avg_fidelity_sampled(id, 2, Unitary::identity(2), kQubit, 50, 3);
  CHECK(e.value == doctest::Approx(1.0).epsilon(1e-14));
  int inside = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Unitary u = haar_unitary(2, 300 + s), t = haar_unitary(2, 400 + s);
    const FidelityEstimate est = avg_fidelity_sampled(unitary_channel(u), 2, t, kQubit, 2000, s);
    inside += std::abs(est.value - avg_fidelity_analytic(u, t, kQubit)) < 3.0 * est.std_error;
  }
  CHECK(inside >= 19);  // 3 sigma: ~0.3% miss rate per case
  const Unitary u = haar_unitary(2, 1);
  const auto a = avg_fidelity_sampled(unitary_channel(u), 2, Unitary::identity(2), kQubit, 100, 9);
  const auto b = avg_fidelity_sampled(unitary_channel(u), 2, Unitary::identity(2), kQubit, 100, 9);
  CHECK(a.value == b.value);
}

TEST_CASE("projected sampling matches the state-channel route") {
  const Unitary u = haar_unitary(4, 12), t = haar_unitary(2, 13);
  const Projector p{1, 3};
  const CMatrix pu = restrict_to(u.matrix(), p);
  const auto e = avg_fidelity_sampled(pu, t, 4000, 5);
  CHECK(std::abs(e.value - avg_fidelity_analytic(u, t, p)) < 4.0 * e.std_error);
}

TEST_CASE("cz phase measure") {
  CHECK(cz_phase_fidelity(cz_gate().matrix()) == doctest::Approx(1.0));
  // U = I: brackets 2, 2, 0 with unit moduli
  CHECK(cz_phase_fidelity(CMatrix(CMatrix::Identity(4, 4))) == doctest::Approx((2.0 + 2.0 + 0.0) / 6.0));
  CMatrix zero = CMatrix::Identity(4, 4);
  zero(1, 1) = zero(2, 2) = zero(3, 3) = 0.0;
  CHECK(cz_phase_fidelity(zero) == 0.0);
  // single-qubit phases on the 01 and 10 diagonals lower the measure
  CMatrix z = cz_gate().matrix();
  z(1, 1) = std::exp(Complex(0.0, 0.4));
  CHECK(cz_phase_fidelity(z) < 1.0);
  CHECK_THROWS_AS(cz_phase_fidelity(CMatrix(CMatrix::Identity(3, 3))), ValidationError);
}

TEST_CASE("free-phase fidelity ignores the phase of a spectator level") {
  CMatrix m = CMatrix::Identity(3, 3);
  m.block(0, 0, 2, 2) = pauli_x();
  m(2, 2) = std::exp(Complex(0.0, 1.1));
  CHECK(process_fidelity_free_phases(Unitary(m), Unitary(pauli_x()), kQubit, {2}) ==
        doctest::Approx(1.0));
}

TEST_CASE("depolarizing estimator limits and mean") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto a = depolarize_estimate(0.9, 0.0, 100, 4, s);
    CHECK(a.depolarized == 0);
    CHECK(a.value == 0.9);
    const auto b = depolarize_estimate(0.9, 1.0, 100, 4, s);
    CHECK(b.depolarized == 100);
    CHECK(b.value == doctest::Approx(0.25));
  }
  // E[phi_noisy] = p/d + (1 - p) phi for binomial n
  const int n = 10000;
  double s = 0.0, s2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double v = depolarize_estimate(0.9, 0.1, 100, 4, 5000 + k).value;
    s += v;
    s2 += v * v;
  }
  const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(std::abs(mean - 0.835) < 3.0 * se);
  CHECK_THROWS_AS(depolarize_estimate(0.9, 1.5, 100, 4, 0), ValidationError);
  CHECK_THROWS_AS(depolarize_estimate(0.9, 0.1, 0, 4, 0), ValidationError);
}

TEST_CASE("noise threshold") {
  // n = 0, m = 144, phi = 1, d = 2; verbatim sigma_p = 1/144
  const double s = 1.0 / 144.0;
  const double upper = (2.0 - s) / (2.0 * (1.0 - s));
  const double lower = (2.0 + s) / (2.0 * (1.0 + s));
  CHECK(noise_threshold(0, 144, 1.0, 2) == doctest::Approx(upper - lower).epsilon(1e-14));
  CHECK(sigma_p(144, SigmaConvention::verbatim) == doctest::Approx(1.0 / 144.0));
  CHECK(sigma_p(144, SigmaConvention::uniform_var) == doctest::Approx(1.0 / std::sqrt(12.0 * 144.0)));
  // shrinks as m grows at fixed n/m
  double prev = 1e9;
  for (int m = 100; m <= 1000000; m *= 10) {
    const double th = noise_threshold(m / 50, m, 0.95, 4);
    CHECK(th < prev);
    CHECK(th > 0.0);
    prev = th;
  }
  CHECK_THROWS_AS(noise_threshold(5, 4, 0.9, 2), ValidationError);
}

TEST_CASE("DRAG correction lowers leakage out of the qubit") {
  const double delta = 2.0 * std::numbers::pi * -0.2;  // -200 MHz in rad/ns
  const SystemModel m = three_level_drag(delta);
  const TimeGrid g(8.0, 80);
  const double sigma = 8.0 / 5.0;
  const double amp = std::sqrt(std::numbers::pi / 2.0) / sigma;  // area pi for a Gaussian
  auto run = [&](double scale) { return propagate(m, render_gaussian_drag({amp, sigma, scale}, g)).total; };
  auto leakage = [](const Unitary& u) { return std::norm(u.matrix()(2, 0)) + std::norm(u.matrix()(2, 1)); };
  const Unitary plain = run(0.0), drag = run(-1.0 / (2.0 * delta)), wrong = run(1.0 / (2.0 * delta));
  // strong 8 ns drive: first-order DRAG buys a factor of a few, not orders
  CHECK(leakage(drag) < 0.25 * leakage(plain));
  CHECK(leakage(wrong) > leakage(plain));
  CHECK(std::norm(drag.matrix()(1, 0)) > std::norm(plain.matrix()(1, 0)));
}
