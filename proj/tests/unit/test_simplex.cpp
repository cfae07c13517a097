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
#include "adhoc/random.hpp"
#include "adhoc/simplex.hpp"
#include "doctest.h"

#include <cmath>

using namespace adhoc;

namespace {

// concave, max 1 at (0.3, -0.2, 0.1)
double bowl(std::span<const double> x) {
  const double c[3] = {0.3, -0.2, 0.1};
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - c[i]) * (x[i] - c[i]);
  return 1.0 - s;
}

}  // namespace

TEST_CASE("axis simplex in two dimensions is a right triangle") {
  const auto v = simplex_vertices({1.0, 2.0}, {0.5, 0.25}, SimplexInit::axis, 0);
  REQUIRE(v.size() == 3);
  CHECK(v[0] == Params{1.0, 2.0});
  CHECK(v[1] == Params{1.5, 2.0});
  CHECK(v[2] == Params{1.0, 2.25});
  const double dot =
      (v[1][0] - v[0][0]) * (v[2][0] - v[0][0]) + (v[1][1] - v[0][1]) * (v[2][1] - v[0][1]);
  CHECK(dot == 0.0);
}

TEST_CASE("bad spreads are rejected") {
  CHECK_THROWS_AS(simplex_vertices({0.0, 0.0}, {0.1, 0.0}, SimplexInit::axis, 0), ValidationError);
  CHECK_THROWS_AS(simplex_vertices({0.0, 0.0}, {0.1, -1.0}, SimplexInit::gaussian, 0), ValidationError);
  CHECK_THROWS_AS(simplex_vertices({0.0, 0.0}, {0.1}, SimplexInit::axis, 0), ValidationError);
  CHECK_THROWS_AS(simplex_vertices({}, {}, SimplexInit::axis, 0), ValidationError);
}

TEST_CASE("gaussian simplex is reproducible from its seed") {
  const Params b(5, 0.0), s(5, 0.1);
  CHECK(simplex_vertices(b, s, SimplexInit::gaussian, 11) ==
        simplex_vertices(b, s, SimplexInit::gaussian, 11));
  CHECK(simplex_vertices(b, s, SimplexInit::gaussian, 11) !=
        simplex_vertices(b, s, SimplexInit::gaussian, 12));
}

TEST_CASE("init sorts best first and counts evaluations") {
  int n = 0;
  auto f = scalar_objective([&n](std::span<const double> x) { ++n; return bowl(x); });
  const SimplexState s = init_simplex(f, {0.0, 0.0, 0.0}, {0.1, 0.1, 0.1});
  CHECK(s.eval_count == 4);
  CHECK(n == 4);
  for (std::size_t i = 1; i < s.estimates.size(); ++i)
    CHECK(s.estimates[i - 1].value >= s.estimates[i].value);
}

TEST_CASE("quadratic converges within 400 evaluations") {
  HaltingRule r;
  r.target_fidelity = 1.0 - 1e-6;
  r.max_evals = 400;
  const CalibrationResult c =
      calibrate(scalar_objective(bowl), {0.0, 0.0, 0.0}, {0.1, 0.1, 0.1}, r);
  CHECK(c.halt_reason == HaltReason::target_reached);
  CHECK(1.0 - c.best_fidelity < 1e-6);
  CHECK(c.eval_count <= 400);
}

TEST_CASE("plain reflection costs exactly one evaluation") {
  // f = x0 on {(0,0),(1,0),(0,1)}: the reflected point ties the best, so no expansion
  auto f = scalar_objective([](std::span<const double> x) { return x[0]; });
  SimplexState s = init_simplex(f, {0.0, 0.0}, {1.0, 1.0});
  s = nm_step(std::move(s), f);
  CHECK(s.last_step == StepKind::reflect);
  CHECK(s.last_step_evals == 1);
  CHECK(s.eval_count == 4);
}

TEST_CASE("expansion costs two evaluations") {
  auto f = scalar_objective([](std::span<const double> x) { return x[0] + 0.5 * x[1]; });
  SimplexState s = init_simplex(f, {0.0, 0.0}, {1.0, 1.0});
  s = nm_step(std::move(s), f);
  CHECK(s.last_step == StepKind::expand);
  CHECK(s.last_step_evals == 2);
}

TEST_CASE("shrink keeps the best vertex and costs k + 2 evaluations") {
  // only the base point is good; anything new is worse than every vertex
  auto f = scalar_objective([](std::span<const double> x) {
    if (x[0] == 0.0 && x[1] == 0.0 && x[2] == 0.0) return 1.0;
    const bool vertex = (x[0] == 1.0 || x[1] == 1.0 || x[2] == 1.0);
    return vertex ? 0.0 : -1.0;
  });
  SimplexState s = init_simplex(f, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
  s = nm_step(std::move(s), f);
  CHECK(s.last_step == StepKind::shrink);
  CHECK(s.last_step_evals == 3 + 2);
  CHECK(s.vertices.front() == Params{0.0, 0.0, 0.0});
  CHECK(s.best() == 1.0);
  for (std::size_t i = 1; i < s.vertices.size(); ++i) {
    double norm = 0.0;
    for (double v : s.vertices[i]) norm += v * v;
    CHECK(std::sqrt(norm) == doctest::Approx(0.5));
  }
}

TEST_CASE("budget halts before a step could overrun it") {
  HaltingRule r;
  r.max_evals = 3 + 2;  // k + 2
  const CalibrationResult c =
      calibrate(scalar_objective(bowl), {0.0, 0.0, 0.0}, {0.1, 0.1, 0.1}, r);
  CHECK(c.halt_reason == HaltReason::budget);
  CHECK(c.eval_count == 4);
  r.max_evals = 4;
  CHECK_THROWS_AS(calibrate(scalar_objective(bowl), {0.0, 0.0, 0.0}, {0.1, 0.1, 0.1}, r),
                  ValidationError);
  r.max_evals = 57;
  const CalibrationResult d =
      calibrate(scalar_objective(bowl), {0.0, 0.0, 0.0}, {0.1, 0.1, 0.1}, r);
  CHECK(d.eval_count <= 57);
}

TEST_CASE("target reached at the start costs one evaluation") {
  HaltingRule r;
  r.target_fidelity = 0.5;
  const CalibrationResult c = calibrate(scalar_objective(bowl), {0.3, -0.2, 0.1}, {0.1, 0.1, 0.1}, r);
  CHECK(c.halt_reason == HaltReason::target_reached);
  CHECK(c.eval_count == 1);
}

TEST_CASE("fixed threshold halts on the noise floor") {
  HaltingRule r;
  r.window = 3;
  r.fixed_threshold = 10.0;
  const CalibrationResult c =
      calibrate(scalar_objective(bowl), {0.0, 0.0, 0.0}, {0.1, 0.1, 0.1}, r);
  CHECK(c.halt_reason == HaltReason::noise_floor);
  CHECK(c.history.size() == 4);  // init + window steps
  CHECK(c.final_mean_delta_worst < c.final_threshold);
}

TEST_CASE("noise-derived threshold halts a heavily depolarized run") {
  HaltingRule r;
  r.window = 3;
  r.max_evals = 2000;
  r.threshold_source = HaltingRule::Threshold::noise;
  r.noise_dim = 4;
  int calls = 0;
  FidelityObjective f = [&calls](std::span<const double> x) {
    return depolarize_estimate(bowl(x), 0.3, 100, 4, derive_seed(7, {static_cast<std::uint64_t>(calls++)}));
  };
  const CalibrationResult c = calibrate(f, {0.0, 0.0, 0.0}, {0.1, 0.1, 0.1}, r);
  CHECK(c.halt_reason == HaltReason::noise_floor);
  CHECK(c.final_threshold > 0.0);
}

TEST_CASE("zero depolarization reproduces the clean trajectory exactly") {
  HaltingRule r;
  r.max_evals = 200;
  r.target_fidelity = 1.0 - 1e-8;
  const CalibrationResult clean =
      calibrate(scalar_objective(bowl), {0.0, 0.0, 0.0}, {0.1, 0.1, 0.1}, r, 3);
  int calls = 0;
  FidelityObjective twin = [&calls](std::span<const double> x) {
    return depolarize_estimate(bowl(x), 0.0, 144, 4, derive_seed(9, {static_cast<std::uint64_t>(calls++)}));
  };
  const CalibrationResult noisy = calibrate(twin, {0.0, 0.0, 0.0}, {0.1, 0.1, 0.1}, r, 3);
  CHECK(noisy.best == clean.best);
  CHECK(noisy.best_fidelity == clean.best_fidelity);
  CHECK(noisy.eval_count == clean.eval_count);
  REQUIRE(noisy.history.size() == clean.history.size());
  for (std::size_t i = 0; i < clean.history.size(); ++i) {
    CHECK(noisy.history[i].best == clean.history[i].best);
    CHECK(noisy.history[i].worst == clean.history[i].worst);
  }
}

TEST_CASE("non-finite objective values are treated as worst") {
  auto f = scalar_objective([](std::span<const double> x) { return x[0] > 0.05 ? std::nan("") : bowl(x); });
  HaltingRule r;
  r.max_evals = 100;
  const CalibrationResult c = calibrate(f, {0.0, 0.0, 0.0}, {0.1, 0.1, 0.1}, r);
  CHECK(std::isfinite(c.best_fidelity));
  CHECK(c.best[0] <= 0.05);
}
