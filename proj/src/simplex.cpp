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

#include "adhoc/simplex.hpp"

#include "adhoc/random.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

namespace adhoc {

namespace {

FidelityEstimate call(const FidelityObjective& f, const Params& x, int& counter) {
  ++counter;
  FidelityEstimate e = f(std::span<const double>(x.data(), x.size()));
  if (!std::isfinite(e.value)) e.value = -std::numeric_limits<double>::infinity();
  return e;
}

void sort_vertices(SimplexState& s) {
  std::vector<std::size_t> order(s.vertices.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return s.estimates[a].value > s.estimates[b].value;
  });
  std::vector<Params> v;
  std::vector<FidelityEstimate> e;
  v.reserve(order.size());
  e.reserve(order.size());
  for (auto i : order) {
    v.push_back(std::move(s.vertices[i]));
    e.push_back(s.estimates[i]);
  }
  s.vertices = std::move(v);
  s.estimates = std::move(e);
}

bool affinely_independent(const std::vector<Params>& v) {
  const auto k = static_cast<Eigen::Index>(v.front().size());
  RMatrix m(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index r = 0; r < k; ++r) m(r, i) = v[i + 1][r] - v[0][r];
  Eigen::ColPivHouseholderQR<RMatrix> qr(m);
  qr.setThreshold(1e-12);
  return qr.rank() == k;
}

Params affine(const Params& a, const Params& b, double t) {  // a + t (b - a)
  Params out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + t * (b[i] - a[i]);
  return out;
}

SimplexState build(const FidelityObjective& objective, const std::vector<Params>& vertices,
                   std::optional<FidelityEstimate> base_estimate) {
  SimplexState s;
  s.vertices = vertices;
  s.estimates.resize(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (i == 0 && base_estimate) {
      s.estimates[0] = *base_estimate;
      continue;
    }
    s.estimates[i] = call(objective, vertices[i], s.eval_count);
  }
  sort_vertices(s);
  s.worst_history.push_back(s.worst());
  return s;
}

}  // namespace

FidelityObjective scalar_objective(std::function<double(std::span<const double>)> f) {
  return [f = std::move(f)](std::span<const double> x) {
    FidelityEstimate e;
    e.value = f(x);
    return e;
  };
}

std::string to_string(StepKind kind) {
  switch (kind) {
    case StepKind::reflect: return "reflect";
    case StepKind::expand: return "expand";
    case StepKind::contract_outside: return "contract_outside";
    case StepKind::contract_inside: return "contract_inside";
    case StepKind::shrink: return "shrink";
  }
  return "unknown";
}

std::string to_string(HaltReason r) {
  switch (r) {
    case HaltReason::target_reached: return "target_reached";
    case HaltReason::budget: return "budget";
    case HaltReason::noise_floor: return "noise_floor";
  }
  return "unknown";
}

std::vector<Params> simplex_vertices(const Params& base, const Params& spread, SimplexInit init,
                                     std::uint64_t seed) {
  const std::size_t k = base.size();
  if (k == 0) throw ValidationError("init_simplex: empty parameter vector");
  if (spread.size() != k) throw ValidationError("init_simplex: spread size differs from base");
  for (double s : spread)
    if (!(s > 0.0)) throw ValidationError("init_simplex: spreads must be > 0");

  if (init == SimplexInit::axis) {
    std::vector<Params> v(k + 1, base);
    for (std::size_t i = 0; i < k; ++i) v[i + 1][i] += spread[i];
    return v;
  }
  for (int attempt = 0; attempt < 10; ++attempt) {
    Rng rng(derive_seed(seed, {0x5157, static_cast<std::uint64_t>(attempt)}));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Params> v(k + 1, base);
    for (std::size_t i = 1; i <= k; ++i)
      for (std::size_t r = 0; r < k; ++r) v[i][r] += spread[r] * normal(rng);
    if (affinely_independent(v)) return v;
  }
  throw ValidationError("init_simplex: degenerate simplex after 10 draws");
}

SimplexState init_simplex(const FidelityObjective& objective, const Params& base,
                          const Params& spread, SimplexInit init, std::uint64_t seed) {
  return build(objective, simplex_vertices(base, spread, init, seed), std::nullopt);
}

SimplexState nm_step(SimplexState s, const FidelityObjective& objective,
                     const NelderMeadCoefficients& coef) {
  const std::size_t n = s.vertices.size();
  if (n < 2) throw ValidationError("nm_step: simplex needs at least 2 vertices");
  const std::size_t k = n - 1;
  const int before = s.eval_count;

  Params centroid(k, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t r = 0; r < k; ++r) centroid[r] += s.vertices[i][r] / static_cast<double>(k);

  const Params& worst = s.vertices[k];
  const double f_best = s.estimates.front().value;
  const double f_second = s.estimates[k - 1].value;
  const double f_worst = s.estimates[k].value;

  auto replace_worst = [&](Params x, FidelityEstimate e, StepKind kind) {
    s.vertices[k] = std::move(x);
    s.estimates[k] = e;
    s.last_step = kind;
  };

  const Params xr = affine(centroid, worst, -coef.reflection);
  const FidelityEstimate er = call(objective, xr, s.eval_count);
  bool do_shrink = false;
  if (er.value > f_best) {
    const Params xe = affine(centroid, xr, coef.expansion);
    const FidelityEstimate ee = call(objective, xe, s.eval_count);
    if (ee.value > er.value)
      replace_worst(xe, ee, StepKind::expand);
    else
      replace_worst(xr, er, StepKind::reflect);
  } else if (er.value > f_second) {
    replace_worst(xr, er, StepKind::reflect);
  } else if (er.value > f_worst) {
    const Params xc = affine(centroid, xr, coef.contraction);
    const FidelityEstimate ec = call(objective, xc, s.eval_count);
    if (ec.value >= er.value)
      replace_worst(xc, ec, StepKind::contract_outside);
    else
      do_shrink = true;
  } else {
    const Params xc = affine(centroid, worst, coef.contraction);
    const FidelityEstimate ec = call(objective, xc, s.eval_count);
    if (ec.value > f_worst)
      replace_worst(xc, ec, StepKind::contract_inside);
    else
      do_shrink = true;
  }
  if (do_shrink) {
    for (std::size_t i = 1; i < n; ++i) {
      s.vertices[i] = affine(s.vertices[0], s.vertices[i], coef.shrink);
      s.estimates[i] = call(objective, s.vertices[i], s.eval_count);
    }
    s.last_step = StepKind::shrink;
  }
  sort_vertices(s);
  ++s.iterations;
  s.last_step_evals = s.eval_count - before;
  s.worst_history.push_back(s.worst());
  return s;
}

void HaltingRule::validate(int k) const {
  if (window < 1) throw ValidationError("HaltingRule: window must be >= 1");
  if (max_evals < k + 2) throw ValidationError("HaltingRule: max_evals must be >= k + 2");
  if (threshold_source == Threshold::noise && noise_dim < 1)
    throw ValidationError("HaltingRule: noise_dim must be >= 1");
}

CalibrationResult calibrate(const FidelityObjective& objective, const Params& initial,
                            const Params& spread, const HaltingRule& rule, std::uint64_t seed,
                            SimplexInit init) {
  const int k = static_cast<int>(initial.size());
  rule.validate(k);
  const auto vertices = simplex_vertices(initial, spread, init, seed);

  CalibrationResult res;
  int base_evals = 0;
  const FidelityEstimate base = call(objective, initial, base_evals);
  if (base.value >= rule.target_fidelity) {
    res.best = initial;
    res.best_fidelity = base.value;
    res.eval_count = 1;
    res.halt_reason = HaltReason::target_reached;
    res.history.push_back({0, 1, base.value, base.value, 0.0, 0.0});
    return res;
  }
  SimplexState s = build(objective, vertices, base);
  s.eval_count += base_evals;

  auto threshold = [&]() {
    if (rule.threshold_source == HaltingRule::Threshold::fixed) return rule.fixed_threshold;
    const FidelityEstimate& b = s.estimates.front();
    if (b.samples < 1) return rule.fixed_threshold;
    return noise_threshold(b.depolarized, b.samples, b.value, rule.noise_dim,
                           rule.sigma_convention);
  };
  res.history.push_back({0, s.eval_count, s.best(), s.worst(), 0.0, threshold()});

  std::vector<double> deltas;
  for (;;) {
    if (s.best() >= rule.target_fidelity) {
      res.halt_reason = HaltReason::target_reached;
      break;
    }
    if (static_cast<int>(deltas.size()) >= rule.window) {
      const double mean =
          std::accumulate(deltas.end() - rule.window, deltas.end(), 0.0) / rule.window;
      const double th = threshold();
      res.final_mean_delta_worst = mean;
      res.final_threshold = th;
      if (mean < th) {
        res.halt_reason = HaltReason::noise_floor;
        break;
      }
    }
    if (s.eval_count + k + 2 > rule.max_evals) {
      res.halt_reason = HaltReason::budget;
      break;
    }
    const double prev_worst = s.worst();
    s = nm_step(std::move(s), objective);
    deltas.push_back(s.worst() - prev_worst);
    res.history.push_back(
        {s.iterations, s.eval_count, s.best(), s.worst(), deltas.back(), threshold()});
  }
  if (static_cast<int>(deltas.size()) >= rule.window && res.halt_reason != HaltReason::noise_floor) {
    res.final_mean_delta_worst =
        std::accumulate(deltas.end() - rule.window, deltas.end(), 0.0) / rule.window;
    res.final_threshold = threshold();
  }
  res.best = s.vertices.front();
  res.best_fidelity = s.best();
  res.eval_count = s.eval_count;
  return res;
}

}  // namespace adhoc
