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

#include "adhoc/scenarios.hpp"

#include "adhoc/propagate.hpp"
#include "adhoc/random.hpp"
#include "adhoc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>

namespace adhoc {

namespace {

// Stream tags for derive_seed, one per independent use of the master seed.
enum Tag : std::uint64_t {
  kGrapeInit = 0x10,
  kRealization = 0x20,
  kCalibration = 0x21,
  kTls = 0x30,
  kTlsGrape = 0x31,
  kDrag = 0x40,
  kNoise = 0x50,
};

Params flat(const ControlSet& c) { return c.flatten(); }

ControlSet from_flat(const ControlSet& like, const Params& x) {
  return ControlSet::unflatten(like.grid(), like.channels(), std::span<const double>(x));
}

/// eval count at which the best value first reached `goal`, or -1.
int evals_to(const CalibrationResult& r, double goal) {
  for (const auto& h : r.history)
    if (h.best >= goal) return h.eval_count;
  return -1;
}

/// Best error (1 - best) after each of the first max_evals evaluations,
/// sampled on the grid 0, step, 2 step, ...
std::vector<double> error_curve(const CalibrationResult& r, int max_evals, int step) {
  std::vector<double> out;
  std::size_t h = 0;
  double best_err = 1.0;
  for (int e = 0; e <= max_evals; e += step) {
    while (h < r.history.size() && r.history[h].eval_count <= e) {
      best_err = 1.0 - r.history[h].best;
      ++h;
    }
    out.push_back(best_err);
  }
  return out;
}

Json halting_summary(const CalibrationResult& r) {
  return {{"eval_count", r.eval_count},
          {"halt_reason", to_string(r.halt_reason)},
          {"best_fidelity", r.best_fidelity},
          {"iterations", r.history.empty() ? 0 : r.history.back().iteration}};
}

SystemRealization nominal_realization(const NominalSpec& spec) {
  SystemRealization r;
  r.params = spec.nominal;
  r.sigma_filt = spec.sigma_filt;
  return r;
}

double analytic_fidelity(const SystemRealization& real, const ControlSet& v) {
  Estimator est;
  return blackbox_fidelity(real, v, est, cz_gate(), 0).value;
}

GrapeOptions grape_options(const RunConfig& cfg) {
  GrapeOptions o;
  o.max_iter = cfg.grape.max_iter;
  o.grad_tol = cfg.grape.grad_tol;
  o.infidelity_goal = cfg.grape.infidelity_goal;
  o.amplitude_bound = cfg.grape.amplitude_bound;
  return o;
}

// --- random two-level systems -----------------------------------------------

struct TlsTask {
  SystemModel model;
  Unitary target;
  TimeGrid grid;
};

TlsTask tls_task(const RunConfig& cfg, std::uint64_t instance_seed) {
  auto [model, target] = random_tls(instance_seed);
  return {std::move(model), std::move(target), TimeGrid(cfg.tls.total_time, cfg.tls.slices)};
}

FidelityObjective tls_objective(const TlsTask& t) {
  return [&t](std::span<const double> x) {
    const ControlSet u = ControlSet::unflatten(t.grid, 1, x);
    FidelityEstimate e;
    e.kind = FidelityKind::average_analytic;
    e.value = avg_fidelity_analytic(projected_gate(t.model, u, Execution::serial), t.target);
    return e;
  };
}

ControlSet small_random(const TimeGrid& grid, int channels, double std, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> z(0.0, std);
  RMatrix v(channels, grid.slices());
  for (int c = 0; c < channels; ++c)
    for (int j = 0; j < grid.slices(); ++j) v(c, j) = std > 0.0 ? z(rng) : 0.0;
  return ControlSet(grid, std::move(v));
}

struct TlsRow {
  std::uint64_t seed = 0;
  double eta = 0.0;
  bool admissible = true;
  CalibrationResult nm;
  int nm_evals_to_goal = -1;
  int hybrid_grape_evals = 0;
  int hybrid_evals_to_goal = -1;
  double grape_iters_per_decade = std::nan("");
  double grape_final_infidelity = 1.0;
  std::vector<double> curve;
};

TlsRow run_tls_instance(const RunConfig& cfg, int i, bool hybrid, int curve_step) {
  TlsRow row;
  row.seed = derive_seed(cfg.seed, {kTls, static_cast<std::uint64_t>(i)});
  const TlsTask task = tls_task(cfg, row.seed);
  row.eta = controllability_eta(task.model);
  row.admissible = row.eta >= cfg.tls.eta_floor;
  const auto& nm = cfg.random_gates.nm;
  const HaltingRule rule = halting_rule(nm, 2, SigmaConvention::verbatim);
  const FidelityObjective obj = tls_objective(task);
  const int k = task.grid.slices();

  row.nm = calibrate(obj, Params(k, 0.0), Params(k, nm.spread), rule,
                     derive_seed(row.seed, {kCalibration}), simplex_init(nm));
  row.nm_evals_to_goal = evals_to(row.nm, 1.0 - cfg.random_gates.error_goal);
  row.curve = error_curve(row.nm, nm.max_evals, curve_step);
  if (!hybrid) return row;

  const ControlSet guess =
      small_random(task.grid, 1, cfg.grape.init_std, derive_seed(row.seed, {kTlsGrape}));
  GrapeOptions o = grape_options(cfg);
  o.exec = Execution::serial;
  // Convergence rate of the gradient search alone.
  o.infidelity_goal = 1e-10;
  o.max_iter = 500;
  const OpenLoopResult full = optimize_open(task.model, guess, task.target, {0, 1}, o);
  row.grape_final_infidelity = full.final_infidelity;
  if (full.final_infidelity <= 1e-10 && full.initial_infidelity > 1e-10) {
    const double decades = std::log10(full.initial_infidelity / std::max(full.final_infidelity, 1e-300));
    row.grape_iters_per_decade = full.iterations / decades;
  }
  // GRAPE up to the handoff point, then NM.
  o.infidelity_goal = cfg.random_gates.handoff_infidelity;
  o.max_iter = cfg.grape.max_iter;
  const OpenLoopResult handoff = optimize_open(task.model, guess, task.target, {0, 1}, o);
  row.hybrid_grape_evals = handoff.evaluations;
  const CalibrationResult tail =
      calibrate(obj, flat(handoff.controls), Params(k, cfg.random_gates.hybrid_spread), rule,
                derive_seed(row.seed, {kCalibration, 1}), simplex_init(nm));
  const int tail_evals = evals_to(tail, 1.0 - cfg.random_gates.error_goal);
  if (tail_evals >= 0) row.hybrid_evals_to_goal = handoff.evaluations + tail_evals;
  return row;
}

std::vector<TlsRow> run_tls_ensemble(const RunConfig& cfg, bool hybrid, int curve_step) {
  return parallel_map<TlsRow>(cfg.tls.instances, Execution::parallel, [&](int i) {
    return run_tls_instance(cfg, i, hybrid, curve_step);
  });
}

ScenarioRecord random_gates(const RunConfig& cfg) {
  constexpr int kStep = 10;
  const auto rows = run_tls_ensemble(cfg, cfg.random_gates.hybrid, kStep);
  ScenarioRecord rec;
  std::vector<double> nm_evals, hybrid_evals, per_decade;
  int admissible = 0, reached = 0;
  std::vector<std::vector<double>> curves;
  for (const auto& r : rows) {
    rec.rows.push_back({{"seed", r.seed},
                        {"eta", r.eta},
                        {"admissible", r.admissible},
                        {"nm_evals_to_goal", r.nm_evals_to_goal},
                        {"nm_final_error", 1.0 - r.nm.best_fidelity},
                        {"nm_eval_count", r.nm.eval_count},
                        {"halt_reason", to_string(r.nm.halt_reason)},
                        {"hybrid_grape_evals", r.hybrid_grape_evals},
                        {"hybrid_evals_to_goal", r.hybrid_evals_to_goal},
                        {"grape_iterations_per_decade",
                         std::isnan(r.grape_iters_per_decade) ? Json(nullptr)
                                                              : Json(r.grape_iters_per_decade)},
                        {"grape_final_infidelity", r.grape_final_infidelity}});
    if (!r.admissible) continue;
    ++admissible;
    curves.push_back(r.curve);
    if (r.nm_evals_to_goal >= 0) {
      ++reached;
      nm_evals.push_back(r.nm_evals_to_goal);
      if (r.hybrid_evals_to_goal >= 0) hybrid_evals.push_back(r.hybrid_evals_to_goal);
    }
    if (!std::isnan(r.grape_iters_per_decade)) per_decade.push_back(r.grape_iters_per_decade);
  }
  rec.plot = CsvTable({"eval_count", "median_error", "mean_error"});
  std::vector<double> median_curve;
  if (!curves.empty()) {
    for (std::size_t p = 0; p < curves.front().size(); ++p) {
      std::vector<double> col;
      for (const auto& c : curves) col.push_back(c[p]);
      median_curve.push_back(stats::median(col));
      rec.plot.add_row({static_cast<long long>(p * kStep), median_curve.back(), stats::mean(col)});
    }
  }
  bool monotone = !median_curve.empty();
  for (std::size_t p = 1; p < median_curve.size(); ++p)
    monotone = monotone && median_curve[p] <= median_curve[p - 1];
  monotone = monotone && median_curve.back() < median_curve.front();
  rec.summary = {{"instances", static_cast<int>(rows.size())},
                 {"admissible", admissible},
                 {"reached_goal", reached},
                 {"fraction_reached", admissible ? static_cast<double>(reached) / admissible : 0.0},
                 {"median_curve_monotone", monotone},
                 {"median_nm_evals_to_goal", nm_evals.empty() ? Json(nullptr) : Json(stats::median(nm_evals))},
                 {"median_hybrid_evals_to_goal",
                  hybrid_evals.empty() ? Json(nullptr) : Json(stats::median(hybrid_evals))},
                 {"median_grape_iterations_per_decade",
                  per_decade.empty() ? Json(nullptr) : Json(stats::median(per_decade))}};
  return rec;
}

ScenarioRecord eta_study(const RunConfig& cfg) {
  const auto rows = run_tls_ensemble(cfg, false, cfg.random_gates.nm.max_evals);
  ScenarioRecord rec;
  rec.plot = CsvTable({"eta", "eval_count", "reached_target"});
  std::vector<double> eta, evals;
  for (const auto& r : rows) {
    const bool reached = r.nm.halt_reason == HaltReason::target_reached;
    rec.rows.push_back({{"seed", r.seed},
                        {"eta", r.eta},
                        {"admissible", r.admissible},
                        {"eval_count", r.nm.eval_count},
                        {"halt_reason", to_string(r.nm.halt_reason)},
                        {"final_error", 1.0 - r.nm.best_fidelity}});
    rec.plot.add_row({r.eta, static_cast<long long>(r.nm.eval_count),
                      static_cast<long long>(reached ? 1 : 0)});
    if (!r.admissible) continue;
    eta.push_back(r.eta);
    evals.push_back(r.nm.eval_count);
  }
  rec.summary = {{"instances", static_cast<int>(rows.size())},
                 {"admissible", static_cast<int>(eta.size())},
                 {"spearman_eta_evals", eta.size() >= 2 ? Json(stats::spearman(eta, evals)) : Json(nullptr)}};
  return rec;
}

// --- qubit-bus-qubit ---------------------------------------------------------

ScenarioRecord cz_sensitivity(const RunConfig& cfg) {
  const CzDesign d = design_cz_pulse(cfg, cfg.grape.infidelity_goal);
  const auto& s = cfg.cz_sensitivity;
  std::vector<double> values;
  for (int i = 0; i < s.points; ++i)
    values.push_back(s.g1_rel_min + (s.g1_rel_max - s.g1_rel_min) * i / (s.points - 1));
  ScenarioRecord rec = run_scan(cfg, d.result.controls, "g1", values);
  rec.plot = CsvTable({"g1_relative_error", "infidelity"});
  for (const auto& r : rec.rows)
    rec.plot.add_row({r["value"].get<double>(), r["infidelity"].get<double>()});
  const ScenarioRecord plus5 = run_scan(cfg, d.result.controls, "g1", {0.05});
  rec.summary = {{"model_infidelity", d.result.final_infidelity},
                 {"grape_iterations", d.result.iterations},
                 {"grape_stop_reason", d.result.stop_reason},
                 {"infidelity_at_g1_plus_5_percent", plus5.rows[0]["infidelity"]},
                 {"avg_infidelity_at_g1_plus_5_percent", plus5.rows[0]["avg_infidelity"]}};
  return rec;
}

struct RecoveryRow {
  std::uint64_t seed = 0;
  double pre = 0.0;
  double post = 0.0;
  CalibrationResult cal;
};

ScenarioRecord adhoc_recovery(const RunConfig& cfg) {
  const CzDesign d = design_cz_pulse(cfg, cfg.grape.infidelity_goal);
  const NominalSpec spec = nominal_spec(cfg);
  const Estimator est = estimator(cfg.estimator);
  const auto rows = parallel_map<RecoveryRow>(
      cfg.adhoc_recovery.realizations, Execution::parallel, [&](int i) {
        RecoveryRow r;
        r.seed = derive_seed(cfg.seed, {kRealization, static_cast<std::uint64_t>(i)});
        const SystemRealization real = realize(spec, r.seed);
        r.pre = analytic_fidelity(real, d.result.controls);
        r.cal = calibrate_realization(cfg, real, d.result.controls, est, cfg.adhoc_recovery.nm,
                                      derive_seed(r.seed, {kCalibration}));
        r.post = analytic_fidelity(real, from_flat(d.result.controls, r.cal.best));
        return r;
      });
  ScenarioRecord rec;
  rec.plot = CsvTable({"seed", "pre_fidelity", "post_fidelity", "eval_count"});
  std::vector<double> pre;
  int tenfold = 0;
  for (const auto& r : rows) {
    const bool ok = (1.0 - r.post) <= (1.0 - r.pre) / 10.0;
    tenfold += ok;
    pre.push_back(r.pre);
    rec.rows.push_back({{"seed", r.seed},
                        {"pre_fidelity", r.pre},
                        {"post_fidelity", r.post},
                        {"eval_count", r.cal.eval_count},
                        {"halt_reason", to_string(r.cal.halt_reason)},
                        {"tenfold_improvement", ok}});
    rec.plot.add_row({std::to_string(r.seed), r.pre, r.post, static_cast<long long>(r.cal.eval_count)});
  }
  rec.summary = {{"realizations", static_cast<int>(rows.size())},
                 {"model_infidelity", d.result.final_infidelity},
                 {"pre_min", *std::min_element(pre.begin(), pre.end())},
                 {"pre_max", *std::max_element(pre.begin(), pre.end())},
                 {"pre_p10", stats::quantile(pre, 0.1)},
                 {"pre_median", stats::median(pre)},
                 {"tenfold_fraction", static_cast<double>(tenfold) / rows.size()}};
  return rec;
}

/// Widest run of consecutive grid points around the centre with error <= limit.
std::pair<int, int> plateau(const std::vector<double>& err, double limit) {
  const int c = static_cast<int>(err.size() / 2);
  if (err[c] > limit) return {c, c - 1};  // empty
  int lo = c, hi = c;
  while (lo > 0 && err[lo - 1] <= limit) --lo;
  while (hi + 1 < static_cast<int>(err.size()) && err[hi + 1] <= limit) ++hi;
  return {lo, hi};
}

ScenarioRecord dc_offset_scan(const RunConfig& cfg) {
  const CzDesign d = design_cz_pulse(cfg, cfg.grape.infidelity_goal);
  const NominalSpec spec = nominal_spec(cfg);
  const auto& s = cfg.dc_offset_scan;
  const Estimator est = estimator(cfg.estimator);
  std::vector<double> offsets;
  for (int i = 0; i < s.points; ++i)
    offsets.push_back(spec.offset_std() * s.offset_max_std * (2.0 * i / (s.points - 1) - 1.0));
  struct Row {
    double pre = 0.0, post = 0.0;
    CalibrationResult cal;
  };
  const auto rows = parallel_map<Row>(s.points, Execution::parallel, [&](int i) {
    SystemRealization real = nominal_realization(spec);
    real.params.offset1 = offsets[i];
    real.params.offset2 = offsets[i];
    Row r;
    r.pre = analytic_fidelity(real, d.result.controls);
    r.cal = calibrate_realization(cfg, real, d.result.controls, est, s.nm,
                                  derive_seed(cfg.seed, {kCalibration, static_cast<std::uint64_t>(i)}));
    r.post = analytic_fidelity(real, from_flat(d.result.controls, r.cal.best));
    return r;
  });
  ScenarioRecord rec;
  rec.plot = CsvTable({"offset", "pre_error", "post_error"});
  std::vector<double> pre_err, post_err;
  for (int i = 0; i < s.points; ++i) {
    pre_err.push_back(1.0 - rows[i].pre);
    post_err.push_back(1.0 - rows[i].post);
    rec.rows.push_back({{"offset", offsets[i]},
                        {"pre_error", pre_err.back()},
                        {"post_error", post_err.back()},
                        {"eval_count", rows[i].cal.eval_count},
                        {"halt_reason", to_string(rows[i].cal.halt_reason)}});
    rec.plot.add_row({offsets[i], pre_err.back(), post_err.back()});
  }
  const auto pre_p = plateau(pre_err, s.plateau_error);
  const auto post_p = plateau(post_err, s.plateau_error);
  auto width = [](std::pair<int, int> p) { return std::max(0, p.second - p.first + 1); };
  const bool contains = post_p.first <= pre_p.first && post_p.second >= pre_p.second &&
                        width(post_p) > width(pre_p);
  auto edge = [&](int i) { return offsets[std::clamp(i, 0, s.points - 1)]; };
  rec.summary = {{"offset_std", spec.offset_std()},
                 {"pre_plateau_points", width(pre_p)},
                 {"post_plateau_points", width(post_p)},
                 {"pre_plateau", width(pre_p) ? Json::array({edge(pre_p.first), edge(pre_p.second)}) : Json(nullptr)},
                 {"post_plateau", width(post_p) ? Json::array({edge(post_p.first), edge(post_p.second)}) : Json(nullptr)},
                 {"post_strictly_contains_pre", contains}};
  return rec;
}

ScenarioRecord noise_halting(const RunConfig& cfg) {
  const CzDesign d = design_cz_pulse(cfg, cfg.grape.infidelity_goal);
  const NominalSpec spec = nominal_spec(cfg);
  const SystemRealization real = realize(spec, derive_seed(cfg.seed, {kNoise}));
  const auto& s = cfg.noise_halting;
  const SigmaConvention conv = sigma_convention_from_string(cfg.estimator.sigma_convention);

  Estimator noisy;
  noisy.kind = FidelityKind::noisy;
  noisy.noisy_base = FidelityKind::process;
  noisy.p = s.p;
  noisy.m = s.m;
  noisy.sigma_convention = conv;
  Estimator clean;
  clean.kind = FidelityKind::process;

  NmConfig clean_nm = s.nm;
  clean_nm.threshold = "fixed";
  clean_nm.fixed_threshold = 0.0;
  const std::uint64_t cal_seed = derive_seed(cfg.seed, {kNoise, kCalibration});
  // The noisy objective is wrapped only to note the first evaluation that
  // actually depolarized; the calibrator still sees the plain black box.
  const BlackBox noisy_box(real, d.result.controls.grid(), cz_gate(), noisy);
  const FidelityObjective noisy_raw = noisy_box.objective(cal_seed);
  int evals_seen = 0, first_depolarized = -1;
  const FidelityObjective noisy_obj = [&](std::span<const double> x) {
    FidelityEstimate e = noisy_raw(x);
    ++evals_seen;
    if (first_depolarized < 0 && e.depolarized > 0) first_depolarized = evals_seen;
    return e;
  };
  const Params x0 = flat(d.result.controls);
  const CalibrationResult a =
      calibrate(noisy_obj, x0, Params(x0.size(), s.nm.spread),
                halting_rule(s.nm, 4, conv), derive_seed(cal_seed, {0x51}), simplex_init(s.nm));
  const CalibrationResult b =
      calibrate_realization(cfg, real, d.result.controls, clean, clean_nm, cal_seed);

  // History entries completed before the first depolarization must agree.
  std::size_t clean_prefix = 0;
  while (clean_prefix < a.history.size() &&
         (first_depolarized < 0 || a.history[clean_prefix].eval_count < first_depolarized))
    ++clean_prefix;
  std::size_t shared = 0;
  while (shared < a.history.size() && shared < b.history.size() &&
         a.history[shared].best == b.history[shared].best &&
         a.history[shared].worst == b.history[shared].worst &&
         a.history[shared].eval_count == b.history[shared].eval_count)
    ++shared;

  const double noisy_true_error =
      1.0 - blackbox_fidelity(real, from_flat(d.result.controls, a.best), clean, cz_gate(), 0).value;
  double clean_error_same_evals = 1.0;
  for (const auto& h : b.history)
    if (h.eval_count <= a.eval_count) clean_error_same_evals = 1.0 - h.best;

  ScenarioRecord rec;
  rec.plot = CsvTable({"run", "iteration", "eval_count", "best", "worst", "delta_worst", "threshold"});
  for (const auto& [name, r] : {std::pair<std::string, const CalibrationResult*>{"noisy", &a},
                                {"noiseless", &b}}) {
    for (const auto& h : r->history) {
      rec.rows.push_back({{"run", name},
                          {"iteration", h.iteration},
                          {"eval_count", h.eval_count},
                          {"best", h.best},
                          {"worst", h.worst},
                          {"delta_worst", h.delta_worst},
                          {"threshold", h.threshold}});
      rec.plot.add_row({name, static_cast<long long>(h.iteration),
                        static_cast<long long>(h.eval_count), h.best, h.worst, h.delta_worst,
                        h.threshold});
    }
  }
  rec.summary = {{"noisy", halting_summary(a)},
                 {"noiseless", halting_summary(b)},
                 {"shared_records", static_cast<int>(shared)},
                 {"first_depolarized_eval", first_depolarized},
                 {"records_before_first_depolarization", static_cast<int>(clean_prefix)},
                 {"noisy_true_error", noisy_true_error},
                 {"noiseless_error_at_same_evals", clean_error_same_evals},
                 {"final_mean_delta_worst", a.final_mean_delta_worst},
                 {"final_threshold", a.final_threshold},
                 {"p", s.p},
                 {"m", s.m}};
  return rec;
}

ScenarioRecord theta_study(const RunConfig& cfg) {
  const CzDesign d = design_cz_pulse(cfg, cfg.grape.infidelity_goal);
  const auto& s = cfg.theta_study;
  const int nx = static_cast<int>(s.xi_values.size());
  const int nr = s.realizations;
  struct Row {
    double theta = 0.0, infidelity = 0.0, theta_filtered = 0.0;
  };
  // One realization is a fixed set of normal draws scaled by xi, so xi traces
  // a path from the model outward. The system optimum is followed along that
  // path by warm-started GRAPE, which selects the branch nearest the model one.
  std::vector<double> path;
  const double xi_max = *std::max_element(s.xi_values.begin(), s.xi_values.end());
  for (double x = s.continuation_step; x < xi_max; x += s.continuation_step) path.push_back(x);
  for (double x : s.xi_values) path.push_back(x);
  std::sort(path.begin(), path.end());
  path.erase(std::unique(path.begin(), path.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-9; }),
             path.end());

  const auto per_real = parallel_map<std::vector<Row>>(nr, Execution::parallel, [&](int i) {
    std::vector<Row> out(nx);
    ControlSet current = d.result.controls;
    const NominalSpec base = nominal_spec(cfg);
    const TransferChain nom = nominal_chain(base);
    for (double xi : path) {
      NominalSpec spec = base;
      spec.xi = xi;
      const SystemRealization real =
          realize(spec, derive_seed(cfg.seed, {kRealization, static_cast<std::uint64_t>(i)}));
      GrapeOptions o = grape_options(cfg);
      o.chain = realized_chain(real);
      o.exec = Execution::serial;
      o.infidelity_goal = s.system_goal;
      const SystemModel m = qubit_bus_qubit(real.params);
      OpenLoopResult sys = optimize_open(m, current, cz_gate(), m.projector(), o);
      current = sys.controls;
      for (int x = 0; x < nx; ++x) {
        if (std::abs(s.xi_values[x] - xi) > 1e-9) continue;
        out[x] = Row{control_distance_theta(d.initial, d.result.controls, current),
                     sys.final_infidelity,
                     control_distance_theta(apply_transfer(nom, d.initial),
                                            apply_transfer(nom, d.result.controls),
                                            apply_transfer(*o.chain, current))};
      }
    }
    return out;
  });
  std::vector<Row> rows(nx * nr);
  for (int i = 0; i < nr; ++i)
    for (int x = 0; x < nx; ++x) rows[x * nr + i] = per_real[i][x];
  ScenarioRecord rec;
  rec.plot = CsvTable({"xi", "mean_theta", "std_theta"});
  Json means = Json::array();
  std::vector<double> mean_by_xi;
  for (int x = 0; x < nx; ++x) {
    std::vector<double> th;
    for (int i = 0; i < nr; ++i) {
      const Row& r = rows[x * nr + i];
      th.push_back(r.theta);
      rec.rows.push_back({{"xi", s.xi_values[x]},
                          {"realization", i},
                          {"theta", r.theta},
                          {"theta_filtered", r.theta_filtered},
                          {"system_infidelity", r.infidelity}});
    }
    const double m = stats::mean(th);
    double var = 0.0;
    for (double t : th) var += (t - m) * (t - m);
    const double sd = th.size() > 1 ? std::sqrt(var / (th.size() - 1)) : 0.0;
    mean_by_xi.push_back(m);
    means.push_back({{"xi", s.xi_values[x]}, {"mean_theta", m}, {"std_theta", sd}});
    rec.plot.add_row({s.xi_values[x], m, sd});
  }
  // Paired comparison: same realization seeds at every xi.
  bool monotone = true;
  for (int x = 1; x < nx; ++x) monotone = monotone && mean_by_xi[x] >= mean_by_xi[x - 1];
  rec.summary = {{"model_infidelity", d.result.final_infidelity},
                 {"by_xi", means},
                 {"mean_theta_monotone", monotone}};
  return rec;
}

ScenarioRecord cz_tailored(const RunConfig& cfg) {
  const CzDesign d = design_cz_pulse(cfg, 1.0 - cfg.cz_tailored.grape_fidelity);
  const NominalSpec spec = nominal_spec(cfg);
  const SystemRealization real = nominal_realization(spec);
  Estimator cz;
  cz.kind = FidelityKind::cz_phase;
  const BlackBox tailored(real, d.result.controls.grid(), cz_gate(), cz);
  Estimator proc;
  proc.kind = FidelityKind::process;
  const BlackBox overlap(real, d.result.controls.grid(), cz_gate(), proc);

  // Log (Phi_cz, Phi) of every evaluation; the best vertex is the best point seen.
  std::vector<std::pair<double, double>> log;
  const FidelityObjective inner = tailored.objective(0);
  const FidelityObjective obj = [&](std::span<const double> x) {
    FidelityEstimate e = inner(x);
    const double phi = overlap.evaluate(ControlSet::unflatten(d.result.controls.grid(), 2, x), 0).value;
    log.emplace_back(e.value, phi);
    return e;
  };
  const auto& nm = cfg.cz_tailored.nm;
  const CalibrationResult r =
      calibrate(obj, flat(d.result.controls), Params(flat(d.result.controls).size(), nm.spread),
                halting_rule(nm, 4, SigmaConvention::verbatim),
                derive_seed(cfg.seed, {kCalibration}), simplex_init(nm));

  ScenarioRecord rec;
  rec.plot = CsvTable({"iteration", "eval_count", "phi_cz", "phi"});
  std::vector<double> iters, phis;
  std::size_t e = 0;
  double best_cz = -1.0, best_phi = 0.0;
  for (const auto& h : r.history) {
    for (; e < static_cast<std::size_t>(h.eval_count) && e < log.size(); ++e)
      if (log[e].first > best_cz) {
        best_cz = log[e].first;
        best_phi = log[e].second;
      }
    iters.push_back(h.iteration);
    phis.push_back(best_phi);
    rec.rows.push_back({{"iteration", h.iteration},
                        {"eval_count", h.eval_count},
                        {"phi_cz", h.best},
                        {"phi", best_phi}});
    rec.plot.add_row({static_cast<long long>(h.iteration), static_cast<long long>(h.eval_count),
                      h.best, best_phi});
  }
  rec.summary = {{"grape_fidelity", 1.0 - d.result.final_infidelity},
                 {"calibration", halting_summary(r)},
                 {"final_phi_cz", r.best_fidelity},
                 {"final_phi", phis.empty() ? 0.0 : phis.back()},
                 {"spearman_phi_iteration", iters.size() >= 2 ? Json(stats::spearman(iters, phis)) : Json(nullptr)}};
  return rec;
}

// --- three-level DRAG --------------------------------------------------------

ScenarioRecord drag_demo(const RunConfig& cfg) {
  const auto& t = cfg.drag;
  const double delta = mhz_to_angular(t.anharmonicity_mhz);
  const SystemModel model = three_level_drag(delta);
  const TimeGrid grid(t.total_time_ns, t.slices);
  const double sigma0 = t.total_time_ns / 5.0;
  auto a_pi = [](double sigma) { return std::sqrt(std::numbers::pi / 2.0) / sigma; };
  const Unitary x_gate(pauli_x());
  const FidelityObjective obj = [&](std::span<const double> p) {
    FidelityEstimate e;
    e.kind = FidelityKind::process;
    if (!(p[1] > 0.0)) {
      e.value = -std::numeric_limits<double>::infinity();
      return e;
    }
    const ControlSet u = render_gaussian_drag({p[0], p[1], p[2]}, grid);
    const Unitary total = Evolution(model, u, BlockSelection::all, Execution::serial).total();
    e.value = process_fidelity_free_phases(total, x_gate, {0, 1}, {2});
    return e;
  };
  const auto& nm = cfg.drag_demo.nm;
  const Params spread{0.3 * a_pi(sigma0) * nm.spread, 0.3 * sigma0 * nm.spread,
                      0.5 / std::abs(delta) * nm.spread};
  struct Row {
    std::uint64_t seed;
    Params start;
    CalibrationResult cal;
  };
  const auto rows = parallel_map<Row>(t.instances, Execution::parallel, [&](int i) {
    Row r;
    r.seed = derive_seed(cfg.seed, {kDrag, static_cast<std::uint64_t>(i)});
    Rng rng(r.seed);
    std::uniform_real_distribution<double> ua(t.amplitude_range[0], t.amplitude_range[1]);
    std::uniform_real_distribution<double> us(t.sigma_range[0], t.sigma_range[1]);
    const double sigma = us(rng) * sigma0;
    r.start = {ua(rng) * a_pi(sigma0), sigma, 0.0};
    r.cal = calibrate(obj, r.start, spread, halting_rule(nm, 2, SigmaConvention::verbatim),
                      derive_seed(r.seed, {kCalibration}), simplex_init(nm));
    return r;
  });
  ScenarioRecord rec;
  rec.plot = CsvTable({"seed", "initial_fidelity", "final_fidelity", "eval_count"});
  std::vector<double> evals;
  int reached = 0;
  for (const auto& r : rows) {
    const double f0 = r.cal.history.front().best;
    const bool ok = r.cal.halt_reason == HaltReason::target_reached;
    reached += ok;
    evals.push_back(r.cal.eval_count);
    rec.rows.push_back({{"seed", r.seed},
                        {"initial_amplitude", r.start[0]},
                        {"initial_sigma", r.start[1]},
                        {"final_amplitude", r.cal.best[0]},
                        {"final_sigma", r.cal.best[1]},
                        {"final_drag_scale", r.cal.best[2]},
                        {"analytic_drag_scale", -1.0 / (2.0 * delta)},
                        {"final_fidelity", r.cal.best_fidelity},
                        {"eval_count", r.cal.eval_count},
                        {"halt_reason", to_string(r.cal.halt_reason)}});
    rec.plot.add_row({std::to_string(r.seed), f0, r.cal.best_fidelity,
                      static_cast<long long>(r.cal.eval_count)});
  }
  rec.summary = {{"instances", t.instances},
                 {"reached_target", reached},
                 {"median_evals", stats::median(evals)},
                 {"max_evals", *std::max_element(evals.begin(), evals.end())}};
  return rec;
}

}  // namespace

Json ScenarioRecord::to_json() const {
  return {{"scenario", id}, {"seed", seed}, {"summary", summary}, {"rows", rows}};
}

CzDesign design_cz_pulse(const RunConfig& cfg, double infidelity_goal) {
  const NominalSpec spec = nominal_spec(cfg);
  const SystemModel model = qubit_bus_qubit(spec.nominal);
  const TimeGrid grid = cz_grid(cfg);
  GrapeOptions o = grape_options(cfg);
  o.infidelity_goal = infidelity_goal;
  o.chain = nominal_chain(spec);
  std::optional<CzDesign> best;
  for (int attempt = 0; attempt <= cfg.grape.restarts; ++attempt) {
    const ControlSet guess = small_random(
        grid, 2, cfg.grape.init_std, derive_seed(cfg.seed, {kGrapeInit, static_cast<std::uint64_t>(attempt)}));
    OpenLoopResult r = optimize_open(model, guess, cz_gate(), model.projector(), o);
    if (!best || r.final_infidelity < best->result.final_infidelity)
      best = CzDesign{guess, std::move(r)};
    if (best->result.final_infidelity <= std::max(infidelity_goal, 1e-10)) break;
  }
  return *best;
}

CalibrationResult calibrate_realization(const RunConfig& cfg, const SystemRealization& real,
                                        const ControlSet& start, const Estimator& est,
                                        const NmConfig& nm, std::uint64_t seed) {
  const BlackBox box(real, start.grid(), cz_gate(), est);
  const Params x0 = flat(start);
  (void)cfg;
  return calibrate(box.objective(seed), x0, Params(x0.size(), nm.spread),
                   halting_rule(nm, 4, est.sigma_convention), derive_seed(seed, {0x51}),
                   simplex_init(nm));
}

ScenarioRecord run_scan(const RunConfig& cfg, const ControlSet& pulse, const std::string& param,
                        const std::vector<double>& values) {
  const NominalSpec spec = nominal_spec(cfg);
  static const std::vector<std::string> known{"g1", "g2", "delta1", "delta2", "offset", "sigma_filt"};
  if (std::find(known.begin(), known.end(), param) == known.end())
    throw ValidationError("scan: unknown parameter '" + param + "'");
  ScenarioRecord rec;
  rec.plot = CsvTable({"value", "infidelity", "avg_infidelity"});
  for (double v : values) {
    SystemRealization real = nominal_realization(spec);
    if (param == "g1") real.params.g1 *= 1.0 + v;
    if (param == "g2") real.params.g2 *= 1.0 + v;
    if (param == "delta1") real.params.delta1 *= 1.0 + v;
    if (param == "delta2") real.params.delta2 *= 1.0 + v;
    if (param == "sigma_filt") real.sigma_filt *= 1.0 + v;
    if (param == "offset") real.params.offset1 = real.params.offset2 = v;
    real.params.validate();
    if (real.sigma_filt < 0.0) throw ValidationError("scan: sigma_filt below zero");
    Estimator proc;
    proc.kind = FidelityKind::process;
    const double phi = blackbox_fidelity(real, pulse, proc, cz_gate(), 0).value;
    const double fbar = analytic_fidelity(real, pulse);
    rec.rows.push_back({{"param", param},
                        {"value", v},
                        {"infidelity", 1.0 - phi},
                        {"avg_infidelity", 1.0 - fbar}});
    rec.plot.add_row({v, 1.0 - phi, 1.0 - fbar});
  }
  rec.id = "scan";
  rec.seed = cfg.seed;
  return rec;
}

ScenarioRecord run_scenario(const RunConfig& cfg) {
  static const std::map<std::string, std::function<ScenarioRecord(const RunConfig&)>> table{
      {"cz-sensitivity", cz_sensitivity}, {"random-gates", random_gates},
      {"adhoc-recovery", adhoc_recovery}, {"dc-offset-scan", dc_offset_scan},
      {"noise-halting", noise_halting},   {"eta-study", eta_study},
      {"theta-study", theta_study},       {"drag-demo", drag_demo},
      {"cz-tailored", cz_tailored}};
  const auto it = table.find(cfg.scenario);
  if (it == table.end()) throw ValidationError("unknown scenario id '" + cfg.scenario + "'");
  cfg.validate();
  ScenarioRecord rec = it->second(cfg);
  rec.id = cfg.scenario;
  rec.seed = cfg.seed;
  return rec;
}

}  // namespace adhoc
