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

#include "adhoc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace adhoc {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

const std::vector<std::string>& scenario_ids() {
  static const std::vector<std::string> ids{
      "cz-sensitivity", "random-gates", "adhoc-recovery", "dc-offset-scan", "noise-halting",
      "eta-study",      "theta-study",  "drag-demo",      "cz-tailored"};
  return ids;
}

namespace {

/// Reads the fields of one JSON object and remembers which keys it used.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("'" + name() + "': expected an object");
  }

  template <class T>
  void field(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("'" + qualify(key) + "': wrong type");
    }
  }

  void field(const char* key, std::optional<double>& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    if (j_.at(key).is_null()) {
      out.reset();
      return;
    }
    double v = 0.0;
    field(key, v);
    out = v;
  }

  void field(const char* key, std::uint64_t& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned()) throw ConfigError("'" + qualify(key) + "': expected an unsigned integer");
    out = v.get<std::uint64_t>();
  }

  template <class Fn>
  void section(const char* key, Fn&& fn) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    Section sub(j_.at(key), qualify(key));
    fn(sub);
    sub.finish();
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError("unknown key '" + qualify(k) + "'");
  }

  std::string qualify(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  std::string name() const { return path_.empty() ? "<root>" : path_; }
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read(Section& s, NmConfig& c) {
  s.field("spread", c.spread);
  s.field("init", c.init);
  s.field("target_fidelity", c.target_fidelity);
  s.field("max_evals", c.max_evals);
  s.field("window", c.window);
  s.field("threshold", c.threshold);
  s.field("fixed_threshold", c.fixed_threshold);
}

ojson write(const NmConfig& c) {
  return {{"spread", c.spread},
          {"init", c.init},
          {"target_fidelity", c.target_fidelity},
          {"max_evals", c.max_evals},
          {"window", c.window},
          {"threshold", c.threshold},
          {"fixed_threshold", c.fixed_threshold}};
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("'" + key + "': " + what);
}

void check(const NmConfig& c, const std::string& p) {
  require(c.spread > 0.0, p + ".spread", "must be > 0");
  require(c.init == "axis" || c.init == "gaussian", p + ".init", "must be axis or gaussian");
  require(c.target_fidelity > 0.0 && c.target_fidelity <= 1.0, p + ".target_fidelity",
          "must lie in (0, 1]");
  require(c.max_evals >= 1, p + ".max_evals", "must be >= 1");
  require(c.window >= 1, p + ".window", "must be >= 1");
  require(c.threshold == "fixed" || c.threshold == "noise", p + ".threshold",
          "must be fixed or noise");
  require(c.fixed_threshold >= 0.0, p + ".fixed_threshold", "must be >= 0");
}

bool is_kind(const std::string& s) {
  try {
    fidelity_kind_from_string(s);
    return true;
  } catch (const ValidationError&) {
    return false;
  }
}

void check_range(const std::vector<double>& r, const std::string& key) {
  require(r.size() == 2 && r[0] > 0.0 && r[0] <= r[1], key, "must be [lo, hi] with 0 < lo <= hi");
}

}  // namespace

void RunConfig::validate() const {
  const auto& ids = scenario_ids();
  require(scenario.empty() || std::find(ids.begin(), ids.end(), scenario) != ids.end(),
          "scenario", "unknown scenario id '" + scenario + "'");
  require(workers >= 0, "workers", "must be >= 0");

  require(cz.slices >= 1, "cz.slices", "must be >= 1");
  require(cz.total_time_ns > 0.0, "cz.total_time_ns", "must be > 0");
  require(cz.g1_mhz > 0.0, "cz.g1_mhz", "must be > 0");
  require(cz.g2_mhz > 0.0, "cz.g2_mhz", "must be > 0");
  require(cz.delta1_mhz < 0.0, "cz.delta1_mhz", "must be < 0");
  require(cz.delta2_mhz < 0.0, "cz.delta2_mhz", "must be < 0");
  require(cz.qubit_levels >= 2, "cz.qubit_levels", "must be >= 2");
  require(cz.bus_levels >= 2, "cz.bus_levels", "must be >= 2");
  require(cz.sigma_filt_ns >= 0.0, "cz.sigma_filt_ns", "must be >= 0");
  require(cz.bus_frequency_ghz > 0.0, "cz.bus_frequency_ghz", "must be > 0");

  require(imprecision.g >= 0.0, "imprecision.g", "must be >= 0");
  require(imprecision.delta >= 0.0, "imprecision.delta", "must be >= 0");
  require(imprecision.sigma_filt >= 0.0, "imprecision.sigma_filt", "must be >= 0");
  require(imprecision.offset_fraction >= 0.0, "imprecision.offset_fraction", "must be >= 0");
  require(imprecision.offset_reading == "plain" || imprecision.offset_reading == "angular",
          "imprecision.offset_reading", "must be plain or angular");
  require(imprecision.xi >= 0.0, "imprecision.xi", "must be >= 0");

  require(tls.slices >= 1, "tls.slices", "must be >= 1");
  require(tls.total_time > 0.0, "tls.total_time", "must be > 0");
  require(tls.instances >= 1, "tls.instances", "must be >= 1");
  require(tls.eta_floor >= 0.0, "tls.eta_floor", "must be >= 0");

  require(drag.anharmonicity_mhz != 0.0, "drag.anharmonicity_mhz", "must be nonzero");
  require(drag.total_time_ns > 0.0, "drag.total_time_ns", "must be > 0");
  require(drag.slices >= 1, "drag.slices", "must be >= 1");
  require(drag.instances >= 1, "drag.instances", "must be >= 1");
  check_range(drag.amplitude_range, "drag.amplitude_range");
  check_range(drag.sigma_range, "drag.sigma_range");

  require(grape.max_iter >= 1, "grape.max_iter", "must be >= 1");
  require(grape.grad_tol > 0.0, "grape.grad_tol", "must be > 0");
  require(grape.infidelity_goal > 0.0, "grape.infidelity_goal", "must be > 0");
  require(!grape.amplitude_bound || *grape.amplitude_bound > 0.0, "grape.amplitude_bound",
          "must be > 0 or null");
  require(grape.init_std >= 0.0, "grape.init_std", "must be >= 0");
  require(grape.restarts >= 0, "grape.restarts", "must be >= 0");

  require(is_kind(estimator.kind), "estimator.kind", "unknown estimator '" + estimator.kind + "'");
  require(is_kind(estimator.noisy_base) && estimator.noisy_base != "noisy",
          "estimator.noisy_base", "must name a non-noisy measure");
  require(estimator.n_states >= 1, "estimator.n_states", "must be >= 1");
  require(estimator.p >= 0.0 && estimator.p <= 1.0, "estimator.p", "must lie in [0, 1]");
  require(estimator.m >= 1, "estimator.m", "must be >= 1");
  require(estimator.sigma_convention == "verbatim" || estimator.sigma_convention == "uniform_var",
          "estimator.sigma_convention", "must be verbatim or uniform_var");

  require(cz_sensitivity.points >= 2, "cz_sensitivity.points", "must be >= 2");
  require(cz_sensitivity.g1_rel_min < cz_sensitivity.g1_rel_max && cz_sensitivity.g1_rel_min > -1.0,
          "cz_sensitivity.g1_rel_min", "must be > -1 and below g1_rel_max");
  check(random_gates.nm, "random_gates.nm");
  require(random_gates.error_goal > 0.0, "random_gates.error_goal", "must be > 0");
  require(random_gates.handoff_infidelity > 0.0, "random_gates.handoff_infidelity", "must be > 0");
  require(random_gates.hybrid_spread > 0.0, "random_gates.hybrid_spread", "must be > 0");
  require(adhoc_recovery.realizations >= 1, "adhoc_recovery.realizations", "must be >= 1");
  check(adhoc_recovery.nm, "adhoc_recovery.nm");
  require(dc_offset_scan.offset_max_std > 0.0, "dc_offset_scan.offset_max_std", "must be > 0");
  require(dc_offset_scan.points >= 3, "dc_offset_scan.points", "must be >= 3");
  require(dc_offset_scan.plateau_error > 0.0, "dc_offset_scan.plateau_error", "must be > 0");
  check(dc_offset_scan.nm, "dc_offset_scan.nm");
  check(noise_halting.nm, "noise_halting.nm");
  require(noise_halting.p >= 0.0 && noise_halting.p < 1.0, "noise_halting.p", "must lie in [0, 1)");
  require(noise_halting.m >= 1, "noise_halting.m", "must be >= 1");
  require(!theta_study.xi_values.empty(), "theta_study.xi_values", "must not be empty");
  for (double x : theta_study.xi_values) require(x >= 0.0, "theta_study.xi_values", "must be >= 0");
  require(theta_study.realizations >= 1, "theta_study.realizations", "must be >= 1");
  require(theta_study.system_goal > 0.0, "theta_study.system_goal", "must be > 0");
  require(theta_study.continuation_step > 0.0, "theta_study.continuation_step", "must be > 0");
  check(drag_demo.nm, "drag_demo.nm");
  require(cz_tailored.grape_fidelity > 0.0 && cz_tailored.grape_fidelity < 1.0,
          "cz_tailored.grape_fidelity", "must lie in (0, 1)");
  check(cz_tailored.nm, "cz_tailored.nm");
}

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  Section root(j, "");
  root.field("scenario", c.scenario);
  root.field("seed", c.seed);
  root.field("output_dir", c.output_dir);
  root.field("workers", c.workers);
  root.section("cz", [&](Section& s) {
    s.field("total_time_ns", c.cz.total_time_ns);
    s.field("slices", c.cz.slices);
    s.field("g1_mhz", c.cz.g1_mhz);
    s.field("g2_mhz", c.cz.g2_mhz);
    s.field("delta1_mhz", c.cz.delta1_mhz);
    s.field("delta2_mhz", c.cz.delta2_mhz);
    s.field("qubit_levels", c.cz.qubit_levels);
    s.field("bus_levels", c.cz.bus_levels);
    s.field("sigma_filt_ns", c.cz.sigma_filt_ns);
    s.field("bus_frequency_ghz", c.cz.bus_frequency_ghz);
  });
  root.section("imprecision", [&](Section& s) {
    s.field("g", c.imprecision.g);
    s.field("delta", c.imprecision.delta);
    s.field("sigma_filt", c.imprecision.sigma_filt);
    s.field("offset_fraction", c.imprecision.offset_fraction);
    s.field("offset_reading", c.imprecision.offset_reading);
    s.field("xi", c.imprecision.xi);
  });
  root.section("tls", [&](Section& s) {
    s.field("total_time", c.tls.total_time);
    s.field("slices", c.tls.slices);
    s.field("instances", c.tls.instances);
    s.field("eta_floor", c.tls.eta_floor);
  });
  root.section("drag", [&](Section& s) {
    s.field("anharmonicity_mhz", c.drag.anharmonicity_mhz);
    s.field("total_time_ns", c.drag.total_time_ns);
    s.field("slices", c.drag.slices);
    s.field("instances", c.drag.instances);
    s.field("amplitude_range", c.drag.amplitude_range);
    s.field("sigma_range", c.drag.sigma_range);
  });
  root.section("grape", [&](Section& s) {
    s.field("max_iter", c.grape.max_iter);
    s.field("grad_tol", c.grape.grad_tol);
    s.field("infidelity_goal", c.grape.infidelity_goal);
    s.field("amplitude_bound", c.grape.amplitude_bound);
    s.field("init_std", c.grape.init_std);
    s.field("restarts", c.grape.restarts);
  });
  root.section("estimator", [&](Section& s) {
    s.field("kind", c.estimator.kind);
    s.field("n_states", c.estimator.n_states);
    s.field("noisy_base", c.estimator.noisy_base);
    s.field("p", c.estimator.p);
    s.field("m", c.estimator.m);
    s.field("sigma_convention", c.estimator.sigma_convention);
  });
  root.section("cz_sensitivity", [&](Section& s) {
    s.field("g1_rel_min", c.cz_sensitivity.g1_rel_min);
    s.field("g1_rel_max", c.cz_sensitivity.g1_rel_max);
    s.field("points", c.cz_sensitivity.points);
  });
  root.section("random_gates", [&](Section& s) {
    s.section("nm", [&](Section& n) { read(n, c.random_gates.nm); });
    s.field("error_goal", c.random_gates.error_goal);
    s.field("handoff_infidelity", c.random_gates.handoff_infidelity);
    s.field("hybrid_spread", c.random_gates.hybrid_spread);
    s.field("hybrid", c.random_gates.hybrid);
  });
  root.section("adhoc_recovery", [&](Section& s) {
    s.field("realizations", c.adhoc_recovery.realizations);
    s.section("nm", [&](Section& n) { read(n, c.adhoc_recovery.nm); });
  });
  root.section("dc_offset_scan", [&](Section& s) {
    s.field("offset_max_std", c.dc_offset_scan.offset_max_std);
    s.field("points", c.dc_offset_scan.points);
    s.field("plateau_error", c.dc_offset_scan.plateau_error);
    s.section("nm", [&](Section& n) { read(n, c.dc_offset_scan.nm); });
  });
  root.section("noise_halting", [&](Section& s) {
    s.section("nm", [&](Section& n) { read(n, c.noise_halting.nm); });
    s.field("p", c.noise_halting.p);
    s.field("m", c.noise_halting.m);
  });
  root.section("theta_study", [&](Section& s) {
    s.field("xi_values", c.theta_study.xi_values);
    s.field("realizations", c.theta_study.realizations);
    s.field("system_goal", c.theta_study.system_goal);
    s.field("continuation_step", c.theta_study.continuation_step);
  });
  root.section("drag_demo", [&](Section& s) {
    s.section("nm", [&](Section& n) { read(n, c.drag_demo.nm); });
  });
  root.section("cz_tailored", [&](Section& s) {
    s.field("grape_fidelity", c.cz_tailored.grape_fidelity);
    s.section("nm", [&](Section& n) { read(n, c.cz_tailored.nm); });
  });
  root.finish();
  c.validate();
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

ojson to_json(const RunConfig& c) {
  ojson j;
  j["scenario"] = c.scenario;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["workers"] = c.workers;
  j["cz"] = {{"total_time_ns", c.cz.total_time_ns},   {"slices", c.cz.slices},
             {"g1_mhz", c.cz.g1_mhz},                 {"g2_mhz", c.cz.g2_mhz},
             {"delta1_mhz", c.cz.delta1_mhz},         {"delta2_mhz", c.cz.delta2_mhz},
             {"qubit_levels", c.cz.qubit_levels},     {"bus_levels", c.cz.bus_levels},
             {"sigma_filt_ns", c.cz.sigma_filt_ns},   {"bus_frequency_ghz", c.cz.bus_frequency_ghz}};
  j["imprecision"] = {{"g", c.imprecision.g},
                      {"delta", c.imprecision.delta},
                      {"sigma_filt", c.imprecision.sigma_filt},
                      {"offset_fraction", c.imprecision.offset_fraction},
                      {"offset_reading", c.imprecision.offset_reading},
                      {"xi", c.imprecision.xi}};
  j["tls"] = {{"total_time", c.tls.total_time},
              {"slices", c.tls.slices},
              {"instances", c.tls.instances},
              {"eta_floor", c.tls.eta_floor}};
  j["drag"] = {{"anharmonicity_mhz", c.drag.anharmonicity_mhz},
               {"total_time_ns", c.drag.total_time_ns},
               {"slices", c.drag.slices},
               {"instances", c.drag.instances},
               {"amplitude_range", c.drag.amplitude_range},
               {"sigma_range", c.drag.sigma_range}};
  j["grape"] = {{"max_iter", c.grape.max_iter},
                {"grad_tol", c.grape.grad_tol},
                {"infidelity_goal", c.grape.infidelity_goal},
                {"amplitude_bound", c.grape.amplitude_bound ? ojson(*c.grape.amplitude_bound)
                                                            : ojson(nullptr)},
                {"init_std", c.grape.init_std},
                {"restarts", c.grape.restarts}};
  j["estimator"] = {{"kind", c.estimator.kind},
                    {"n_states", c.estimator.n_states},
                    {"noisy_base", c.estimator.noisy_base},
                    {"p", c.estimator.p},
                    {"m", c.estimator.m},
                    {"sigma_convention", c.estimator.sigma_convention}};
  j["cz_sensitivity"] = {{"g1_rel_min", c.cz_sensitivity.g1_rel_min},
                         {"g1_rel_max", c.cz_sensitivity.g1_rel_max},
                         {"points", c.cz_sensitivity.points}};
  j["random_gates"] = {{"nm", write(c.random_gates.nm)},
                       {"error_goal", c.random_gates.error_goal},
                       {"handoff_infidelity", c.random_gates.handoff_infidelity},
                       {"hybrid_spread", c.random_gates.hybrid_spread},
                       {"hybrid", c.random_gates.hybrid}};
  j["adhoc_recovery"] = {{"realizations", c.adhoc_recovery.realizations},
                         {"nm", write(c.adhoc_recovery.nm)}};
  j["dc_offset_scan"] = {{"offset_max_std", c.dc_offset_scan.offset_max_std},
                         {"points", c.dc_offset_scan.points},
                         {"plateau_error", c.dc_offset_scan.plateau_error},
                         {"nm", write(c.dc_offset_scan.nm)}};
  j["noise_halting"] = {
      {"nm", write(c.noise_halting.nm)}, {"p", c.noise_halting.p}, {"m", c.noise_halting.m}};
  j["theta_study"] = {{"xi_values", c.theta_study.xi_values},
                      {"realizations", c.theta_study.realizations},
                      {"system_goal", c.theta_study.system_goal},
                      {"continuation_step", c.theta_study.continuation_step}};
  j["drag_demo"] = {{"nm", write(c.drag_demo.nm)}};
  j["cz_tailored"] = {{"grape_fidelity", c.cz_tailored.grape_fidelity},
                      {"nm", write(c.cz_tailored.nm)}};
  return j;
}

std::string serialize_config(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

NominalSpec nominal_spec(const RunConfig& cfg) {
  NominalSpec s;
  s.nominal.g1 = mhz_to_angular(cfg.cz.g1_mhz);
  s.nominal.g2 = mhz_to_angular(cfg.cz.g2_mhz);
  s.nominal.delta1 = mhz_to_angular(cfg.cz.delta1_mhz);
  s.nominal.delta2 = mhz_to_angular(cfg.cz.delta2_mhz);
  s.nominal.qubit_levels = cfg.cz.qubit_levels;
  s.nominal.bus_levels = cfg.cz.bus_levels;
  s.sigma_filt = cfg.cz.sigma_filt_ns;
  s.bus_frequency_ghz = cfg.cz.bus_frequency_ghz;
  s.rel_g = cfg.imprecision.g;
  s.rel_delta = cfg.imprecision.delta;
  s.rel_sigma_filt = cfg.imprecision.sigma_filt;
  s.offset_fraction = cfg.imprecision.offset_fraction;
  s.offset_reading = offset_reading_from_string(cfg.imprecision.offset_reading);
  s.xi = cfg.imprecision.xi;
  return s;
}

TimeGrid cz_grid(const RunConfig& cfg) { return TimeGrid(cfg.cz.total_time_ns, cfg.cz.slices); }

SigmaConvention sigma_convention_from_string(const std::string& s) {
  if (s == "verbatim") return SigmaConvention::verbatim;
  if (s == "uniform_var") return SigmaConvention::uniform_var;
  throw ValidationError("unknown sigma convention '" + s + "'");
}

Estimator estimator(const EstimatorConfig& e) {
  Estimator out;
  out.kind = fidelity_kind_from_string(e.kind);
  out.n_states = e.n_states;
  out.noisy_base = fidelity_kind_from_string(e.noisy_base);
  out.p = e.p;
  out.m = e.m;
  out.sigma_convention = sigma_convention_from_string(e.sigma_convention);
  return out;
}

HaltingRule halting_rule(const NmConfig& nm, int noise_dim, SigmaConvention conv) {
  HaltingRule r;
  r.target_fidelity = nm.target_fidelity;
  r.max_evals = nm.max_evals;
  r.window = nm.window;
  r.threshold_source =
      nm.threshold == "noise" ? HaltingRule::Threshold::noise : HaltingRule::Threshold::fixed;
  r.fixed_threshold = nm.fixed_threshold;
  r.noise_dim = noise_dim;
  r.sigma_convention = conv;
  return r;
}

SimplexInit simplex_init(const NmConfig& nm) {
  return nm.init == "gaussian" ? SimplexInit::gaussian : SimplexInit::axis;
}

}  // namespace adhoc
