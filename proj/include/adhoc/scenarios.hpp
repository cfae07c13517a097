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

// scenarios.hpp: end-to-end pipelines, one per study.
//
// Every scenario is a deterministic function of (config, master seed); the
// worker count only changes how fast it runs.

#pragma once

#include "adhoc/config.hpp"
#include "adhoc/expsim.hpp"
#include "adhoc/grape.hpp"
#include "adhoc/io.hpp"

#include <string>

namespace adhoc {

struct ScenarioRecord {
  std::string id;
  std::uint64_t seed = 0;
  Json rows = Json::array();
  Json summary = Json::object();
  CsvTable plot{{"x"}};

  /// records.json content (no timestamps, stable key order).
  Json to_json() const;
};

/// Model-optimal CZ pulse on the nominal system.
struct CzDesign {
  ControlSet initial;  ///< GRAPE initial guess (near zero detuning)
  OpenLoopResult result;
};

/// GRAPE from a seeded near-zero guess; up to grape.restarts fresh guesses
/// are tried while the goal is missed, and the best run is returned.
CzDesign design_cz_pulse(const RunConfig& cfg, double infidelity_goal);

/// Closed-loop calibration of `start` against one realization.
CalibrationResult calibrate_realization(const RunConfig& cfg, const SystemRealization& real,
                                        const ControlSet& start, const Estimator& est,
                                        const NmConfig& nm, std::uint64_t seed);

/// Pre-calibration fidelity of a pulse while one parameter of the nominal
/// system is swept. param: g1 | g2 | delta1 | delta2 | offset | sigma_filt.
/// Values are relative errors for g/delta/sigma_filt and rad/ns for offset.
ScenarioRecord run_scan(const RunConfig& cfg, const ControlSet& pulse, const std::string& param,
                        const std::vector<double>& values);

/// Dispatches on cfg.scenario; unknown ids raise ValidationError.
ScenarioRecord run_scenario(const RunConfig& cfg);

}  // namespace adhoc
