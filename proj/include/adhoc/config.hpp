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

// config.hpp: run configuration.
//
// The file format is JSON. Every section is optional and every field has a
// default; unknown keys are rejected with the key's path in the message.
// Frequencies are given in MHz / GHz (plain, not angular) and converted to
// rad/ns when the task is built.

#pragma once

#include "adhoc/expsim.hpp"
#include "adhoc/fidelity.hpp"
#include "adhoc/simplex.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace adhoc {

/// A malformed or invalid configuration. what() names the offending key.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct CzTaskConfig {
  double total_time_ns = 50.0;
  int slices = 50;
  double g1_mhz = 40.0;
  double g2_mhz = 54.0;
  double delta1_mhz = -59.0;
  double delta2_mhz = -71.0;
  int qubit_levels = 3;
  int bus_levels = 3;
  double sigma_filt_ns = 1.0;
  double bus_frequency_ghz = 6.1;
  bool operator==(const CzTaskConfig&) const = default;
};

struct ImprecisionConfig {
  double g = 0.04;
  double delta = 0.04;
  double sigma_filt = 0.10;
  double offset_fraction = 0.001;
  std::string offset_reading = "plain";  ///< plain | angular
  double xi = 1.0;
  bool operator==(const ImprecisionConfig&) const = default;
};

struct TlsTaskConfig {
  double total_time = 10.0;
  int slices = 20;
  int instances = 100;
  double eta_floor = 0.05;
  bool operator==(const TlsTaskConfig&) const = default;
};

struct DragTaskConfig {
  double anharmonicity_mhz = -200.0;
  double total_time_ns = 20.0;
  int slices = 40;
  int instances = 20;
  /// Bad start: A uniform in amplitude_range * A_pi, sigma in sigma_range * T/5.
  std::vector<double> amplitude_range{0.2, 0.6};
  std::vector<double> sigma_range{0.6, 1.4};
  bool operator==(const DragTaskConfig&) const = default;
};

struct GrapeConfig {
  int max_iter = 3000;
  double grad_tol = 1e-12;
  double infidelity_goal = 1e-14;
  std::optional<double> amplitude_bound;
  /// Std of the Gaussian initial guess around zero detuning (rad/ns or TLS units).
  double init_std = 0.01;
  int restarts = 4;
  bool operator==(const GrapeConfig&) const = default;
};

struct NmConfig {
  double spread = 0.05;
  std::string init = "axis";  ///< axis | gaussian
  double target_fidelity = 0.9999;
  int max_evals = 20000;
  int window = 5;
  std::string threshold = "fixed";  ///< fixed | noise
  double fixed_threshold = 0.0;
  bool operator==(const NmConfig&) const = default;
};

struct EstimatorConfig {
  /// process | average_analytic | average_sampled | cz_phase | noisy
  std::string kind = "average_analytic";
  int n_states = 300;
  std::string noisy_base = "average_analytic";
  double p = 0.0;
  int m = 144;
  std::string sigma_convention = "verbatim";  ///< verbatim | uniform_var
  bool operator==(const EstimatorConfig&) const = default;
};

struct CzSensitivityConfig {
  double g1_rel_min = -0.10;
  double g1_rel_max = 0.10;
  int points = 21;
  bool operator==(const CzSensitivityConfig&) const = default;
};

struct RandomGatesConfig {
  NmConfig nm{0.5, "axis", 1.0 - 1e-5, 3000, 5, "fixed", 0.0};
  double error_goal = 1e-4;          ///< success threshold on 1 - F
  double handoff_infidelity = 1e-4;  ///< GRAPE stops here in the hybrid run
  double hybrid_spread = 0.01;       ///< NM spread after the GRAPE handoff
  bool hybrid = true;
  bool operator==(const RandomGatesConfig&) const = default;
};

struct AdhocRecoveryConfig {
  int realizations = 50;
  NmConfig nm{0.05, "axis", 0.9999, 20000, 5, "fixed", 0.0};
  bool operator==(const AdhocRecoveryConfig&) const = default;
};

struct DcOffsetScanConfig {
  double offset_max_std = 3.0;  ///< scan range in units of the offset std
  int points = 25;
  NmConfig nm{0.05, "axis", 0.999, 8000, 5, "fixed", 0.0};
  double plateau_error = 1e-3;
  bool operator==(const DcOffsetScanConfig&) const = default;
};

struct NoiseHaltingConfig {
  NmConfig nm{0.05, "axis", 0.999, 6000, 5, "noise", 0.0};
  double p = 0.02;
  int m = 400;
  bool operator==(const NoiseHaltingConfig&) const = default;
};

struct ThetaStudyConfig {
  std::vector<double> xi_values{0.0, 0.5, 1.0, 1.5, 2.0};
  int realizations = 50;
  double system_goal = 1e-4;  ///< GRAPE stops here on the realized system
  double continuation_step = 0.1;  ///< xi increment of the warm-started path
  bool operator==(const ThetaStudyConfig&) const = default;
};

struct DragDemoConfig {
  NmConfig nm{1.0, "axis", 0.999, 300, 5, "fixed", 0.0};
  bool operator==(const DragDemoConfig&) const = default;
};

struct CzTailoredConfig {
  double grape_fidelity = 0.8;
  NmConfig nm{0.05, "axis", 0.999, 30000, 5, "fixed", 0.0};
  bool operator==(const CzTailoredConfig&) const = default;
};

struct RunConfig {
  std::string scenario;
  std::uint64_t seed = 1;
  std::string output_dir;
  int workers = 0;
  CzTaskConfig cz;
  ImprecisionConfig imprecision;
  TlsTaskConfig tls;
  DragTaskConfig drag;
  GrapeConfig grape;
  EstimatorConfig estimator;
  CzSensitivityConfig cz_sensitivity;
  RandomGatesConfig random_gates;
  AdhocRecoveryConfig adhoc_recovery;
  DcOffsetScanConfig dc_offset_scan;
  NoiseHaltingConfig noise_halting;
  ThetaStudyConfig theta_study;
  DragDemoConfig drag_demo;
  CzTailoredConfig cz_tailored;

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

const std::vector<std::string>& scenario_ids();

RunConfig parse_config_text(const std::string& text);
/// Reads a file; a missing or unreadable file raises std::runtime_error.
RunConfig parse_config_file(const std::string& path);
nlohmann::ordered_json to_json(const RunConfig& cfg);
std::string serialize_config(const RunConfig& cfg);

// Typed views of the configuration.
NominalSpec nominal_spec(const RunConfig& cfg);
TimeGrid cz_grid(const RunConfig& cfg);
Estimator estimator(const EstimatorConfig& e);
HaltingRule halting_rule(const NmConfig& nm, int noise_dim, SigmaConvention conv);
SimplexInit simplex_init(const NmConfig& nm);
SigmaConvention sigma_convention_from_string(const std::string& s);

}  // namespace adhoc
