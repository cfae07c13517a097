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

// expsim.hpp: the simulated experiment.
//
// A NominalSpec is what the experimenter believes; realize() draws the
// system that is actually there. BlackBox wraps a realization so callers
// only ever get fidelities back.

#pragma once

#include "adhoc/fidelity.hpp"
#include "adhoc/linalg.hpp"
#include "adhoc/model.hpp"
#include "adhoc/parallel.hpp"
#include "adhoc/pulses.hpp"
#include "adhoc/simplex.hpp"
#include "adhoc/systems.hpp"

#include <cstdint>
#include <memory>

namespace adhoc {

/// How "0.1% of the bus frequency" becomes a detuning offset.
enum class OffsetReading {
  plain,    ///< 0.001 * omega_b[GHz] taken directly in rad/ns
  angular,  ///< 2 pi * 0.001 * omega_b[GHz] rad/ns
};
std::string to_string(OffsetReading r);
OffsetReading offset_reading_from_string(const std::string& s);

struct NominalSpec {
  QbqParams nominal;
  double sigma_filt = 1.0;         ///< ns
  double bus_frequency_ghz = 6.1;
  double rel_g = 0.04;
  double rel_delta = 0.04;
  double rel_sigma_filt = 0.10;
  double offset_fraction = 0.001;  ///< of the bus frequency
  OffsetReading offset_reading = OffsetReading::plain;
  double xi = 1.0;

  /// Standard deviation of each DC offset at xi = 1 (rad/ns).
  double offset_std() const;
  void validate() const;
};

struct SystemRealization {
  QbqParams params;
  double sigma_filt = 1.0;
  std::uint64_t seed = 0;
  int attempts = 1;  ///< draws until a physical one was found
};

/// Gaussian draw of every uncertain parameter. The standard normals come
/// from `seed` alone, so realizations of one seed at different xi lie on a
/// common ray from the nominal point. Unphysical draws are redrawn; 100 in
/// a row raise ValidationError.
SystemRealization realize(const NominalSpec& spec, std::uint64_t seed);

/// The realization's own transfer chain (unit gain, its sigma_filt).
TransferChain realized_chain(const SystemRealization& r);
/// The chain the model assumes.
TransferChain nominal_chain(const NominalSpec& spec);

struct Estimator {
  /// process | average_analytic | average_sampled | cz_phase | noisy
  FidelityKind kind = FidelityKind::average_analytic;
  int n_states = 300;
  /// Measure under the depolarizing wrapper (kind == noisy).
  FidelityKind noisy_base = FidelityKind::average_analytic;
  double p = 0.0;
  int m = 144;
  SigmaConvention sigma_convention = SigmaConvention::verbatim;

  void validate() const;
};

/// Fidelity of the projected gate under one estimator. `seed` feeds the
/// sampled and noisy estimators.
FidelityEstimate estimate_fidelity(const CMatrix& projected, const Unitary& target,
                                   const Estimator& est, std::uint64_t seed);

/// One-shot evaluation: generator pulse -> realized chain -> realized system.
FidelityEstimate blackbox_fidelity(const SystemRealization& real, const ControlSet& generator,
                                   const Estimator& est, const Unitary& target,
                                   std::uint64_t seed);

/// Reusable black box over one realization. The realization is held
/// privately; only fidelity estimates leave.
class BlackBox {
 public:
  BlackBox(const SystemRealization& real, TimeGrid grid, Unitary target, Estimator est,
           Execution exec = Execution::parallel);

  FidelityEstimate evaluate(const ControlSet& generator, std::uint64_t seed) const;

  /// Closed-loop objective over flattened generator pulses. The k-th call
  /// uses seed derive_seed(seed, {k}), so two objectives built with the
  /// same seed see identical noise call by call.
  FidelityObjective objective(std::uint64_t seed) const;

  const TimeGrid& grid() const { return grid_; }
  int channels() const { return 2; }

 private:
  struct State;
  std::shared_ptr<const State> state_;
  TimeGrid grid_;
};

/// max{|[Hd,Hc]|, |[Hd,[Hd,Hc]]|, |[Hc,[Hd,Hc]]|} in the max norm.
double controllability_eta(const SystemModel& model);

/// sum_i int |sys - mod| dt / sum_i int |mod - init| dt.
double control_distance_theta(const ControlSet& init, const ControlSet& model_opt,
                              const ControlSet& sys_opt);

}  // namespace adhoc
