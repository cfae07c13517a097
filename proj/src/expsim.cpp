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

#include <cmath>
#include <numbers>
#include <sstream>

namespace adhoc {

std::string to_string(OffsetReading r) {
  return r == OffsetReading::plain ? "plain" : "angular";
}

OffsetReading offset_reading_from_string(const std::string& s) {
  if (s == "plain") return OffsetReading::plain;
  if (s == "angular") return OffsetReading::angular;
  throw ValidationError("unknown offset reading '" + s + "'");
}

double NominalSpec::offset_std() const {
  const double base = offset_fraction * bus_frequency_ghz;
  return offset_reading == OffsetReading::plain ? base : 2.0 * std::numbers::pi * base;
}

void NominalSpec::validate() const {
  nominal.validate();
  if (!(sigma_filt >= 0.0)) throw ValidationError("NominalSpec: sigma_filt must be >= 0");
  if (!(bus_frequency_ghz > 0.0))
    throw ValidationError("NominalSpec: bus frequency must be > 0");
  for (double r : {rel_g, rel_delta, rel_sigma_filt, offset_fraction})
    if (!(r >= 0.0) || !std::isfinite(r))
      throw ValidationError("NominalSpec: imprecisions must be >= 0");
  if (!(xi >= 0.0) || !std::isfinite(xi)) throw ValidationError("NominalSpec: xi must be >= 0");
}

SystemRealization realize(const NominalSpec& spec, std::uint64_t seed) {
  spec.validate();
  const QbqParams& n = spec.nominal;
  for (int attempt = 0; attempt < 100; ++attempt) {
    Rng rng(derive_seed(seed, {0x7265616c, static_cast<std::uint64_t>(attempt)}));
    std::normal_distribution<double> z(0.0, 1.0);
    // Fixed draw order: g1, g2, delta1, delta2, sigma_filt, offset1, offset2.
    double zs[7];
    for (double& v : zs) v = z(rng);
    SystemRealization r;
    r.seed = seed;
    r.attempts = attempt + 1;
    r.params = n;
    const double x = spec.xi;
    r.params.g1 = n.g1 * (1.0 + x * spec.rel_g * zs[0]);
    r.params.g2 = n.g2 * (1.0 + x * spec.rel_g * zs[1]);
    r.params.delta1 = n.delta1 * (1.0 + x * spec.rel_delta * zs[2]);
    r.params.delta2 = n.delta2 * (1.0 + x * spec.rel_delta * zs[3]);
    r.sigma_filt = spec.sigma_filt * (1.0 + x * spec.rel_sigma_filt * zs[4]);
    r.params.offset1 = n.offset1 + x * spec.offset_std() * zs[5];
    r.params.offset2 = n.offset2 + x * spec.offset_std() * zs[6];
    const bool physical = r.sigma_filt >= 0.0 && r.params.g1 > 0.0 && r.params.g2 > 0.0 &&
                          r.params.delta1 < 0.0 && r.params.delta2 < 0.0;
    if (physical) return r;
  }
  throw ValidationError("realize: 100 consecutive unphysical draws");
}

TransferChain realized_chain(const SystemRealization& r) {
  TransferChain c;
  c.kernel_sigma = r.sigma_filt;
  return c;
}

TransferChain nominal_chain(const NominalSpec& spec) {
  TransferChain c;
  c.kernel_sigma = spec.sigma_filt;
  return c;
}

void Estimator::validate() const {
  if (kind == FidelityKind::average_sampled && n_states < 1)
    throw ValidationError("Estimator: n_states must be >= 1");
  if (kind == FidelityKind::noisy) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("Estimator: p outside [0, 1]");
    if (m < 1) throw ValidationError("Estimator: m must be >= 1");
    if (noisy_base == FidelityKind::noisy)
      throw ValidationError("Estimator: noisy estimator cannot wrap itself");
  }
}

namespace {

double exact_measure(const CMatrix& projected, const Unitary& target, FidelityKind kind) {
  switch (kind) {
    case FidelityKind::process: return process_fidelity(projected, target);
    case FidelityKind::average_analytic: return avg_fidelity_analytic(projected, target);
    case FidelityKind::cz_phase: return cz_phase_fidelity(projected);
    default: break;
  }
  throw ValidationError("estimator: '" + to_string(kind) + "' is not an exact measure");
}

}  // namespace

FidelityEstimate estimate_fidelity(const CMatrix& projected, const Unitary& target,
                                   const Estimator& est, std::uint64_t seed) {
  switch (est.kind) {
    case FidelityKind::average_sampled:
      return avg_fidelity_sampled(projected, target, est.n_states, seed);
    case FidelityKind::noisy: {
      const double phi =
          est.noisy_base == FidelityKind::average_sampled
              ? avg_fidelity_sampled(projected, target, est.n_states, derive_seed(seed, {1})).value
              : exact_measure(projected, target, est.noisy_base);
      return depolarize_estimate(phi, est.p, est.m, static_cast<int>(target.dim()),
                                 derive_seed(seed, {2}), est.sigma_convention);
    }
    default: {
      FidelityEstimate e;
      e.kind = est.kind;
      e.value = exact_measure(projected, target, est.kind);
      return e;
    }
  }
}

struct BlackBox::State {
  SystemModel model;
  TransferChain chain;
  Unitary target;
  Estimator est;
  Execution exec;
};

BlackBox::BlackBox(const SystemRealization& real, TimeGrid grid, Unitary target, Estimator est,
                   Execution exec)
    : grid_(grid) {
  est.validate();
  if (target.dim() != 4) throw ValidationError("BlackBox: target must act on two qubits");
  state_ = std::make_shared<const State>(
      State{qubit_bus_qubit(real.params), realized_chain(real), std::move(target), est, exec});
}

FidelityEstimate BlackBox::evaluate(const ControlSet& generator, std::uint64_t seed) const {
  if (!(generator.grid() == grid_) || generator.channels() != 2)
    throw ValidationError("BlackBox: pulse does not match the task grid");
  const ControlSet u = apply_transfer(state_->chain, generator);
  const CMatrix p = projected_gate(state_->model, u, state_->exec);
  FidelityEstimate e = estimate_fidelity(p, state_->target, state_->est, seed);
  if (!std::isfinite(e.value)) {
    std::ostringstream os;
    os << "blackbox: non-finite fidelity (max |V| = " << generator.values().cwiseAbs().maxCoeff()
       << ")";
    throw std::runtime_error(os.str());
  }
  return e;
}

FidelityObjective BlackBox::objective(std::uint64_t seed) const {
  auto counter = std::make_shared<std::uint64_t>(0);
  BlackBox self = *this;
  return [self, counter, seed](std::span<const double> x) {
    const ControlSet v = ControlSet::unflatten(self.grid_, 2, x);
    return self.evaluate(v, derive_seed(seed, {(*counter)++}));
  };
}

FidelityEstimate blackbox_fidelity(const SystemRealization& real, const ControlSet& generator,
                                   const Estimator& est, const Unitary& target,
                                   std::uint64_t seed) {
  return BlackBox(real, generator.grid(), target, est).evaluate(generator, seed);
}

double controllability_eta(const SystemModel& model) {
  if (model.num_controls() != 1)
    throw ValidationError("controllability_eta: needs exactly one control");
  const CMatrix& hd = model.drift().matrix();
  const CMatrix& hc = model.controls().front().matrix();
  const CMatrix c1 = commutator(hd, hc);
  return std::max({max_norm(c1), max_norm(commutator(hd, c1)), max_norm(commutator(hc, c1))});
}

double control_distance_theta(const ControlSet& init, const ControlSet& model_opt,
                              const ControlSet& sys_opt) {
  if (!(init.grid() == model_opt.grid()) || !(init.grid() == sys_opt.grid()) ||
      init.channels() != model_opt.channels() || init.channels() != sys_opt.channels())
    throw ValidationError("control_distance_theta: grids differ");
  const double dt = init.grid().dt();
  const double num = (sys_opt.values() - model_opt.values()).cwiseAbs().sum() * dt;
  const double den = (model_opt.values() - init.values()).cwiseAbs().sum() * dt;
  if (!(den > 0.0))
    throw ValidationError("control_distance_theta: model optimum equals the initial guess");
  return num / den;
}

}  // namespace adhoc
