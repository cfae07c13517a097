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

#include <cmath>
#include <sstream>

namespace adhoc {

namespace {

constexpr double kFidelitySlack = 1e-9;

void check_projected(const CMatrix& projected, const Unitary& target) {
  if (projected.rows() != projected.cols() || projected.rows() != target.dim())
    throw ValidationError("fidelity: target dimension differs from projector rank");
}

CMatrix project(const Unitary& u, const Unitary& target, const Projector& projector) {
  if (static_cast<Eigen::Index>(projector.size()) != target.dim())
    throw ValidationError("fidelity: target dimension differs from projector rank");
  if (u.dim() < target.dim()) throw ValidationError("fidelity: gate smaller than target");
  for (int k : projector)
    if (k < 0 || k >= u.dim()) throw ValidationError("fidelity: projector index out of range");
  return restrict_to(u.matrix(), projector);
}

}  // namespace

std::string to_string(FidelityKind kind) {
  switch (kind) {
    case FidelityKind::process: return "process";
    case FidelityKind::average_analytic: return "average_analytic";
    case FidelityKind::average_sampled: return "average_sampled";
    case FidelityKind::cz_phase: return "cz_phase";
    case FidelityKind::noisy: return "noisy";
  }
  return "unknown";
}

FidelityKind fidelity_kind_from_string(const std::string& s) {
  for (auto k : {FidelityKind::process, FidelityKind::average_analytic,
                 FidelityKind::average_sampled, FidelityKind::cz_phase, FidelityKind::noisy})
    if (to_string(k) == s) return k;
  throw ValidationError("unknown fidelity kind '" + s + "'");
}

void FidelityEstimate::validate() const {
  if (!(value >= 0.0 && value <= 1.0 + kFidelitySlack)) {
    std::ostringstream os;
    os << "FidelityEstimate: value " << value << " outside [0, 1]";
    throw ValidationError(os.str());
  }
  if (depolarized > samples && kind == FidelityKind::noisy)
    throw ValidationError("FidelityEstimate: n > m");
}

double sigma_p(int m, SigmaConvention conv) {
  if (m < 1) throw ValidationError("sigma_p: m must be >= 1");
  const double dm = static_cast<double>(m);
  return conv == SigmaConvention::verbatim ? 1.0 / (12.0 * std::sqrt(dm))
                                           : 1.0 / std::sqrt(12.0 * dm);
}

double process_fidelity(const CMatrix& projected, const Unitary& target) {
  check_projected(projected, target);
  const double d = static_cast<double>(target.dim());
  const Complex tr = (target.matrix().adjoint() * projected).trace();
  return std::norm(tr) / (d * d);
}

double process_fidelity(const Unitary& u, const Unitary& target, const Projector& projector) {
  return process_fidelity(project(u, target, projector), target);
}

double avg_fidelity_analytic(const CMatrix& projected, const Unitary& target) {
  check_projected(projected, target);
  const double d = static_cast<double>(target.dim());
  const CMatrix m = target.matrix().adjoint() * projected;
  const double overlap = m.squaredNorm();  // Tr(M^dagger M)
  return (overlap + std::norm(m.trace())) / (d * (d + 1.0));
}

double avg_fidelity_analytic(const Unitary& u, const Unitary& target,
                             const Projector& projector) {
  return avg_fidelity_analytic(project(u, target, projector), target);
}

StateChannel unitary_channel(const Unitary& u) {
  const CMatrix m = u.matrix();
  return [m](const CMatrix& rho) -> CMatrix { return m * rho * m.adjoint(); };
}

FidelityEstimate avg_fidelity_sampled(const StateChannel& channel, Eigen::Index full_dim,
                                      const Unitary& target, const Projector& projector,
                                      int n_states, std::uint64_t seed) {
  if (n_states < 1) throw ValidationError("avg_fidelity_sampled: n_states must be >= 1");
  if (static_cast<Eigen::Index>(projector.size()) != target.dim())
    throw ValidationError("avg_fidelity_sampled: target dimension differs from projector rank");
  const Eigen::Index d = target.dim();
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < n_states; ++s) {
    const CVector psi = haar_unitary(d, derive_seed(seed, {static_cast<std::uint64_t>(s)}))
                            .matrix()
                            .col(0);
    CVector in = CVector::Zero(full_dim);
    CVector want = CVector::Zero(full_dim);
    const CVector tpsi = target.matrix() * psi;
    for (Eigen::Index k = 0; k < d; ++k) {
      in(projector[k]) = psi(k);
      want(projector[k]) = tpsi(k);
    }
    const CMatrix out = channel(in * in.adjoint());
    const double f = std::real(want.dot(out * want));
    sum += f;
    sum_sq += f * f;
  }
  FidelityEstimate e;
  e.kind = FidelityKind::average_sampled;
  e.samples = n_states;
  e.value = sum / n_states;
  const double var =
      n_states > 1 ? std::max(0.0, (sum_sq - sum * sum / n_states) / (n_states - 1)) : 0.0;
  e.std_error = std::sqrt(var / n_states);
  return e;
}

FidelityEstimate avg_fidelity_sampled(const CMatrix& projected, const Unitary& target,
                                      int n_states, std::uint64_t seed) {
  if (n_states < 1) throw ValidationError("avg_fidelity_sampled: n_states must be >= 1");
  check_projected(projected, target);
  const Eigen::Index d = target.dim();
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < n_states; ++s) {
    const CVector psi = haar_unitary(d, derive_seed(seed, {static_cast<std::uint64_t>(s)}))
                            .matrix()
                            .col(0);
    const double f = std::norm((target.matrix() * psi).dot(projected * psi));
    sum += f;
    sum_sq += f * f;
  }
  FidelityEstimate e;
  e.kind = FidelityKind::average_sampled;
  e.samples = n_states;
  e.value = sum / n_states;
  const double var =
      n_states > 1 ? std::max(0.0, (sum_sq - sum * sum / n_states) / (n_states - 1)) : 0.0;
  e.std_error = std::sqrt(var / n_states);
  return e;
}

double cz_phase_fidelity(const CMatrix& projected4) {
  if (projected4.rows() != 4 || projected4.cols() != 4)
    throw ValidationError("cz_phase_fidelity: need the 4x4 computational block");
  double phi = 0.0;
  // (01, 10, 11): parity (-1)^{i j} = +1, +1, -1
  const int idx[3] = {1, 2, 3};
  const double parity[3] = {1.0, 1.0, -1.0};
  for (int k = 0; k < 3; ++k) {
    const Complex z = projected4(idx[k], idx[k]);
    phi += std::norm(z) / 6.0 * (1.0 + parity[k] * std::cos(std::arg(z)));
  }
  return phi;
}

double cz_phase_fidelity(const Unitary& u, const Projector& three) {
  if (three.size() != 3) throw ValidationError("cz_phase_fidelity: need |01>, |10>, |11>");
  CMatrix p = CMatrix::Identity(4, 4);
  for (int k = 0; k < 3; ++k) {
    if (three[k] < 0 || three[k] >= u.dim())
      throw ValidationError("cz_phase_fidelity: projector index out of range");
    p(k + 1, k + 1) = u.matrix()(three[k], three[k]);
  }
  return cz_phase_fidelity(p);
}

double process_fidelity_free_phases(const Unitary& u, const Unitary& target,
                                    const Projector& projector, const std::vector<int>& free) {
  const CMatrix p = project(u, target, projector);
  double acc = std::abs((target.matrix().adjoint() * p).trace());
  for (int k : free) {
    if (k < 0 || k >= u.dim()) throw ValidationError("free phase index out of range");
    acc += std::abs(u.matrix()(k, k));
  }
  const double dim = static_cast<double>(target.dim() + static_cast<Eigen::Index>(free.size()));
  return acc * acc / (dim * dim);
}

FidelityEstimate depolarize_estimate(double phi, double p, int m, int d, std::uint64_t seed,
                                     SigmaConvention conv) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("depolarize_estimate: p outside [0, 1]");
  if (m < 1) throw ValidationError("depolarize_estimate: m must be >= 1");
  if (d < 1) throw ValidationError("depolarize_estimate: d must be >= 1");
  Rng rng(seed);
  std::binomial_distribution<int> binom(m, p);
  const int n = binom(rng);
  FidelityEstimate e;
  e.kind = FidelityKind::noisy;
  e.samples = m;
  e.depolarized = n;
  e.p_bar = static_cast<double>(n) / m;
  e.sigma_p = sigma_p(m, conv);
  e.value = static_cast<double>(n) / (static_cast<double>(m) * d) +
            static_cast<double>(m - n) / m * phi;
  return e;
}

double noise_threshold(int n, int m, double phi_dep, int d, SigmaConvention conv) {
  if (m < 1 || n < 0 || n > m) throw ValidationError("noise_threshold: need 0 <= n <= m, m >= 1");
  const double p = static_cast<double>(n) / m;
  const double s = sigma_p(m, conv);
  if (!(p + s < 1.0)) throw ValidationError("noise_threshold: p_bar + sigma_p must be < 1");
  const double dd = static_cast<double>(d);
  const double upper = (dd * phi_dep - p - s) / (dd * (1.0 - p - s));
  const double lower = (dd * phi_dep - p + s) / (dd * (1.0 - p + s));
  return upper - lower;
}

}  // namespace adhoc
