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

#include "adhoc/linalg.hpp"

#include "adhoc/random.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <sstream>

namespace adhoc {

namespace {

double hermiticity_defect(const CMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace

HermitianOp::HermitianOp(CMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols())
    throw ValidationError("HermitianOp: matrix is not square");
  if (m_.rows() < 2) throw ValidationError("HermitianOp: dim must be >= 2");
  if (!m_.allFinite()) throw ValidationError("HermitianOp: non-finite entry");
  const double defect = hermiticity_defect(m_);
  if (defect > kHermitianTol) {
    std::ostringstream os;
    os << "HermitianOp: not Hermitian (max |H - H^dagger| = " << defect << ")";
    throw ValidationError(os.str());
  }
}

HermitianOp HermitianOp::symmetrized(const CMatrix& m) {
  if (m.rows() != m.cols() || m.rows() < 2)
    throw ValidationError("HermitianOp: bad shape");
  return HermitianOp(0.5 * (m + m.adjoint()), Trusted{});
}

Unitary::Unitary(CMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw ValidationError("Unitary: matrix is not square");
  if (m_.rows() < 1) throw ValidationError("Unitary: empty matrix");
  const double defect = unitarity_defect();
  if (!(defect < kUnitaryTol)) {
    std::ostringstream os;
    os << "Unitary: U^dagger U deviates from identity by " << defect;
    throw ValidationError(os.str());
  }
}

Unitary Unitary::identity(Eigen::Index dim) {
  return Unitary(CMatrix::Identity(dim, dim), Trusted{});
}

double Unitary::unitarity_defect() const {
  const CMatrix g = m_.adjoint() * m_ - CMatrix::Identity(m_.rows(), m_.cols());
  return g.cwiseAbs().maxCoeff();
}

TimeGrid::TimeGrid(double total_time, int slices)
    : total_time_(total_time), slices_(slices) {
  if (slices < 1) throw ValidationError("TimeGrid: slices must be >= 1");
  if (!(total_time > 0.0) || !std::isfinite(total_time))
    throw ValidationError("TimeGrid: total_time must be positive");
}

Unitary expm_unitary(const HermitianOp& h, double dt) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix());
  if (es.info() != Eigen::Success)
    throw std::runtime_error("expm_unitary: eigendecomposition failed");
  const CMatrix& v = es.eigenvectors();
  CVector phases(v.cols());
  for (Eigen::Index k = 0; k < v.cols(); ++k)
    phases(k) = std::polar(1.0, -es.eigenvalues()(k) * dt);
  return Unitary::unchecked(v * phases.asDiagonal() * v.adjoint());
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw ValidationError("commutator: dimension mismatch");
  return a * b - b * a;
}

CMatrix commutator(const HermitianOp& a, const HermitianOp& b) {
  return commutator(a.matrix(), b.matrix());
}

double max_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

Unitary haar_unitary(Eigen::Index dim, std::uint64_t seed) {
  if (dim < 2) throw ValidationError("haar_unitary: dim must be >= 2");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix z(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(r, c) = Complex(re, im) / std::sqrt(2.0);
    }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Complex d = r(k, k);
    const double mag = std::abs(d);
    q.col(k) *= (mag > 0.0 ? d / mag : Complex(1.0, 0.0));
  }
  return Unitary(std::move(q));
}

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

}  // namespace adhoc
