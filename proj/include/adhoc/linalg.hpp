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

// linalg.hpp: dense complex operators, the Hermitian matrix exponential and
// Haar sampling. Everything here is small (dim <= 27) and dense.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace adhoc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;

/// Thrown whenever an input violates a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Square complex matrix equal to its conjugate transpose (within 1e-12).
class HermitianOp {
 public:
  explicit HermitianOp(CMatrix m);

  /// Symmetrizes `m` as (m + m^dagger)/2 without validating; for operators
  /// assembled from sums whose rounding is known to be benign.
  static HermitianOp symmetrized(const CMatrix& m);

  const CMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  struct Trusted {};
  HermitianOp(CMatrix m, Trusted) : m_(std::move(m)) {}
  CMatrix m_;
};

/// Square complex matrix with U^dagger U = I to within 1e-10 (max entry).
class Unitary {
 public:
  explicit Unitary(CMatrix m);

  /// Skips the O(d^3) check. Only for products of already-unitary factors.
  static Unitary unchecked(CMatrix m) { return Unitary(std::move(m), Trusted{}); }
  static Unitary identity(Eigen::Index dim);

  const CMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

  /// max |(U^dagger U - I)_kl|
  double unitarity_defect() const;

 private:
  struct Trusted {};
  Unitary(CMatrix m, Trusted) : m_(std::move(m)) {}
  CMatrix m_;
};

/// Uniform piecewise-constant time discretisation of [0, T].
class TimeGrid {
 public:
  TimeGrid(double total_time, int slices);

  double total_time() const { return total_time_; }
  int slices() const { return slices_; }
  double dt() const { return total_time_ / slices_; }
  /// Midpoint of slice j.
  double midpoint(int j) const { return (j + 0.5) * dt(); }

  bool operator==(const TimeGrid&) const = default;

 private:
  double total_time_;
  int slices_;
};

/// exp(-i H dt) through the eigendecomposition of H.
Unitary expm_unitary(const HermitianOp& h, double dt);

/// AB - BA.
CMatrix commutator(const CMatrix& a, const CMatrix& b);
CMatrix commutator(const HermitianOp& a, const HermitianOp& b);

/// Largest entry modulus.
double max_norm(const CMatrix& m);

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// diag(R) divided out. Deterministic in `seed`.
Unitary haar_unitary(Eigen::Index dim, std::uint64_t seed);

// Pauli matrices (2x2).
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();

}  // namespace adhoc
