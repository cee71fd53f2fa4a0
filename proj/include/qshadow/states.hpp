// Copyright 2026 The qshadow authors
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

#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "qshadow/dense.hpp"
#include "qshadow/linalg.hpp"

namespace qshadow {

// Hermitian operator with the hermiticity defect validated at construction.
template <typename Scalar = double>
class HermitianOperator {
 public:
  explicit HermitianOperator(ComplexMatrix<Scalar> m, Scalar tol = Scalar(kOperatorTol))
      : mat_(std::move(m)) {
    detail::require_square(mat_.rows(), mat_.cols(), "HermitianOperator");
    detail::require(all_finite(mat_), "HermitianOperator: non-finite entries");
    const Scalar defect = hermiticity_defect(mat_);
    detail::require(defect <= tol, "HermitianOperator: hermiticity defect " +
                                       std::to_string(defect) + " exceeds " + std::to_string(tol));
  }

  static HermitianOperator unchecked(ComplexMatrix<Scalar> m) {
    HermitianOperator h;
    h.mat_ = std::move(m);
    return h;
  }

  static HermitianOperator zero(Index d) {
    return HermitianOperator(ComplexMatrix<Scalar>::Zero(d, d));
  }

  const ComplexMatrix<Scalar>& matrix() const { return mat_; }
  Index dim() const { return mat_.rows(); }

 private:
  HermitianOperator() = default;
  ComplexMatrix<Scalar> mat_;
};

// Unitary matrix with the unitarity defect validated at construction.
template <typename Scalar = double>
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(ComplexMatrix<Scalar> m, Scalar tol = Scalar(kOperatorTol))
      : mat_(std::move(m)) {
    detail::require_square(mat_.rows(), mat_.cols(), "UnitaryMatrix");
    detail::require(all_finite(mat_), "UnitaryMatrix: non-finite entries");
    const Scalar defect = unitarity_defect(mat_);
    detail::require(defect <= tol, "UnitaryMatrix: unitarity defect " + std::to_string(defect) +
                                       " exceeds " + std::to_string(tol));
  }

  static UnitaryMatrix unchecked(ComplexMatrix<Scalar> m) {
    UnitaryMatrix u;
    u.mat_ = std::move(m);
    return u;
  }

  static UnitaryMatrix identity(Index d) {
    return UnitaryMatrix(ComplexMatrix<Scalar>::Identity(d, d));
  }

  const ComplexMatrix<Scalar>& matrix() const { return mat_; }
  Index dim() const { return mat_.rows(); }

 private:
  UnitaryMatrix() = default;
  ComplexMatrix<Scalar> mat_;
};

// Density matrix: Hermitian, unit trace, positive semidefinite within kPsdTol.
template <typename Scalar = double>
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix<Scalar> m, Scalar tol = Scalar(kOperatorTol))
      : mat_(std::move(m)) {
    detail::require_square(mat_.rows(), mat_.cols(), "DensityMatrix");
    detail::require(all_finite(mat_), "DensityMatrix: non-finite entries");
    const Scalar herm = hermiticity_defect(mat_);
    detail::require(herm <= tol, "DensityMatrix: hermiticity defect " + std::to_string(herm) +
                                     " exceeds " + std::to_string(tol));
    const Scalar trace_err = std::abs(mat_.trace() - Complex<Scalar>(1));
    detail::require(trace_err <= tol, "DensityMatrix: trace deviates from 1 by " +
                                          std::to_string(trace_err));
    const HermitianEig<Scalar> eig = hermitian_eig(mat_, tol);
    const Scalar lambda_min = eig.eigenvalues[0];
    detail::require(lambda_min >= -Scalar(kPsdTol),
                    "DensityMatrix: negative eigenvalue " + std::to_string(lambda_min));
  }

  static DensityMatrix unchecked(ComplexMatrix<Scalar> m) {
    DensityMatrix rho;
    rho.mat_ = std::move(m);
    return rho;
  }

  // |k><k| in the computational basis.
  static DensityMatrix basis_state(Index d, Index k) {
    detail::require(k >= 0 && k < d, "DensityMatrix::basis_state: index out of range");
    ComplexMatrix<Scalar> m = ComplexMatrix<Scalar>::Zero(d, d);
    m(k, k) = Complex<Scalar>(1);
    return DensityMatrix(std::move(m));
  }

  static DensityMatrix maximally_mixed(Index d) {
    return DensityMatrix(ComplexMatrix<Scalar>::Identity(d, d) / Scalar(d));
  }

  // Rank-one projector onto a (normalized) pure state.
  static DensityMatrix pure(const ComplexVector<Scalar>& psi) {
    const Scalar norm = psi.norm();
    detail::require(norm > Scalar(0), "DensityMatrix::pure: zero vector");
    const ComplexVector<Scalar> unit = psi / norm;
    return DensityMatrix(unit * unit.adjoint());
  }

  const ComplexMatrix<Scalar>& matrix() const { return mat_; }
  Index dim() const { return mat_.rows(); }

 private:
  DensityMatrix() = default;
  ComplexMatrix<Scalar> mat_;
};

}  // namespace qshadow
