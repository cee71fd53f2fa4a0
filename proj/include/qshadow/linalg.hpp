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

#include <string>

#include "qshadow/dense.hpp"

namespace qshadow {

template <typename Scalar = double>
struct HermitianEig {
  RealVector<Scalar> eigenvalues;   // ascending
  ComplexMatrix<Scalar> eigenvectors;  // orthonormal columns aligned with eigenvalues
};

// Full eigendecomposition of a Hermitian matrix, eigenvalues ascending.
// The input may carry a floating-point hermiticity defect up to `tol`; the
// solver sees the symmetrized part only.
template <typename Derived>
HermitianEig<RealScalarOf<Derived>> hermitian_eig(const Eigen::MatrixBase<Derived>& m,
                                                  RealScalarOf<Derived> tol = kOperatorTol) {
  using Scalar = RealScalarOf<Derived>;
  detail::require(all_finite(m), "hermitian_eig: input has non-finite entries");
  const Scalar defect = hermiticity_defect(m);
  detail::require(defect <= tol, "hermitian_eig: hermiticity defect " + std::to_string(defect) +
                                     " exceeds tolerance " + std::to_string(tol));
  const ComplexMatrix<Scalar> sym = (m + m.adjoint()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> solver(sym);
  detail::require(solver.info() == Eigen::Success, "hermitian_eig: eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

// Principal square root of a positive semidefinite matrix. Eigenvalues in
// [-tol, 0) are clipped to zero; eigenvalues below -tol are rejected.
template <typename Derived>
ComplexMatrix<RealScalarOf<Derived>> psd_sqrt(const Eigen::MatrixBase<Derived>& m,
                                              RealScalarOf<Derived> tol = kPsdTol) {
  using Scalar = RealScalarOf<Derived>;
  HermitianEig<Scalar> eig = hermitian_eig(m, tol);
  RealVector<Scalar> roots(eig.eigenvalues.size());
  for (Index i = 0; i < eig.eigenvalues.size(); ++i) {
    const Scalar lambda = eig.eigenvalues[i];
    detail::require(lambda >= -tol, "psd_sqrt: eigenvalue " + std::to_string(lambda) +
                                        " below -tolerance; matrix is not PSD");
    roots[i] = lambda > Scalar(0) ? std::sqrt(lambda) : Scalar(0);
  }
  return eig.eigenvectors * roots.asDiagonal() * eig.eigenvectors.adjoint();
}

// Trace distance (1/2)|a - b|_1 between Hermitian operators.
template <typename DerivedA, typename DerivedB>
RealScalarOf<DerivedB> trace_distance(const Eigen::MatrixBase<DerivedA>& a,
                                      const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = RealScalarOf<DerivedB>;
  detail::require(a.rows() == b.rows() && a.cols() == b.cols(),
                  "trace_distance: shape mismatch");
  const ComplexMatrix<Scalar> diff = a - b;
  // The difference of Hermitian operators is Hermitian, so the singular
  // values are the absolute eigenvalues. Allow a generous defect for
  // estimator outputs.
  HermitianEig<Scalar> eig = hermitian_eig(diff, Scalar(1e-6) * std::max(Scalar(1), diff.norm()));
  return eig.eigenvalues.array().abs().sum() / Scalar(2);
}

}  // namespace qshadow
