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
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace qshadow {

using Index = Eigen::Index;

template <typename Scalar = double>
using Complex = std::complex<Scalar>;

template <typename Scalar = double>
using ComplexMatrix = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar = double>
using ComplexVector = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar = double>
using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using ComplexMatrixXd = ComplexMatrix<double>;
using ComplexVectorXd = ComplexVector<double>;

// Real scalar underlying a (possibly complex) Eigen expression.
template <typename Derived>
using RealScalarOf = typename Eigen::NumTraits<typename Derived::Scalar>::Real;

// Tolerance for hermiticity/unitarity/trace checks on validated operator types.
inline constexpr double kOperatorTol = 1e-10;
// Tolerance for channel-level invariants (trace preservation, completeness, ...).
inline constexpr double kChannelTol = 1e-9;
// Eigenvalues in [-kPsdTol, 0) are treated as zero by positive-semidefinite code.
inline constexpr double kPsdTol = 1e-10;

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

inline void require_square(Index rows, Index cols, const std::string& who) {
  require(rows == cols, who + ": matrix must be square, got " + std::to_string(rows) + "x" +
                            std::to_string(cols));
}

}  // namespace detail

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

// Frobenius norm of m - m^dagger; zero iff m is exactly Hermitian.
template <typename Derived>
RealScalarOf<Derived> hermiticity_defect(const Eigen::MatrixBase<Derived>& m) {
  detail::require_square(m.rows(), m.cols(), "hermiticity_defect");
  return (m - m.adjoint()).norm();
}

// Frobenius norm of m^dagger m - I; zero iff m is exactly unitary.
template <typename Derived>
RealScalarOf<Derived> unitarity_defect(const Eigen::MatrixBase<Derived>& m) {
  detail::require_square(m.rows(), m.cols(), "unitarity_defect");
  using Mat = ComplexMatrix<RealScalarOf<Derived>>;
  const Mat gram = m.adjoint() * m;
  return (gram - Mat::Identity(m.rows(), m.cols())).norm();
}

// Squared Frobenius error of a relative to reference b: |a - b|_F^2 / |b|_F^2.
template <typename DerivedA, typename DerivedB>
RealScalarOf<DerivedB> frobenius_error(const Eigen::MatrixBase<DerivedA>& a,
                                       const Eigen::MatrixBase<DerivedB>& b) {
  detail::require(a.rows() == b.rows() && a.cols() == b.cols(),
                  "frobenius_error: shape mismatch " + std::to_string(a.rows()) + "x" +
                      std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                      std::to_string(b.cols()));
  const RealScalarOf<DerivedB> denom = b.squaredNorm();
  detail::require(denom > RealScalarOf<DerivedB>(0),
                  "frobenius_error: reference matrix has zero norm");
  return (a - b).squaredNorm() / denom;
}

// Row-major flattening: v[i*cols + j] = m(i, j).
template <typename Derived>
ComplexVector<RealScalarOf<Derived>> vec_rowmajor(const Eigen::MatrixBase<Derived>& m) {
  ComplexVector<RealScalarOf<Derived>> v(m.size());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) v[i * m.cols() + j] = m(i, j);
  return v;
}

// Inverse of vec_rowmajor: m(i, j) = v[i*cols + j].
template <typename Derived>
ComplexMatrix<RealScalarOf<Derived>> unvec_rowmajor(const Eigen::MatrixBase<Derived>& v,
                                                    Index rows, Index cols) {
  detail::require(v.cols() == 1, "unvec_rowmajor: input must be a column vector");
  detail::require(v.size() == rows * cols, "unvec_rowmajor: size mismatch");
  ComplexMatrix<RealScalarOf<Derived>> m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = v[i * cols + j];
  return m;
}

enum class Subsystem { first, second };

// Partial trace of an operator on C^d (x) C^d over one tensor factor.
// Index convention matches kroneckerProduct: composite index (a*d2 + s) for
// a in the first factor, s in the second.
template <typename Derived>
ComplexMatrix<RealScalarOf<Derived>> partial_trace(const Eigen::MatrixBase<Derived>& m,
                                                   Index d_first, Index d_second,
                                                   Subsystem traced) {
  detail::require_square(m.rows(), m.cols(), "partial_trace");
  detail::require(m.rows() == d_first * d_second,
                  "partial_trace: dimension mismatch; rows != d_first * d_second");
  using Mat = ComplexMatrix<RealScalarOf<Derived>>;
  if (traced == Subsystem::first) {
    Mat out = Mat::Zero(d_second, d_second);
    for (Index a = 0; a < d_first; ++a)
      for (Index s = 0; s < d_second; ++s)
        for (Index t = 0; t < d_second; ++t) out(s, t) += m(a * d_second + s, a * d_second + t);
    return out;
  }
  Mat out = Mat::Zero(d_first, d_first);
  for (Index a = 0; a < d_first; ++a)
    for (Index b = 0; b < d_first; ++b)
      for (Index s = 0; s < d_second; ++s) out(a, b) += m(a * d_second + s, b * d_second + s);
  return out;
}

// Partial trace over a square bipartition d (x) d.
template <typename Derived>
ComplexMatrix<RealScalarOf<Derived>> partial_trace(const Eigen::MatrixBase<Derived>& m,
                                                   Subsystem traced) {
  detail::require_square(m.rows(), m.cols(), "partial_trace");
  const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(m.rows()))));
  detail::require(d * d == m.rows(), "partial_trace: dimension is not a perfect square");
  return partial_trace(m, d, d, traced);
}

}  // namespace qshadow
