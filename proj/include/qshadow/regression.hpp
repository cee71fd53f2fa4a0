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
//
// Least-squares channel estimation from (input state, estimated output)
// pairs. With vec the row-major flattening, the loss
//   sum_t |vec(out_t) - E vec(in_t)|^2
// is minimized by E_hat = C_oi C_ii^{-1} with the second-moment matrices
//   C_ii = (1/T) sum_t vec(in_t) vec(in_t)^dagger,
//   C_oi = (1/T) sum_t vec(out_t) vec(in_t)^dagger.

#pragma once

#include <string>
#include <vector>

#include "qshadow/channel.hpp"
#include "qshadow/dense.hpp"
#include "qshadow/linalg.hpp"
#include "qshadow/shadows.hpp"

namespace qshadow {

template <typename Scalar = double>
struct CovariancePair {
  Index dim = 0;          // Hilbert-space dimension d
  Index sample_count = 0; // number of (input, output) pairs T
  ComplexMatrix<Scalar> in_in;   // d^2 x d^2, Hermitian PSD
  ComplexMatrix<Scalar> out_in;  // d^2 x d^2
};

// (1/T) sum vec(rho_t) vec(rho_t)^dagger over the probe states.
template <typename Scalar>
ComplexMatrix<Scalar> covariance_in_in(const std::vector<DensityMatrix<Scalar>>& inputs) {
  detail::require(!inputs.empty(), "covariance_in_in: empty input list");
  const Index d = inputs.front().dim();
  ComplexMatrix<Scalar> c = ComplexMatrix<Scalar>::Zero(d * d, d * d);
  for (const auto& rho : inputs) {
    detail::require(rho.dim() == d, "covariance_in_in: dimension mismatch");
    const ComplexVector<Scalar> v = vec_rowmajor(rho.matrix());
    c.noalias() += v * v.adjoint();
  }
  return c / Complex<Scalar>(static_cast<Scalar>(inputs.size()));
}

// (1/T) sum vec(out_t) vec(in_t)^dagger.
template <typename Scalar>
ComplexMatrix<Scalar> covariance_out_in(const std::vector<DensityMatrix<Scalar>>& inputs,
                                        const std::vector<ComplexMatrix<Scalar>>& outputs) {
  detail::require(!inputs.empty(), "covariance_out_in: empty input list");
  detail::require(inputs.size() == outputs.size(),
                  "covariance_out_in: input/output count mismatch");
  const Index d = inputs.front().dim();
  ComplexMatrix<Scalar> c = ComplexMatrix<Scalar>::Zero(d * d, d * d);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    detail::require(outputs[i].rows() == d && outputs[i].cols() == d,
                    "covariance_out_in: output dimension mismatch");
    const ComplexVector<Scalar> w = vec_rowmajor(outputs[i]);
    const ComplexVector<Scalar> v = vec_rowmajor(inputs[i].matrix());
    c.noalias() += w * v.adjoint();
  }
  return c / Complex<Scalar>(static_cast<Scalar>(inputs.size()));
}

template <typename Scalar>
CovariancePair<Scalar> make_covariance_pair(const std::vector<DensityMatrix<Scalar>>& inputs,
                                            const std::vector<ComplexMatrix<Scalar>>& outputs) {
  CovariancePair<Scalar> cov;
  cov.dim = inputs.empty() ? 0 : inputs.front().dim();
  cov.sample_count = static_cast<Index>(inputs.size());
  cov.in_in = covariance_in_in(inputs);
  cov.out_in = covariance_out_in(inputs, outputs);
  return cov;
}

// E_hat = C_oi C_ii^{-1}. Rejects ill-conditioned probe Gram matrices
// (condition number above max_condition) rather than returning noise.
// The estimate is unvalidated: with noisy outputs it need not be CP, though
// with an exactly informationally complete probe set it is TP by
// construction.
template <typename Scalar>
Superoperator<Scalar> ls_channel_estimate(const CovariancePair<Scalar>& cov,
                                          Scalar max_condition = Scalar(1e12)) {
  detail::require(cov.in_in.rows() == cov.in_in.cols() && cov.in_in.rows() == cov.dim * cov.dim,
                  "ls_channel_estimate: malformed covariance pair");
  const HermitianEig<Scalar> eig = hermitian_eig(cov.in_in, Scalar(kChannelTol));
  const Scalar lambda_min = eig.eigenvalues[0];
  const Scalar lambda_max = eig.eigenvalues[eig.eigenvalues.size() - 1];
  detail::require(lambda_min > Scalar(0),
                  "ls_channel_estimate: input covariance is singular; the probe set is not "
                  "informationally complete");
  const Scalar condition = lambda_max / lambda_min;
  detail::require(condition <= max_condition,
                  "ls_channel_estimate: input covariance condition number " +
                      std::to_string(condition) + " exceeds " + std::to_string(max_condition));
  // Solve E C_ii = C_oi via the Hermitian factorization of C_ii.
  const Eigen::LDLT<ComplexMatrix<Scalar>> ldlt(cov.in_in);
  detail::require(ldlt.info() == Eigen::Success, "ls_channel_estimate: factorization failed");
  ComplexMatrix<Scalar> e_adj = ldlt.solve(cov.out_in.adjoint());
  return Superoperator<Scalar>::unchecked(e_adj.adjoint());
}

}  // namespace qshadow
