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
// Eigenstructure denoising of estimated Choi matrices: classify the spectrum
// into signal (one dominant eigenvalue plus the jump-operator band) and
// noise bulk, truncate, project back onto the CPTP set, and read the
// Hamiltonian and jump operators off the surviving eigenpairs.

#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qshadow/channel.hpp"
#include "qshadow/dense.hpp"
#include "qshadow/linalg.hpp"

namespace qshadow {

// Eigendecomposition of a Choi matrix sorted descending, with indices split
// into the top eigenpair, the intermediate (jump-operator) band, and the
// noise bulk.
template <typename Scalar = double>
struct SpectrumClassification {
  RealVector<Scalar> eigenvalues;      // descending
  ComplexMatrix<Scalar> eigenvectors;  // columns aligned with eigenvalues
  Index top_index = 0;
  std::vector<Index> intermediate_indices;
  std::vector<Index> bulk_indices;
  Scalar gap_top = 0;   // top eigenvalue minus its successor
  Scalar gap_bulk = 0;  // smallest signal eigenvalue minus largest bulk eigenvalue
  bool ambiguous = false;

  // Number of retained (signal) eigenpairs.
  Index rank() const { return 1 + static_cast<Index>(intermediate_indices.size()); }
};

namespace detail {
// Median of |x| under the semicircle law with unit standard deviation.
inline constexpr double kSemicircleAbsMedian = 0.80803;
}  // namespace detail

// Splits the spectrum at a known rank, or scans for the largest
// multiplicative gap when no hint is given. The automatic scan first sizes
// the noise bulk robustly (median of |eigenvalue|, which the few signal
// eigenvalues barely shift), then considers split candidates whose smallest
// retained eigenvalue lies above the bulk scale but below 10*d*dt (signal
// eigenvalues of a near-identity step channel are O(d*dt)). A best gap
// ratio below 2 is flagged ambiguous.
template <typename Scalar>
SpectrumClassification<Scalar> classify_spectrum(const ChoiMatrix<Scalar>& choi,
                                                 std::optional<Index> rank_hint, Scalar dt) {
  const Index big = choi.matrix().rows();
  const HermitianEig<Scalar> eig = hermitian_eig(choi.matrix(), Scalar(kChannelTol));

  SpectrumClassification<Scalar> cls;
  cls.eigenvalues = eig.eigenvalues.reverse();
  cls.eigenvectors = eig.eigenvectors.rowwise().reverse();

  Index split = big;  // first bulk index
  if (rank_hint) {
    detail::require(*rank_hint >= 1 && *rank_hint <= big,
                    "classify_spectrum: rank hint out of range");
    split = *rank_hint;
  } else {
    detail::require(dt > Scalar(0), "classify_spectrum: dt must be positive");
    const Scalar lambda0 = cls.eigenvalues[0];
    const Scalar numerical_floor = Scalar(1e-12) * std::max(Scalar(1), lambda0);

    Scalar sigma_bulk = 0;
    if (big > 1) {
      std::vector<Scalar> magnitudes;
      magnitudes.reserve(static_cast<std::size_t>(big - 1));
      for (Index i = 1; i < big; ++i) magnitudes.push_back(std::abs(cls.eigenvalues[i]));
      const auto mid = magnitudes.begin() + static_cast<std::ptrdiff_t>(magnitudes.size() / 2);
      std::nth_element(magnitudes.begin(), mid, magnitudes.end());
      sigma_bulk = *mid / Scalar(detail::kSemicircleAbsMedian);
    }
    const Scalar bulk_edge = Scalar(2) * sigma_bulk;
    const Scalar scan_lo = std::max(sigma_bulk, numerical_floor);
    const Scalar window_hi = Scalar(10) * static_cast<Scalar>(choi.dim()) * dt;

    if (big == 1 ||
        cls.eigenvalues[1] <= std::max(Scalar(1.1) * bulk_edge, Scalar(2) * numerical_floor)) {
      split = 1;  // nothing sticks out of the bulk
    } else {
      Scalar best_ratio = 0;
      Index best_split = -1;
      for (Index i = 2; i < big; ++i) {
        const Scalar smallest_kept = cls.eigenvalues[i - 1];
        if (smallest_kept < scan_lo) break;
        if (smallest_kept > window_hi) continue;
        const Scalar ratio = smallest_kept / std::max(cls.eigenvalues[i], numerical_floor);
        if (ratio > best_ratio) {
          best_ratio = ratio;
          best_split = i;
        }
      }
      if (best_split < 0) {
        split = 1;
        cls.ambiguous = true;  // structure above the bulk scale but no clean gap
      } else {
        split = best_split;
        cls.ambiguous = best_ratio < Scalar(2);
      }
    }
  }

  for (Index i = 1; i < split; ++i) cls.intermediate_indices.push_back(i);
  for (Index i = split; i < big; ++i) cls.bulk_indices.push_back(i);
  cls.gap_top = big > 1 ? cls.eigenvalues[0] - cls.eigenvalues[1] : cls.eigenvalues[0];
  cls.gap_bulk = split < big ? cls.eigenvalues[split - 1] - cls.eigenvalues[split] : Scalar(0);
  return cls;
}

// Rank truncation: keep the top and intermediate eigenpairs, zero the bulk.
template <typename Scalar>
ChoiMatrix<Scalar> truncate_to_rank(const ChoiMatrix<Scalar>& choi,
                                    const SpectrumClassification<Scalar>& cls) {
  const Index big = choi.matrix().rows();
  detail::require(cls.eigenvalues.size() == big, "truncate_to_rank: classification mismatch");
  ComplexMatrix<Scalar> out = ComplexMatrix<Scalar>::Zero(big, big);
  auto add = [&](Index i) {
    const ComplexVector<Scalar> v = cls.eigenvectors.col(i);
    out.noalias() += Complex<Scalar>(cls.eigenvalues[i]) * (v * v.adjoint());
  };
  add(cls.top_index);
  for (Index i : cls.intermediate_indices) add(i);
  return ChoiMatrix<Scalar>::unchecked(std::move(out));
}

namespace detail {

// Orthogonal projection onto the affine trace-preservation subspace
// tr_out(X) = I_d (unnormalized Choi convention, output = first factor):
//   P(X) = X + (1/d) I (x) (I - tr_out(X)).
template <typename Scalar>
ComplexMatrix<Scalar> project_tp_matrix(const ComplexMatrix<Scalar>& x, Index d) {
  const ComplexMatrix<Scalar> deficit =
      ComplexMatrix<Scalar>::Identity(d, d) - partial_trace(x, Subsystem::first);
  return x + Eigen::kroneckerProduct(ComplexMatrix<Scalar>::Identity(d, d),
                                     ComplexMatrix<Scalar>((deficit / Scalar(d))))
                 .eval();
}

// Orthogonal projection onto the PSD cone: clip negative eigenvalues.
template <typename Scalar>
ComplexMatrix<Scalar> project_cp_matrix(const ComplexMatrix<Scalar>& x, Scalar eig_tol) {
  const HermitianEig<Scalar> eig = hermitian_eig(x, eig_tol);
  RealVector<Scalar> clipped = eig.eigenvalues.cwiseMax(Scalar(0));
  return eig.eigenvectors * clipped.asDiagonal() * eig.eigenvectors.adjoint();
}

}  // namespace detail

template <typename Scalar>
ChoiMatrix<Scalar> project_tp(const ChoiMatrix<Scalar>& choi) {
  return ChoiMatrix<Scalar>::unchecked(detail::project_tp_matrix(choi.matrix(), choi.dim()));
}

template <typename Scalar>
ChoiMatrix<Scalar> project_cp(const ChoiMatrix<Scalar>& choi) {
  const Scalar tol = Scalar(kChannelTol) * std::max(Scalar(1), choi.matrix().norm());
  return ChoiMatrix<Scalar>::unchecked(detail::project_cp_matrix(choi.matrix(), tol));
}

template <typename Scalar = double>
struct CptpProjection {
  ChoiMatrix<Scalar> choi;
  Index iterations = 0;
  bool converged = false;
  Scalar final_delta = 0;
};

// Dykstra-corrected alternating projections onto TP (affine) and CP (cone).
// Unlike plain alternation, the correction terms make the limit the actual
// nearest CPTP point. The loop ends on the CP step, so the result is PSD to
// machine precision and TP within O(tol). A Choi matrix that is already
// CPTP is returned unchanged after one cycle.
template <typename Scalar>
CptpProjection<Scalar> project_cptp(const ChoiMatrix<Scalar>& choi, Scalar tol = Scalar(1e-8),
                                    Index max_iter = 10000) {
  detail::require(tol > Scalar(0) && max_iter > 0, "project_cptp: bad tolerance or budget");
  const Index d = choi.dim();
  const Index big = d * d;
  const Scalar eig_tol = Scalar(kChannelTol) * std::max(Scalar(1), choi.matrix().norm());

  ComplexMatrix<Scalar> x = choi.matrix();
  ComplexMatrix<Scalar> p = ComplexMatrix<Scalar>::Zero(big, big);
  ComplexMatrix<Scalar> q = ComplexMatrix<Scalar>::Zero(big, big);

  Index it = 0;
  bool converged = false;
  Scalar delta = std::numeric_limits<Scalar>::infinity();
  while (it < max_iter) {
    ++it;
    const ComplexMatrix<Scalar> y = detail::project_tp_matrix<Scalar>(x + p, d);
    p = x + p - y;
    const ComplexMatrix<Scalar> z = detail::project_cp_matrix<Scalar>(y + q, eig_tol);
    q = y + q - z;
    delta = (z - x).norm();
    x = z;
    if (delta < tol) {
      converged = true;
      break;
    }
  }
  return {ChoiMatrix<Scalar>::unchecked(std::move(x)), it, converged, delta};
}

// H = traceless part of (i/(2 dt)) (M0 - M0^dagger), after fixing the global
// phase of the top Kraus operator so its trace is real positive. Errors if
// the trace is too small to anchor the phase gauge.
template <typename Scalar>
HermitianOperator<Scalar> extract_hamiltonian(const ComplexMatrix<Scalar>& top_kraus,
                                              Scalar dt) {
  detail::require(dt > Scalar(0), "extract_hamiltonian: dt must be positive");
  detail::require_square(top_kraus.rows(), top_kraus.cols(), "extract_hamiltonian");
  const Index d = top_kraus.rows();
  detail::require(std::abs(top_kraus.trace()) >= Scalar(1e-6) * static_cast<Scalar>(d),
                  "extract_hamiltonian: top Kraus operator is near-traceless; the phase gauge "
                  "and hence H are undefined");
  const ComplexMatrix<Scalar> m = fix_global_phase(top_kraus);
  ComplexMatrix<Scalar> h = Complex<Scalar>(0, 1) / (Scalar(2) * dt) * (m - m.adjoint());
  h -= (h.trace() / Scalar(d)) * ComplexMatrix<Scalar>::Identity(d, d);
  return HermitianOperator<Scalar>(std::move(h));
}

// K read off the Hermitian part of the top Kraus operator,
// M0 ~ I + dt(K - iH) for a single short-time step at unit rate.
template <typename Scalar>
HermitianOperator<Scalar> extract_k_top(const ComplexMatrix<Scalar>& top_kraus, Scalar dt) {
  detail::require(dt > Scalar(0), "extract_k_top: dt must be positive");
  detail::require_square(top_kraus.rows(), top_kraus.cols(), "extract_k_top");
  const Index d = top_kraus.rows();
  detail::require(std::abs(top_kraus.trace()) >= Scalar(1e-6) * static_cast<Scalar>(d),
                  "extract_k_top: top Kraus operator is near-traceless");
  const ComplexMatrix<Scalar> m = fix_global_phase(top_kraus);
  ComplexMatrix<Scalar> k = ((m + m.adjoint()) / Scalar(2) -
                             ComplexMatrix<Scalar>::Identity(d, d)) /
                            dt;
  return HermitianOperator<Scalar>(std::move(k));
}

// Jump operators from the intermediate eigenpairs:
// L_alpha = unvec(sqrt(lambda_alpha) mu_alpha) / sqrt(p), phase-gauged.
template <typename Scalar>
std::vector<ComplexMatrix<Scalar>> extract_lindblads(const SpectrumClassification<Scalar>& cls,
                                                     Scalar p) {
  detail::require(p > Scalar(0), "extract_lindblads: need p > 0");
  const Index d = detail::hilbert_dim_of(cls.eigenvalues.size(), "extract_lindblads");
  const Scalar inv_sqrt_p = Scalar(1) / std::sqrt(p);
  std::vector<ComplexMatrix<Scalar>> ls;
  for (Index i : cls.intermediate_indices) {
    const Scalar lambda = std::max(cls.eigenvalues[i], Scalar(0));
    const ComplexVector<Scalar> v = std::sqrt(lambda) * cls.eigenvectors.col(i);
    ls.push_back(fix_global_phase(unvec_rowmajor(v, d, d)) * inv_sqrt_p);
  }
  return ls;
}

// K = -(1/2) sum L^dagger L for the extracted jump operators.
template <typename Scalar>
HermitianOperator<Scalar> extract_k(const std::vector<ComplexMatrix<Scalar>>& lindblads,
                                    Index d) {
  ComplexMatrix<Scalar> s = ComplexMatrix<Scalar>::Zero(d, d);
  for (const auto& l : lindblads) {
    detail::require(l.rows() == d && l.cols() == d, "extract_k: dimension mismatch");
    s.noalias() += l.adjoint() * l;
  }
  return HermitianOperator<Scalar>(ComplexMatrix<Scalar>(-s / Scalar(2)));
}

// Reference channel and generator used to score a denoised estimate.
template <typename Scalar = double>
struct GroundTruth {
  ChoiMatrix<Scalar> choi;
  std::optional<Generator<Scalar>> generator;
};

template <typename Scalar = double>
struct DenoiseReport {
  SpectrumClassification<Scalar> raw_spectrum;  // spectrum of the estimated Choi
  ChoiMatrix<Scalar> processed_choi;            // truncated and CPTP-projected
  HermitianOperator<Scalar> hamiltonian;
  std::vector<ComplexMatrix<Scalar>> lindblads;
  HermitianOperator<Scalar> k_matrix;  // -(1/2) sum L^dagger L
  HermitianOperator<Scalar> k_top;     // cross-check from the top Kraus operator
  Generator<Scalar> generator;         // assembled from the estimates, unit rate
  Index rank = 0;
  bool ambiguous = false;
  Index cptp_iterations = 0;
  bool cptp_converged = false;
  Scalar k_top_deviation = 0;  // |k_top - k_matrix|_F / max(1, |k_matrix|_F)
  // Relative squared Frobenius errors against ground truth; NaN without truth.
  Scalar choi_error_truncated = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar choi_error = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar generator_error = std::numeric_limits<Scalar>::quiet_NaN();
};

// Full denoising pass over an estimated channel. Recovery works in the
// normalized clock where the jump rate is 1 and the per-step jump
// probability equals dt. Scored against `truth` when provided.
template <typename Scalar>
DenoiseReport<Scalar> denoise_pipeline(const Superoperator<Scalar>& estimate, Scalar dt,
                                       std::optional<Index> rank_hint = std::nullopt,
                                       const GroundTruth<Scalar>* truth = nullptr) {
  detail::require(dt > Scalar(0), "denoise_pipeline: dt must be positive");
  const ChoiMatrix<Scalar> choi_est = reshuffle(estimate);
  const Index d = choi_est.dim();

  SpectrumClassification<Scalar> raw = classify_spectrum(choi_est, rank_hint, dt);
  const Index rank = raw.rank();

  const ChoiMatrix<Scalar> truncated = truncate_to_rank(choi_est, raw);
  CptpProjection<Scalar> proj = project_cptp(truncated);

  const SpectrumClassification<Scalar> refined =
      classify_spectrum(proj.choi, rank, dt);
  const Scalar lambda0 = refined.eigenvalues[0];
  detail::require(lambda0 > Scalar(0), "denoise_pipeline: top Choi eigenvalue is not positive");
  const ComplexMatrix<Scalar> top_kraus = fix_global_phase(ComplexMatrix<Scalar>(
      unvec_rowmajor(ComplexVector<Scalar>(std::sqrt(lambda0) * refined.eigenvectors.col(0)), d,
                     d)));

  HermitianOperator<Scalar> h = extract_hamiltonian(top_kraus, dt);
  std::vector<ComplexMatrix<Scalar>> ls = extract_lindblads(refined, dt);
  HermitianOperator<Scalar> k = extract_k(ls, d);
  HermitianOperator<Scalar> k_top = extract_k_top(top_kraus, dt);
  Generator<Scalar> gen = assemble_generator(h, ls, k, Scalar(1));

  DenoiseReport<Scalar> report{std::move(raw),    std::move(proj.choi), std::move(h),
                               std::move(ls),     std::move(k),         std::move(k_top),
                               std::move(gen)};
  report.rank = rank;
  report.ambiguous = report.raw_spectrum.ambiguous;
  report.cptp_iterations = proj.iterations;
  report.cptp_converged = proj.converged;
  report.k_top_deviation = (report.k_top.matrix() - report.k_matrix.matrix()).norm() /
                           std::max(Scalar(1), report.k_matrix.matrix().norm());
  if (truth) {
    report.choi_error_truncated =
        frobenius_error(truncated.matrix(), truth->choi.matrix());
    report.choi_error = frobenius_error(report.processed_choi.matrix(), truth->choi.matrix());
    if (truth->generator)
      report.generator_error =
          frobenius_error(report.generator.matrix(), truth->generator->matrix());
  }
  return report;
}

}  // namespace qshadow
