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
// Random-matrix diagnostics for the noise bulk of estimated Choi spectra.
// Model: restricted to the kernel of the true Choi matrix (dimension
// D = d^2 - k), the estimation noise is a GUE-like Wigner matrix with
// per-entry standard deviation a/sqrt(n) for n total shadow samples, so the
// bulk eigenvalue density is a semicircle of standard deviation
// sigma = sqrt(D/n) a and radius R = 2 sigma.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qshadow/dense.hpp"
#include "qshadow/denoise.hpp"
#include "qshadow/linalg.hpp"
#include "qshadow/rng.hpp"

namespace qshadow {

template <typename Scalar = double>
struct RmtPrediction {
  Index bulk_dim = 0;   // D, dimension of the true-kernel block
  Index n_samples = 0;  // total number of shadow samples n
  Scalar a = 0;         // per-entry noise scale before 1/sqrt(n)

  Scalar sigma() const {
    return std::sqrt(static_cast<Scalar>(bulk_dim) / static_cast<Scalar>(n_samples)) * a;
  }
  Scalar radius() const { return Scalar(2) * sigma(); }
};

template <typename Scalar>
Scalar predicted_sigma(Index bulk_dim, Index n_samples, Scalar a) {
  detail::require(bulk_dim > 0 && n_samples > 0, "predicted_sigma: D and n must be positive");
  return RmtPrediction<Scalar>{bulk_dim, n_samples, a}.sigma();
}

// Wigner semicircle density with standard deviation sigma (radius 2 sigma).
template <typename Scalar>
Scalar semicircle_pdf(Scalar x, Scalar sigma) {
  detail::require(sigma > Scalar(0), "semicircle_pdf: sigma must be positive");
  const Scalar r = Scalar(2) * sigma;
  if (std::abs(x) >= r) return Scalar(0);
  constexpr Scalar pi = Scalar(3.14159265358979323846L);
  return Scalar(2) / (pi * r * r) * std::sqrt(r * r - x * x);
}

// Closed-form CDF of the semicircle law.
template <typename Scalar>
Scalar semicircle_cdf(Scalar x, Scalar sigma) {
  detail::require(sigma > Scalar(0), "semicircle_cdf: sigma must be positive");
  const Scalar r = Scalar(2) * sigma;
  if (x <= -r) return Scalar(0);
  if (x >= r) return Scalar(1);
  constexpr Scalar pi = Scalar(3.14159265358979323846L);
  return Scalar(0.5) + (x * std::sqrt(r * r - x * x) + r * r * std::asin(x / r)) / (pi * r * r);
}

// Smallest n with bulk standard deviation at most dt/safety:
// n = safety^2 D a^2 / dt^2 rounded up. A spike at O(dt) separates from the
// bulk once it exceeds the bulk sigma, so this is the sample count at which
// the signal eigenvalues become detectable, with `safety` as margin.
template <typename Scalar>
std::uint64_t min_samples(Index bulk_dim, Scalar a, Scalar dt, Scalar safety = Scalar(1)) {
  detail::require(bulk_dim > 0, "min_samples: D must be positive");
  detail::require(a > Scalar(0) && dt > Scalar(0) && safety > Scalar(0),
                  "min_samples: a, dt, safety must be positive");
  const Scalar n = safety * safety * static_cast<Scalar>(bulk_dim) * a * a / (dt * dt);
  return static_cast<std::uint64_t>(std::ceil(n));
}

template <typename Scalar = double>
struct BulkParams {
  Index bulk_count = 0;
  Scalar sigma_hat = 0;  // rms of the bulk eigenvalues about zero
  Scalar a_hat = 0;      // sigma_hat * sqrt(n / D)
};

// Fits the semicircle scale to the observed bulk of a classified spectrum.
template <typename Scalar>
BulkParams<Scalar> estimate_bulk_params(const SpectrumClassification<Scalar>& cls,
                                        Index n_samples) {
  const auto bulk_count = static_cast<Index>(cls.bulk_indices.size());
  detail::require(bulk_count >= 8,
                  "estimate_bulk_params: need at least 8 bulk eigenvalues, got " +
                      std::to_string(bulk_count));
  detail::require(n_samples > 0, "estimate_bulk_params: n must be positive");
  Scalar second_moment = 0;
  for (Index i : cls.bulk_indices) second_moment += cls.eigenvalues[i] * cls.eigenvalues[i];
  second_moment /= static_cast<Scalar>(bulk_count);
  BulkParams<Scalar> out;
  out.bulk_count = bulk_count;
  out.sigma_hat = std::sqrt(second_moment);
  out.a_hat = out.sigma_hat *
              std::sqrt(static_cast<Scalar>(n_samples) / static_cast<Scalar>(bulk_count));
  return out;
}

// Two-sided Kolmogorov-Smirnov distance between samples and the semicircle
// law of the given sigma.
template <typename Scalar>
Scalar ks_distance(std::vector<Scalar> samples, Scalar sigma) {
  detail::require(!samples.empty(), "ks_distance: no samples");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<Scalar>(samples.size());
  Scalar ks = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Scalar cdf = semicircle_cdf(samples[i], sigma);
    const Scalar hi = (static_cast<Scalar>(i) + 1) / n - cdf;
    const Scalar lo = cdf - static_cast<Scalar>(i) / n;
    ks = std::max({ks, hi, lo});
  }
  return ks;
}

// GUE-type Hermitian matrix with E|H_ij|^2 = entry_std^2 for every entry
// (real diagonal), so E[Tr H^2] = D^2 entry_std^2.
template <typename Scalar = double, typename Urbg>
ComplexMatrix<Scalar> sample_gue(Index dim, Scalar entry_std, Urbg& rng) {
  detail::require(dim > 0 && entry_std > Scalar(0), "sample_gue: bad parameters");
  const ComplexMatrix<Scalar> g = ginibre<Scalar>(dim, dim, rng);
  return entry_std / std::sqrt(Scalar(2)) * (g + g.adjoint());
}

template <typename Scalar = double>
struct DavisKahanReport {
  Scalar g = 0;              // separation between estimated complement and true signal interval
  Scalar observed = 0;       // |E1_hat^dagger E0|_F^2, actual subspace leakage
  Scalar bound = 0;          // |E1_hat^dagger X E0|_F^2 / g^2
  Scalar noise_norm_sq = 0;  // |X|_F^2 for X = estimated - true
  bool vacuous = false;      // an estimated complement eigenvalue fell inside the interval
  Scalar markov_epsilon = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar markov_prob_lower = std::numeric_limits<Scalar>::quiet_NaN();
};

// Subspace perturbation bound. E0 spans the true eigenvectors at
// `signal_indices` (positions in the descending spectrum) with eigenvalues
// inside [a, b]; E1_hat spans the remaining estimated eigenvectors, with
// estimated eigenvalues at distance >= g from [a, b]. Then
//   |E1_hat^dagger E0|_F <= |E1_hat^dagger X E0|_F / g.
// When `expected_noise_sq` (the model value of E|X|_F^2) is given, the
// report also carries the Markov guarantee: with probability at least
// 1 - E|X|_F^2 / (g^2 eps), the leakage bound is at most eps.
template <typename Scalar>
DavisKahanReport<Scalar> davis_kahan_bound(
    const ChoiMatrix<Scalar>& truth, const ChoiMatrix<Scalar>& estimate,
    const std::vector<Index>& signal_indices,
    Scalar expected_noise_sq = std::numeric_limits<Scalar>::quiet_NaN(),
    Scalar markov_epsilon = std::numeric_limits<Scalar>::quiet_NaN()) {
  const Index big = truth.matrix().rows();
  detail::require(estimate.matrix().rows() == big, "davis_kahan_bound: dimension mismatch");
  detail::require(!signal_indices.empty() &&
                      static_cast<Index>(signal_indices.size()) < big,
                  "davis_kahan_bound: signal set must be a proper nonempty subset");

  const HermitianEig<Scalar> true_eig = hermitian_eig(truth.matrix(), Scalar(kChannelTol));
  const HermitianEig<Scalar> est_eig = hermitian_eig(estimate.matrix(), Scalar(kChannelTol));
  // Descending views.
  const RealVector<Scalar> tv = true_eig.eigenvalues.reverse();
  const ComplexMatrix<Scalar> tvecs = true_eig.eigenvectors.rowwise().reverse();
  const RealVector<Scalar> ev = est_eig.eigenvalues.reverse();
  const ComplexMatrix<Scalar> evecs = est_eig.eigenvectors.rowwise().reverse();

  std::vector<bool> in_signal(big, false);
  for (Index i : signal_indices) {
    detail::require(i >= 0 && i < big, "davis_kahan_bound: signal index out of range");
    in_signal[static_cast<std::size_t>(i)] = true;
  }

  const auto k = static_cast<Index>(signal_indices.size());
  ComplexMatrix<Scalar> e0(big, k);
  Scalar lo = std::numeric_limits<Scalar>::infinity();
  Scalar hi = -std::numeric_limits<Scalar>::infinity();
  Index col = 0;
  for (Index i : signal_indices) {
    e0.col(col++) = tvecs.col(i);
    lo = std::min(lo, tv[i]);
    hi = std::max(hi, tv[i]);
  }

  ComplexMatrix<Scalar> e1(big, big - k);
  Scalar g = std::numeric_limits<Scalar>::infinity();
  col = 0;
  for (Index i = 0; i < big; ++i) {
    if (in_signal[static_cast<std::size_t>(i)]) continue;
    e1.col(col++) = evecs.col(i);
    const Scalar dist = std::max({lo - ev[i], ev[i] - hi, Scalar(0)});
    g = std::min(g, dist);
  }

  DavisKahanReport<Scalar> report;
  report.g = g;
  report.vacuous = !(g > Scalar(0));
  const ComplexMatrix<Scalar> x = estimate.matrix() - truth.matrix();
  report.noise_norm_sq = x.squaredNorm();
  report.observed = (e1.adjoint() * e0).squaredNorm();
  report.bound = report.vacuous ? std::numeric_limits<Scalar>::infinity()
                                : (e1.adjoint() * x * e0).squaredNorm() / (g * g);
  if (std::isfinite(expected_noise_sq) && std::isfinite(markov_epsilon) && !report.vacuous &&
      markov_epsilon > Scalar(0)) {
    report.markov_epsilon = markov_epsilon;
    report.markov_prob_lower =
        Scalar(1) - expected_noise_sq / (g * g * markov_epsilon);
  }
  return report;
}

}  // namespace qshadow
