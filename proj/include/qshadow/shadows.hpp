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
// Classical-shadow simulation: random-basis measurements of channel outputs
// and the linear-inversion snapshot estimator.
//
// Reproducibility contract: every measurement sample owns an RNG stream
// derived from (master_seed, input_index, sample_index). Workers are
// parallel over input indices only and samples within an input accumulate
// sequentially, so results are bit-identical for any worker count.

#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "qshadow/channel.hpp"
#include "qshadow/dense.hpp"
#include "qshadow/rng.hpp"
#include "qshadow/states.hpp"

namespace qshadow {

// Informationally complete probe set of d^2 states: the basis projectors
// |k><k| and, for each pair k < l, the superpositions (|k>+|l>)/sqrt(2) and
// (|k>+i|l>)/sqrt(2).
template <typename Scalar = double>
struct InputStateSet {
  Index dim = 0;
  std::vector<DensityMatrix<Scalar>> states;
  // Condition number of the Gram matrix (1/T) sum vec(rho) vec(rho)^dagger.
  Scalar gram_condition = 0;
};

template <typename Scalar = double>
InputStateSet<Scalar> ic_input_states(Index d) {
  detail::require(d >= 2, "ic_input_states: need dimension >= 2");
  InputStateSet<Scalar> set;
  set.dim = d;
  for (Index k = 0; k < d; ++k) set.states.push_back(DensityMatrix<Scalar>::basis_state(d, k));
  for (Index k = 0; k < d; ++k)
    for (Index l = k + 1; l < d; ++l) {
      ComplexVector<Scalar> plus = ComplexVector<Scalar>::Zero(d);
      plus[k] = Complex<Scalar>(1);
      plus[l] = Complex<Scalar>(1);
      set.states.push_back(DensityMatrix<Scalar>::pure(plus));
      ComplexVector<Scalar> phase = ComplexVector<Scalar>::Zero(d);
      phase[k] = Complex<Scalar>(1);
      phase[l] = Complex<Scalar>(0, 1);
      set.states.push_back(DensityMatrix<Scalar>::pure(phase));
    }
  const Index t = static_cast<Index>(set.states.size());
  ComplexMatrix<Scalar> gram = ComplexMatrix<Scalar>::Zero(d * d, d * d);
  for (const auto& rho : set.states) {
    const ComplexVector<Scalar> v = vec_rowmajor(rho.matrix());
    gram.noalias() += v * v.adjoint() / Complex<Scalar>(static_cast<Scalar>(t));
  }
  const HermitianEig<Scalar> eig = hermitian_eig(gram);
  detail::require(eig.eigenvalues[0] > Scalar(0),
                  "ic_input_states: probe set is not informationally complete");
  set.gram_condition = eig.eigenvalues[eig.eigenvalues.size() - 1] / eig.eigenvalues[0];
  return set;
}

// One measured sample: which probe state, the seed that regenerates the
// random basis, and the observed outcome.
struct MeasurementRecord {
  Index input_index = 0;
  std::uint64_t unitary_seed = 0;
  Index outcome = 0;
};

// Computational-basis measurement after rotating by u: samples b with
// probability <b| u rho u^dagger |b>.
template <typename Scalar, typename Urbg>
Index measure_computational(const ComplexMatrix<Scalar>& rho, const UnitaryMatrix<Scalar>& u,
                            Urbg& rng) {
  const Index d = rho.rows();
  detail::require(u.dim() == d, "measure_computational: dimension mismatch");
  // p_b = (u rho u^dagger)_bb = sum_j (u rho)_bj conj(u_bj).
  const ComplexMatrix<Scalar> b_mat = u.matrix() * rho;
  RealVector<Scalar> probs =
      (b_mat.array() * u.matrix().conjugate().array()).rowwise().sum().real();
  Scalar total = 0;
  for (Index b = 0; b < d; ++b) {
    detail::require(probs[b] > -Scalar(1e-9), "measure_computational: negative probability " +
                                                  std::to_string(probs[b]));
    probs[b] = std::max(probs[b], Scalar(0));
    total += probs[b];
  }
  detail::require(std::abs(total - Scalar(1)) < Scalar(1e-6),
                  "measure_computational: outcome probabilities sum to " + std::to_string(total));
  std::uniform_real_distribution<Scalar> unif(Scalar(0), Scalar(1));
  const Scalar draw = unif(rng) * total;
  Scalar cumulative = 0;
  for (Index b = 0; b < d; ++b) {
    cumulative += probs[b];
    if (draw < cumulative) return b;
  }
  return d - 1;
}

// Linear-inversion snapshot (d+1) u^dagger |b><b| u - I; an unbiased
// estimator of the measured state under Haar-random u, with trace exactly 1.
template <typename Scalar>
ComplexMatrix<Scalar> snapshot(const UnitaryMatrix<Scalar>& u, Index b) {
  const Index d = u.dim();
  detail::require(b >= 0 && b < d, "snapshot: outcome out of range");
  const ComplexVector<Scalar> row = u.matrix().row(b).adjoint();  // u^dagger |b>
  ComplexMatrix<Scalar> s = Scalar(d + 1) * (row * row.adjoint());
  s -= ComplexMatrix<Scalar>::Identity(d, d);
  return s;
}

// Mean of n_samples snapshots of the channel output for one probe state.
// Samples are drawn sequentially from per-sample derived streams; identical
// (master_seed, input_index, n_samples) give bit-identical results.
template <typename Scalar>
ComplexMatrix<Scalar> estimate_output_state(const KrausSet<Scalar>& channel,
                                            const DensityMatrix<Scalar>& rho_in, Index n_samples,
                                            std::uint64_t master_seed, Index input_index,
                                            std::vector<MeasurementRecord>* log = nullptr) {
  detail::require(n_samples > 0, "estimate_output_state: need at least one sample");
  const Index d = channel.dim();
  const ComplexMatrix<Scalar> rho_out = apply_kraus(channel, rho_in.matrix());
  ComplexMatrix<Scalar> accum = ComplexMatrix<Scalar>::Zero(d, d);
  for (Index s = 0; s < n_samples; ++s) {
    const std::uint64_t seed =
        derive_seed(master_seed, {static_cast<std::uint64_t>(input_index),
                                  static_cast<std::uint64_t>(s)});
    Xoshiro256StarStar rng(seed);
    const UnitaryMatrix<Scalar> u = sample_haar_unitary<Scalar>(d, rng);
    const Index b = measure_computational(rho_out, u, rng);
    // Accumulate u^dagger |b><b| u; the affine part of the snapshot is
    // applied once at the end.
    const ComplexVector<Scalar> row = u.matrix().row(b).adjoint();
    accum.noalias() += row * row.adjoint();
    if (log) log->push_back({input_index, seed, b});
  }
  ComplexMatrix<Scalar> est =
      (Scalar(d + 1) / static_cast<Scalar>(n_samples)) * accum;
  est -= ComplexMatrix<Scalar>::Identity(d, d);
  return est;
}

// Estimated channel outputs for every probe state, parallel over probes.
// Worker count affects scheduling only, never the sampled streams.
template <typename Scalar>
std::vector<ComplexMatrix<Scalar>> estimate_all_outputs(
    const KrausSet<Scalar>& channel, const InputStateSet<Scalar>& inputs, Index n_samples,
    std::uint64_t master_seed, unsigned n_threads = 0,
    std::vector<MeasurementRecord>* log = nullptr) {
  const auto t = static_cast<Index>(inputs.states.size());
  std::vector<ComplexMatrix<Scalar>> outputs(t);
  std::vector<std::vector<MeasurementRecord>> logs(log ? t : 0);

  unsigned workers = n_threads == 0 ? std::thread::hardware_concurrency() : n_threads;
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(t)));

  std::atomic<Index> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&]() {
    for (;;) {
      const Index i = next.fetch_add(1);
      if (i >= t || failed.load()) break;
      try {
        outputs[i] = estimate_output_state(channel, inputs.states[i], n_samples, master_seed, i,
                                           log ? &logs[i] : nullptr);
      } catch (...) {
        failed.store(true);
        const std::lock_guard<std::mutex> guard(error_mutex);
        if (!error) error = std::current_exception();
        break;
      }
    }
  };
  if (workers == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  if (log)
    for (auto& chunk : logs) log->insert(log->end(), chunk.begin(), chunk.end());
  return outputs;
}

}  // namespace qshadow
