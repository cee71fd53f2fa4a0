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

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

#include "qshadow/dense.hpp"
#include "qshadow/states.hpp"

namespace qshadow {

// SplitMix64: used only to expand and mix seeds.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// xoshiro256**: fast 64-bit generator, UniformRandomBitGenerator-conformant.
class Xoshiro256StarStar {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256StarStar(std::uint64_t seed) {
    SplitMix64 mixer(seed);
    for (auto& word : state_) word = mixer.next();
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t state_[4];
};

// Collapses (master seed, stream coordinates) into a single stream seed.
// Distinct coordinate tuples map to distinct seeds with overwhelming
// probability, so parallel workers can own disjoint streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t acc = master;
  for (std::uint64_t p : parts) {
    SplitMix64 mixer(acc ^ (p + 0x9e3779b97f4a7c15ULL));
    acc = mixer.next();
  }
  SplitMix64 finisher(acc);
  return finisher.next();
}

inline Xoshiro256StarStar derive_stream(std::uint64_t master,
                                        std::initializer_list<std::uint64_t> parts) {
  return Xoshiro256StarStar(derive_seed(master, parts));
}

// Matrix of iid standard complex Gaussians: entry = (x + iy)/sqrt(2) with
// x, y ~ N(0,1). Entries are drawn in row-major order.
template <typename Scalar = double, typename Urbg>
ComplexMatrix<Scalar> ginibre(Index rows, Index cols, Urbg& rng) {
  std::normal_distribution<Scalar> gauss(Scalar(0), Scalar(1));
  const Scalar inv_sqrt2 = Scalar(1) / std::sqrt(Scalar(2));
  ComplexMatrix<Scalar> m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      const Scalar re = gauss(rng);
      const Scalar im = gauss(rng);
      m(i, j) = Complex<Scalar>(re * inv_sqrt2, im * inv_sqrt2);
    }
  return m;
}

// Haar-random unitary: QR decomposition of a complex Ginibre matrix with the
// phases of the R diagonal absorbed into Q so the distribution is exactly
// Haar rather than QR-gauge-skewed.
template <typename Scalar = double, typename Urbg>
UnitaryMatrix<Scalar> sample_haar_unitary(Index d, Urbg& rng) {
  const ComplexMatrix<Scalar> g = ginibre<Scalar>(d, d, rng);
  Eigen::HouseholderQR<ComplexMatrix<Scalar>> qr(g);
  ComplexMatrix<Scalar> q = qr.householderQ();
  const ComplexVector<Scalar> r_diag = qr.matrixQR().diagonal();
  for (Index j = 0; j < d; ++j) {
    const Scalar mag = std::abs(r_diag[j]);
    const Complex<Scalar> phase = mag > Scalar(0) ? r_diag[j] / mag : Complex<Scalar>(1);
    q.col(j) *= phase;
  }
  return UnitaryMatrix<Scalar>(std::move(q));
}

// GUE-type random Hermitian matrix: H = (G + G^dagger)/2 with G Ginibre,
// optionally projected traceless and scaled to unit Frobenius norm.
template <typename Scalar = double, typename Urbg>
HermitianOperator<Scalar> random_hermitian(Index d, Urbg& rng, bool traceless = true,
                                           bool unit_norm = true) {
  const ComplexMatrix<Scalar> g = ginibre<Scalar>(d, d, rng);
  ComplexMatrix<Scalar> h = (g + g.adjoint()) / Scalar(2);
  if (traceless) h -= (h.trace() / Scalar(d)) * ComplexMatrix<Scalar>::Identity(d, d);
  if (unit_norm) {
    const Scalar norm = h.norm();
    detail::require(norm > Scalar(0), "random_hermitian: degenerate zero draw");
    h /= norm;
  }
  return HermitianOperator<Scalar>(std::move(h));
}

}  // namespace qshadow
