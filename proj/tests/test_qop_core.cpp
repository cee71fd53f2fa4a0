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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <vector>

#include "qshadow/dense.hpp"
#include "qshadow/linalg.hpp"
#include "qshadow/rng.hpp"
#include "qshadow/states.hpp"

using namespace qshadow;

namespace {

ComplexMatrixXd random_hermitian_matrix(Index d, std::uint64_t seed) {
  Xoshiro256StarStar rng(seed);
  const ComplexMatrixXd g = ginibre<double>(d, d, rng);
  return (g + g.adjoint()) / 2.0;
}

}  // namespace

TEST_CASE("vec_rowmajor follows the i*cols+j convention and unvec inverts it") {
  ComplexMatrixXd m(2, 3);
  m << Complex<double>(1, 1), Complex<double>(2, 0), Complex<double>(3, -1),
      Complex<double>(4, 2), Complex<double>(5, 0), Complex<double>(6, 0.5);
  const ComplexVectorXd v = vec_rowmajor(m);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 3; ++j) CHECK(v[i * 3 + j] == m(i, j));
  const ComplexMatrixXd back = unvec_rowmajor(v, 2, 3);
  CHECK((back.array() == m.array()).all());
}

TEST_CASE("hermiticity and unitarity defects detect exact structure") {
  for (Index d : {2, 4, 8}) {
    const ComplexMatrixXd h = random_hermitian_matrix(d, 100 + static_cast<std::uint64_t>(d));
    CHECK(hermiticity_defect(h) == 0.0);
    ComplexMatrixXd skew = h;
    skew(0, d - 1) += Complex<double>(0, 1e-3);
    CHECK(hermiticity_defect(skew) > 1e-4);

    Xoshiro256StarStar rng(200 + static_cast<std::uint64_t>(d));
    const UnitaryMatrix<double> u = sample_haar_unitary<double>(d, rng);
    CHECK(unitarity_defect(u.matrix()) < 1e-13);
    CHECK(unitarity_defect(2.0 * u.matrix()) > 1.0);
  }
}

TEST_CASE("frobenius_error is the squared relative distance") {
  const ComplexMatrixXd b = random_hermitian_matrix(4, 7);
  CHECK(frobenius_error(b, b) == 0.0);
  // |2b - b|^2 / |b|^2 = 1 exactly.
  CHECK(frobenius_error(ComplexMatrixXd(2.0 * b), b) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(frobenius_error(b, ComplexMatrixXd::Zero(4, 4)), std::invalid_argument);
  CHECK_THROWS_AS(frobenius_error(ComplexMatrixXd::Zero(2, 2), b), std::invalid_argument);
}

TEST_CASE("partial_trace contracts one factor of a Kronecker product") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Xoshiro256StarStar rng(seed);
    const ComplexMatrixXd a = ginibre<double>(3, 3, rng);
    const ComplexMatrixXd b = ginibre<double>(4, 4, rng);
    const ComplexMatrixXd k = Eigen::kroneckerProduct(a, b).eval();
    const ComplexMatrixXd t_first = partial_trace(k, 3, 4, Subsystem::first);
    const ComplexMatrixXd t_second = partial_trace(k, 3, 4, Subsystem::second);
    CHECK((t_first - a.trace() * b).norm() < 1e-12);
    CHECK((t_second - b.trace() * a).norm() < 1e-12);
    // Both contractions preserve the full trace.
    CHECK(std::abs(t_first.trace() - k.trace()) < 1e-12);
    CHECK(std::abs(t_second.trace() - k.trace()) < 1e-12);
  }
  // Square bipartition overload requires a perfect-square dimension.
  CHECK_THROWS_AS(partial_trace(ComplexMatrixXd::Identity(6, 6), Subsystem::first),
                  std::invalid_argument);
}

TEST_CASE("hermitian_eig returns ascending eigenvalues with orthonormal vectors") {
  for (Index d : {2, 4, 8, 16}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const ComplexMatrixXd h = random_hermitian_matrix(d, seed * 31 + static_cast<std::uint64_t>(d));
      const HermitianEig<double> eig = hermitian_eig(h);
      for (Index i = 0; i + 1 < d; ++i) CHECK(eig.eigenvalues[i] <= eig.eigenvalues[i + 1]);
      CHECK(unitarity_defect(eig.eigenvectors) < 1e-12);
      const ComplexMatrixXd rebuilt = eig.eigenvectors *
                                      eig.eigenvalues.asDiagonal().toDenseMatrix().cast<Complex<double>>() *
                                      eig.eigenvectors.adjoint();
      CHECK((rebuilt - h).norm() < 1e-11 * std::max(1.0, h.norm()));
    }
  }
  ComplexMatrixXd not_herm = ComplexMatrixXd::Zero(2, 2);
  not_herm(0, 1) = Complex<double>(1, 0);
  CHECK_THROWS_AS(hermitian_eig(not_herm), std::invalid_argument);
}

TEST_CASE("psd_sqrt squares back to the input and rejects indefinite input") {
  for (Index d : {2, 4, 8}) {
    Xoshiro256StarStar rng(50 + static_cast<std::uint64_t>(d));
    const ComplexMatrixXd g = ginibre<double>(d, d, rng);
    const ComplexMatrixXd psd = g * g.adjoint();
    const ComplexMatrixXd root = psd_sqrt(psd);
    CHECK(hermiticity_defect(root) < 1e-12);
    CHECK((root * root - psd).norm() < 1e-10 * std::max(1.0, psd.norm()));
    // Eigenvalues of the root are nonnegative.
    CHECK(hermitian_eig(root).eigenvalues[0] >= -1e-12);
  }
  // A tiny negative eigenvalue within tolerance is clipped to zero.
  ComplexMatrixXd nearly = ComplexMatrixXd::Identity(2, 2);
  nearly(1, 1) = -0.5e-10;
  const ComplexMatrixXd root = psd_sqrt(nearly);
  CHECK(std::abs(root(1, 1)) < 1e-5);
  // A genuinely negative eigenvalue is an error.
  ComplexMatrixXd indefinite = ComplexMatrixXd::Identity(2, 2);
  indefinite(1, 1) = -0.1;
  CHECK_THROWS_AS(psd_sqrt(indefinite), std::invalid_argument);
}

TEST_CASE("trace_distance of orthogonal pure states is 1, of equal states 0") {
  const auto rho0 = DensityMatrix<double>::basis_state(2, 0);
  const auto rho1 = DensityMatrix<double>::basis_state(2, 1);
  CHECK(trace_distance(rho0.matrix(), rho1.matrix()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trace_distance(rho0.matrix(), rho0.matrix()) == doctest::Approx(0.0).epsilon(1e-12));
  const auto mixed = DensityMatrix<double>::maximally_mixed(2);
  CHECK(trace_distance(rho0.matrix(), mixed.matrix()) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("DensityMatrix validates hermiticity, trace, and positivity") {
  CHECK_NOTHROW(DensityMatrix<double>::maximally_mixed(4));
  CHECK_NOTHROW(DensityMatrix<double>::basis_state(3, 2));

  ComplexMatrixXd bad_trace = ComplexMatrixXd::Identity(2, 2);
  CHECK_THROWS_AS((void)DensityMatrix<double>(bad_trace), std::invalid_argument);

  ComplexMatrixXd negative(2, 2);
  negative << 1.5, 0, 0, -0.5;
  CHECK_THROWS_AS((void)DensityMatrix<double>(negative), std::invalid_argument);

  ComplexMatrixXd non_herm(2, 2);
  non_herm << 0.5, Complex<double>(0.1, 0.1), 0.0, 0.5;
  CHECK_THROWS_AS((void)DensityMatrix<double>(non_herm), std::invalid_argument);

  // pure() normalizes its argument.
  ComplexVectorXd psi(2);
  psi << Complex<double>(3, 0), Complex<double>(0, 4);
  const auto rho = DensityMatrix<double>::pure(psi);
  CHECK(std::abs(rho.matrix().trace() - 1.0) < 1e-14);
  CHECK(std::abs(rho.matrix()(0, 0).real() - 0.36) < 1e-14);
}

TEST_CASE("HermitianOperator and UnitaryMatrix validate their defining property") {
  CHECK_NOTHROW(HermitianOperator<double>(random_hermitian_matrix(4, 9)));
  ComplexMatrixXd skew(2, 2);
  skew << 0, Complex<double>(0, 1), Complex<double>(0, 1), 0;
  CHECK_THROWS_AS((void)HermitianOperator<double>(skew), std::invalid_argument);

  CHECK_NOTHROW(UnitaryMatrix<double>::identity(5));
  CHECK_THROWS_AS(UnitaryMatrix<double>(ComplexMatrixXd(2.0 * ComplexMatrixXd::Identity(2, 2))),
                  std::invalid_argument);
}

TEST_CASE("derive_seed separates streams and Xoshiro256** is reproducible") {
  const std::uint64_t a = derive_seed(42, {0, 0});
  const std::uint64_t b = derive_seed(42, {0, 1});
  const std::uint64_t c = derive_seed(42, {1, 0});
  const std::uint64_t d = derive_seed(43, {0, 0});
  CHECK(a != b);
  CHECK(a != c);
  CHECK(b != c);
  CHECK(a != d);

  Xoshiro256StarStar r1(a), r2(a), r3(b);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = r1();
    all_equal = all_equal && (x == r2());
    any_diff = any_diff || (x != r3());
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("ginibre has approximately standard complex moments") {
  Xoshiro256StarStar rng(777);
  const Index n = 200;
  const ComplexMatrixXd g = ginibre<double>(n, n, rng);
  const double mean_abs = std::abs(g.mean());
  const double second = g.squaredNorm() / static_cast<double>(n * n);
  CHECK(mean_abs < 0.02);                                 // E[g] = 0
  CHECK(second == doctest::Approx(1.0).epsilon(0.02));    // E|g|^2 = 1
}

TEST_CASE("Haar unitaries twirl a pure state to the maximally mixed state") {
  const Index d = 3;
  Xoshiro256StarStar rng(2026);
  ComplexMatrixXd acc = ComplexMatrixXd::Zero(d, d);
  const ComplexMatrixXd proj = DensityMatrix<double>::basis_state(d, 0).matrix();
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const ComplexMatrixXd u = sample_haar_unitary<double>(d, rng).matrix();
    acc += u * proj * u.adjoint();
  }
  acc /= static_cast<double>(n);
  CHECK((acc - ComplexMatrixXd::Identity(d, d) / static_cast<double>(d)).norm() < 0.02);
}

TEST_CASE("random_hermitian draws are traceless and unit-norm when requested") {
  Xoshiro256StarStar rng(5);
  const auto h = random_hermitian<double>(6, rng, true, true);
  CHECK(std::abs(h.matrix().trace()) < 1e-14);
  CHECK(h.matrix().norm() == doctest::Approx(1.0).epsilon(1e-13));
}
