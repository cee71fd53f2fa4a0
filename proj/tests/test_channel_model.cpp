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

#include <algorithm>
#include <complex>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "qshadow/channel.hpp"
#include "qshadow/rng.hpp"

using namespace qshadow;

namespace {

DensityMatrix<double> random_density(Index d, std::uint64_t seed) {
  Xoshiro256StarStar rng(seed);
  const ComplexMatrixXd g = ginibre<double>(d, d, rng);
  ComplexMatrixXd rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix<double>(std::move(rho));
}

// Direct master-equation action, independent of any superoperator plumbing:
// -i[H, rho] + rate * (sum_a L_a rho L_a^dagger - (1/2){S, rho}), S = sum L^dagger L.
ComplexMatrixXd gksl_action(const LindbladModel<double>& model, const ComplexMatrixXd& rho) {
  const ComplexMatrixXd& h = model.hamiltonian().matrix();
  const Complex<double> i_unit(0, 1);
  ComplexMatrixXd out = -i_unit * (h * rho - rho * h);
  const ComplexMatrixXd s = model.jump_sum();
  ComplexMatrixXd diss = -0.5 * (s * rho + rho * s);
  for (const auto& l : model.lindblads()) diss += l * rho * l.adjoint();
  out += model.rate() * diss;
  return out;
}

}  // namespace

TEST_CASE("superop_from_kraus reproduces the operator-sum action") {
  for (std::uint64_t seed : {3u, 11u, 29u}) {
    Xoshiro256StarStar rng(seed);
    const Index d = 4;
    const KrausSet<double> kraus = random_cptp_kraus<double>(d, 3, rng);
    const Superoperator<double> e = superop_from_kraus(kraus);
    for (int rep = 0; rep < 3; ++rep) {
      const DensityMatrix<double> rho = random_density(d, seed * 10 + rep);
      const ComplexMatrixXd via_super = apply_superop_matrix(e.matrix(), rho.matrix());
      const ComplexMatrixXd via_kraus = apply_kraus(kraus, rho.matrix());
      CHECK((via_super - via_kraus).norm() < 1e-12);
      // The validated superoperator maps states to states.
      const DensityMatrix<double> out = apply_superop(e, rho);
      CHECK(std::abs(out.matrix().trace() - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("reshuffle is a bit-exact involution") {
  Xoshiro256StarStar rng(17);
  const KrausSet<double> kraus = random_cptp_kraus<double>(3, 4, rng);
  const Superoperator<double> e = superop_from_kraus(kraus);
  const ChoiMatrix<double> c = reshuffle(e);
  const Superoperator<double> back = reshuffle_back(c);
  CHECK((back.matrix().array() == e.matrix().array()).all());
  // And in the other direction.
  const ChoiMatrix<double> c2 = reshuffle(back);
  CHECK((c2.matrix().array() == c.matrix().array()).all());
}

TEST_CASE("choi_from_kraus agrees with reshuffled superoperator") {
  for (Index d : {2, 3, 4}) {
    Xoshiro256StarStar rng(40 + static_cast<std::uint64_t>(d));
    const KrausSet<double> kraus = random_cptp_kraus<double>(d, 2, rng);
    const ChoiMatrix<double> direct = choi_from_kraus(kraus);
    const ChoiMatrix<double> via_reshuffle = reshuffle(superop_from_kraus(kraus));
    CHECK((direct.matrix() - via_reshuffle.matrix()).norm() < 1e-12);
    // Unnormalized convention: trace d, input marginal identity for TP maps.
    CHECK(std::abs(direct.matrix().trace().real() - static_cast<double>(d)) < 1e-10);
    CHECK((direct.input_marginal() - ComplexMatrixXd::Identity(d, d)).norm() < 1e-10);
    CHECK(direct.tp_defect() < 1e-10);
  }
}

TEST_CASE("pauli mixed channel has the closed-form Choi spectrum") {
  const Index n_qubits = 3;
  const Index d = 8;
  const double p = 0.1;
  const KrausSet<double> kraus = build_pauli_mixed_channel<double>(n_qubits, p, 0.1);
  CHECK(kraus.rank() == n_qubits + 1);
  CHECK(kraus.completeness_defect() < 1e-12);

  const ChoiMatrix<double> choi = choi_from_kraus(kraus);
  const HermitianEig<double> eig = hermitian_eig(choi.matrix());
  RealVector<double> lambda = eig.eigenvalues.reverse();
  // Kraus directions are trace-orthogonal, so the Choi eigenvalues are the
  // squared Kraus norms: d(1-p), d p/n (x n), and zero with multiplicity
  // d^2 - n - 1.
  CHECK(lambda[0] == doctest::Approx(d * (1.0 - p)).epsilon(1e-12));
  for (Index i = 1; i <= n_qubits; ++i)
    CHECK(lambda[i] == doctest::Approx(d * p / n_qubits).epsilon(1e-12));
  for (Index i = n_qubits + 1; i < d * d; ++i) CHECK(std::abs(lambda[i]) < 1e-12);
}

TEST_CASE("rate zero collapses the discrete step to the bare unitary") {
  const Index d = 2;
  ComplexMatrixXd z(2, 2);
  z << 1, 0, 0, -1;
  const double dt = 0.3;
  const LindbladModel<double> model(HermitianOperator<double>(z), {}, 0.0, dt);
  const KrausSet<double> kraus = build_discrete_lindblad(model);
  REQUIRE(kraus.rank() == 1);
  ComplexMatrixXd expected(2, 2);
  expected << std::exp(Complex<double>(0, -dt)), 0, 0, std::exp(Complex<double>(0, dt));
  CHECK((kraus.operators()[0] - expected).norm() < 1e-14);
}

TEST_CASE("unitary jump operators make the no-jump factor trivial") {
  // With a single unitary jump L, S = L^dagger L = I, so the no-jump Kraus
  // operator is exactly sqrt(1-p) U.
  const Index d = 2;
  ComplexMatrixXd z(2, 2), x(2, 2);
  z << 1, 0, 0, -1;
  x << 0, 1, 1, 0;
  const double rate = 2.0, dt = 0.1;
  const LindbladModel<double> model(HermitianOperator<double>(z), {x}, rate, dt);
  const double p = rate * dt;
  const KrausSet<double> kraus = build_discrete_lindblad(model);
  REQUIRE(kraus.rank() == 2);
  ComplexMatrixXd u(2, 2);
  u << std::exp(Complex<double>(0, -dt)), 0, 0, std::exp(Complex<double>(0, dt));
  CHECK((kraus.operators()[0] - std::sqrt(1.0 - p) * u).norm() < 1e-13);
  CHECK((kraus.operators()[1] - std::sqrt(p) * x).norm() < 1e-14);
  CHECK(kraus.completeness_defect() < 1e-12);
}

TEST_CASE("choi to kraus round trip preserves the channel") {
  for (std::uint64_t seed : {5u, 6u}) {
    Xoshiro256StarStar rng(seed);
    const Index d = 3;
    const KrausSet<double> kraus = random_cptp_kraus<double>(d, 4, rng);
    const ChoiMatrix<double> choi = choi_from_kraus(kraus);
    const KrausSet<double> recovered = kraus_from_choi(choi);
    const ChoiMatrix<double> round = choi_from_kraus(recovered.operators());
    CHECK((round.matrix() - choi.matrix()).norm() < 1e-10);
    CHECK(recovered.rank() <= 4);
    CHECK(recovered.completeness_defect() < 1e-9);
  }
}

TEST_CASE("kraus_from_choi is deterministic and descending") {
  Xoshiro256StarStar rng(99);
  const KrausSet<double> kraus = random_cptp_kraus<double>(2, 3, rng);
  const ChoiMatrix<double> choi = choi_from_kraus(kraus);
  const KrausSet<double> a = kraus_from_choi(choi);
  const KrausSet<double> b = kraus_from_choi(choi);
  REQUIRE(a.rank() == b.rank());
  for (Index i = 0; i < a.rank(); ++i)
    CHECK((a.operators()[i].array() == b.operators()[i].array()).all());
  for (Index i = 0; i + 1 < a.rank(); ++i)
    CHECK(a.operators()[i].norm() >= a.operators()[i + 1].norm() - 1e-12);
}

TEST_CASE("assembled generator acts as the master equation") {
  for (std::uint64_t seed : {1u, 8u}) {
    Xoshiro256StarStar rng(seed);
    const Index d = 3;
    const LindbladModel<double> model = random_lindblad_model<double>(d, 2, 1.5, 0.05, rng);
    const Generator<double> g = generator_from_model(model);
    for (int rep = 0; rep < 3; ++rep) {
      const DensityMatrix<double> rho = random_density(d, seed * 100 + rep);
      const ComplexMatrixXd via_gen = apply_generator(g, rho.matrix());
      const ComplexMatrixXd direct = gksl_action(model, rho.matrix());
      CHECK((via_gen - direct).norm() < 1e-12);
      // The generator annihilates the trace.
      CHECK(std::abs(via_gen.trace()) < 1e-12);
    }
  }
}

TEST_CASE("finite-difference generator converges linearly in dt") {
  Xoshiro256StarStar rng(13);
  const Index d = 3;
  HermitianOperator<double> h = random_hermitian<double>(d, rng, true, true);
  std::vector<ComplexMatrixXd> ls;
  ComplexMatrixXd l = ginibre<double>(d, d, rng);
  l /= l.norm();
  ls.push_back(l);
  const double rate = 1.0;

  std::vector<double> errors;
  for (double dt : {1e-2, 5e-3, 2.5e-3}) {
    const LindbladModel<double> model(h, ls, rate, dt);
    const Generator<double> truth = generator_from_model(model);
    const Superoperator<double> e = superop_from_kraus(build_discrete_lindblad(model));
    const Generator<double> fd = finite_difference_generator(e, dt);
    errors.push_back((fd.matrix() - truth.matrix()).norm());
  }
  // First-order scheme: halving dt halves the error.
  CHECK(errors[0] / errors[1] == doctest::Approx(2.0).epsilon(0.15));
  CHECK(errors[1] / errors[2] == doctest::Approx(2.0).epsilon(0.15));
  CHECK(errors[2] < 1e-2);
}

TEST_CASE("generator construction rejects a mismatched K operator") {
  Xoshiro256StarStar rng(21);
  const Index d = 2;
  HermitianOperator<double> h = random_hermitian<double>(d, rng, true, true);
  ComplexMatrixXd l = ginibre<double>(d, d, rng);
  l /= l.norm();
  const ComplexMatrixXd s = l.adjoint() * l;
  const HermitianOperator<double> k_good(ComplexMatrixXd(-0.5 * s));
  const HermitianOperator<double> k_bad(ComplexMatrixXd(-0.7 * s));
  CHECK_NOTHROW(assemble_generator(h, {l}, k_good, 1.0));
  CHECK_THROWS_AS(assemble_generator(h, {l}, k_bad, 1.0), std::invalid_argument);
}

TEST_CASE("model validation rejects unphysical parameters") {
  ComplexMatrixXd z(2, 2);
  z << 1, 0, 0, -1;
  HermitianOperator<double> h(z);
  ComplexMatrixXd x(2, 2);
  x << 0, 1, 1, 0;

  CHECK_THROWS_AS(LindbladModel<double>(h, {x}, -1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(LindbladModel<double>(h, {x}, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(LindbladModel<double>(h, {x}, 1.0, 1.0), std::invalid_argument);  // p = 1
  // p * lambda_max(sum L^dagger L) > 1 leaves no no-jump weight.
  const ComplexMatrixXd big = 3.0 * x;
  CHECK_THROWS_AS(LindbladModel<double>(h, {big}, 5.0, 0.1), std::invalid_argument);
}

TEST_CASE("validated channel wrappers reject structural violations") {
  // Non-trace-preserving superoperator.
  ComplexMatrixXd e = ComplexMatrixXd::Identity(4, 4);
  e(0, 0) = 1.5;
  CHECK_THROWS_AS((void)Superoperator<double>(e), std::invalid_argument);
  CHECK_NOTHROW(Superoperator<double>::identity(2));

  // Non-PSD Choi.
  ComplexMatrixXd c = ComplexMatrixXd::Identity(4, 4);
  c(3, 3) = -0.2;
  CHECK_THROWS_AS((void)ChoiMatrix<double>(c), std::invalid_argument);

  // Incomplete Kraus set.
  ComplexMatrixXd half = 0.5 * ComplexMatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(KrausSet<double>({half}), std::invalid_argument);

  // Non-square operator list.
  CHECK_THROWS_AS(KrausSet<double>({ComplexMatrixXd::Zero(2, 3)}), std::invalid_argument);
}

TEST_CASE("random_cptp_kraus produces complete sets of the requested rank") {
  for (Index rank : {1, 3, 4}) {
    Xoshiro256StarStar rng(60 + static_cast<std::uint64_t>(rank));
    const KrausSet<double> kraus = random_cptp_kraus<double>(2, rank, rng);
    CHECK(kraus.rank() == rank);
    CHECK(kraus.completeness_defect() < 1e-10);
  }
  Xoshiro256StarStar rng(1);
  CHECK_THROWS_AS(random_cptp_kraus<double>(2, 0, rng), std::invalid_argument);
  CHECK_THROWS_AS(random_cptp_kraus<double>(2, 5, rng), std::invalid_argument);
}

TEST_CASE("fix_global_phase anchors the trace or the largest entry") {
  ComplexMatrixXd m(2, 2);
  m << Complex<double>(0, 1), 0, 0, Complex<double>(0, 2);
  const ComplexMatrixXd fixed = fix_global_phase(m);
  CHECK(fixed.trace().imag() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(fixed.trace().real() > 0);
  // Traceless input: the largest-magnitude entry becomes real positive.
  ComplexMatrixXd t(2, 2);
  t << Complex<double>(0, 3), 0, 0, Complex<double>(0, -3);
  const ComplexMatrixXd fixed_t = fix_global_phase(t);
  CHECK(std::abs(fixed_t(0, 0).imag()) < 1e-14);
  CHECK(fixed_t(0, 0).real() == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("discrete step matches exp(dt G) to second order") {
  // The no-jump expansion cancels the p/2 terms exactly, so one discrete
  // step deviates from the exponential of the generator at O(dt^2).
  Xoshiro256StarStar rng(31);
  const Index d = 2;
  const LindbladModel<double> coarse = random_lindblad_model<double>(d, 1, 1.0, 2e-2, rng);
  std::vector<double> errors;
  for (double dt : {2e-2, 1e-2}) {
    const LindbladModel<double> model(coarse.hamiltonian(), coarse.lindblads(), coarse.rate(), dt);
    const Superoperator<double> e = superop_from_kraus(build_discrete_lindblad(model));
    const Generator<double> g = generator_from_model(model);
    const ComplexMatrixXd expm = (dt * g.matrix()).exp();
    errors.push_back((e.matrix() - expm).norm());
  }
  // Halving dt shrinks the mismatch by about 4.
  CHECK(errors[0] / errors[1] == doctest::Approx(4.0).epsilon(0.25));
}
