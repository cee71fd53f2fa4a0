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
// Representations of quantum channels and Markovian generators.
//
// Conventions, used consistently everywhere:
//  - vec is row-major: vec(rho)[i*d + j] = rho_ij.
//  - A superoperator E acts by vec(rho_out) = E vec(rho_in), i.e.
//    rho_out_ij = sum_kl E[(i*d+j),(k*d+l)] rho_kl.
//  - The Choi matrix is the reshuffle C[(i*d+k),(j*d+l)] = E[(i*d+j),(k*d+l)].
//    It is kept unnormalized: Tr C = d for a trace-preserving map, and the
//    partial trace over the FIRST (output) factor equals I_d.
//  - For a Kraus operator M, vec_rowmajor(M) is the Choi eigenvector
//    direction: C = sum_alpha vec(M_alpha) vec(M_alpha)^dagger.

#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qshadow/dense.hpp"
#include "qshadow/linalg.hpp"
#include "qshadow/rng.hpp"
#include "qshadow/states.hpp"

namespace qshadow {

namespace detail {

inline Index hilbert_dim_of(Index super_dim, const std::string& who) {
  const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(super_dim))));
  require(d * d == super_dim, who + ": matrix dimension " + std::to_string(super_dim) +
                                  " is not a perfect square");
  return d;
}

// Defect of the Hermiticity-preservation symmetry E[(ij),(kl)] = conj(E[(ji),(lk)]).
template <typename Scalar>
Scalar hp_defect(const ComplexMatrix<Scalar>& e, Index d) {
  Scalar acc = 0;
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      for (Index k = 0; k < d; ++k)
        for (Index l = 0; l < d; ++l) {
          const Complex<Scalar> diff =
              e(i * d + j, k * d + l) - std::conj(e(j * d + i, l * d + k));
          acc += std::norm(diff);
        }
  return std::sqrt(acc);
}

// Defect of trace preservation: sum_i E[(ii),(kl)] = delta_kl.
template <typename Scalar>
Scalar tp_defect(const ComplexMatrix<Scalar>& e, Index d) {
  Scalar acc = 0;
  for (Index k = 0; k < d; ++k)
    for (Index l = 0; l < d; ++l) {
      Complex<Scalar> s = 0;
      for (Index i = 0; i < d; ++i) s += e(i * d + i, k * d + l);
      if (k == l) s -= Complex<Scalar>(1);
      acc += std::norm(s);
    }
  return std::sqrt(acc);
}

// Defect of trace annihilation: sum_i G[(ii),(kl)] = 0.
template <typename Scalar>
Scalar trace_annihilation_defect(const ComplexMatrix<Scalar>& g, Index d) {
  Scalar acc = 0;
  for (Index k = 0; k < d; ++k)
    for (Index l = 0; l < d; ++l) {
      Complex<Scalar> s = 0;
      for (Index i = 0; i < d; ++i) s += g(i * d + i, k * d + l);
      acc += std::norm(s);
    }
  return std::sqrt(acc);
}

}  // namespace detail

// Linear map on operators in its d^2 x d^2 matrix representation. The
// validating constructor requires trace preservation and Hermiticity
// preservation; estimates from data should use unchecked().
template <typename Scalar = double>
class Superoperator {
 public:
  explicit Superoperator(ComplexMatrix<Scalar> m, Scalar tol = Scalar(kChannelTol))
      : mat_(std::move(m)), validated_(true) {
    detail::require_square(mat_.rows(), mat_.cols(), "Superoperator");
    dim_ = detail::hilbert_dim_of(mat_.rows(), "Superoperator");
    detail::require(all_finite(mat_), "Superoperator: non-finite entries");
    const Scalar tp = detail::tp_defect(mat_, dim_);
    detail::require(tp <= tol, "Superoperator: trace-preservation defect " + std::to_string(tp) +
                                   " exceeds " + std::to_string(tol));
    const Scalar hp = detail::hp_defect(mat_, dim_);
    detail::require(hp <= tol, "Superoperator: hermiticity-preservation defect " +
                                   std::to_string(hp) + " exceeds " + std::to_string(tol));
  }

  static Superoperator unchecked(ComplexMatrix<Scalar> m) {
    Superoperator e;
    e.mat_ = std::move(m);
    detail::require_square(e.mat_.rows(), e.mat_.cols(), "Superoperator");
    e.dim_ = detail::hilbert_dim_of(e.mat_.rows(), "Superoperator");
    e.validated_ = false;
    return e;
  }

  static Superoperator identity(Index d) {
    return Superoperator(ComplexMatrix<Scalar>::Identity(d * d, d * d));
  }

  const ComplexMatrix<Scalar>& matrix() const { return mat_; }
  Index dim() const { return dim_; }
  Index super_dim() const { return mat_.rows(); }
  bool validated() const { return validated_; }

 private:
  Superoperator() = default;
  ComplexMatrix<Scalar> mat_;
  Index dim_ = 0;
  bool validated_ = false;
};

// Unnormalized Choi matrix (trace d for a TP map). The validating
// constructor requires hermiticity and positive semidefiniteness.
template <typename Scalar = double>
class ChoiMatrix {
 public:
  explicit ChoiMatrix(ComplexMatrix<Scalar> m, Scalar tol = Scalar(kChannelTol))
      : mat_(std::move(m)), validated_(true) {
    detail::require_square(mat_.rows(), mat_.cols(), "ChoiMatrix");
    dim_ = detail::hilbert_dim_of(mat_.rows(), "ChoiMatrix");
    detail::require(all_finite(mat_), "ChoiMatrix: non-finite entries");
    const Scalar herm = hermiticity_defect(mat_);
    detail::require(herm <= tol, "ChoiMatrix: hermiticity defect " + std::to_string(herm) +
                                     " exceeds " + std::to_string(tol));
    const HermitianEig<Scalar> eig = hermitian_eig(mat_, tol);
    const Scalar lambda_min = eig.eigenvalues[0];
    detail::require(lambda_min >= -tol, "ChoiMatrix: negative eigenvalue " +
                                            std::to_string(lambda_min) + "; map is not CP");
  }

  // For estimated (noisy, possibly indefinite) Choi matrices.
  static ChoiMatrix unchecked(ComplexMatrix<Scalar> m) {
    ChoiMatrix c;
    c.mat_ = std::move(m);
    detail::require_square(c.mat_.rows(), c.mat_.cols(), "ChoiMatrix");
    c.dim_ = detail::hilbert_dim_of(c.mat_.rows(), "ChoiMatrix");
    c.validated_ = false;
    return c;
  }

  const ComplexMatrix<Scalar>& matrix() const { return mat_; }
  Index dim() const { return dim_; }
  bool validated() const { return validated_; }

  // Partial trace over the output (first) factor; equals I_d iff TP.
  ComplexMatrix<Scalar> input_marginal() const {
    return partial_trace(mat_, Subsystem::first);
  }

  Scalar tp_defect() const {
    return (input_marginal() - ComplexMatrix<Scalar>::Identity(dim_, dim_)).norm();
  }

 private:
  ChoiMatrix() = default;
  ComplexMatrix<Scalar> mat_;
  Index dim_ = 0;
  bool validated_ = false;
};

// Kraus representation; the validating constructor requires the completeness
// relation sum M^dagger M = I.
template <typename Scalar = double>
class KrausSet {
 public:
  explicit KrausSet(std::vector<ComplexMatrix<Scalar>> ops, Scalar tol = Scalar(kChannelTol))
      : ops_(std::move(ops)) {
    detail::require(!ops_.empty(), "KrausSet: empty operator list");
    dim_ = ops_.front().rows();
    for (const auto& op : ops_) {
      detail::require_square(op.rows(), op.cols(), "KrausSet");
      detail::require(op.rows() == dim_, "KrausSet: inconsistent operator dimensions");
      detail::require(all_finite(op), "KrausSet: non-finite entries");
    }
    const Scalar defect = completeness_defect();
    detail::require(defect <= tol, "KrausSet: completeness defect " + std::to_string(defect) +
                                       " exceeds " + std::to_string(tol));
  }

  static KrausSet unchecked(std::vector<ComplexMatrix<Scalar>> ops) {
    KrausSet k;
    k.ops_ = std::move(ops);
    detail::require(!k.ops_.empty(), "KrausSet: empty operator list");
    k.dim_ = k.ops_.front().rows();
    return k;
  }

  const std::vector<ComplexMatrix<Scalar>>& operators() const { return ops_; }
  Index dim() const { return dim_; }
  Index rank() const { return static_cast<Index>(ops_.size()); }

  // Frobenius norm of sum M^dagger M - I.
  Scalar completeness_defect() const {
    ComplexMatrix<Scalar> s = ComplexMatrix<Scalar>::Zero(dim_, dim_);
    for (const auto& op : ops_) s.noalias() += op.adjoint() * op;
    return (s - ComplexMatrix<Scalar>::Identity(dim_, dim_)).norm();
  }

 private:
  KrausSet() = default;
  std::vector<ComplexMatrix<Scalar>> ops_;
  Index dim_ = 0;
};

// Parameters of the dissipative model: Hamiltonian H, jump operators L_alpha
// with a single overall rate, and the step size dt of the discretized
// evolution. p = rate * dt is the per-step jump probability.
template <typename Scalar = double>
class LindbladModel {
 public:
  LindbladModel(HermitianOperator<Scalar> hamiltonian,
                std::vector<ComplexMatrix<Scalar>> lindblads, Scalar rate, Scalar dt)
      : hamiltonian_(std::move(hamiltonian)),
        lindblads_(std::move(lindblads)),
        rate_(rate),
        dt_(dt) {
    detail::require(rate_ >= Scalar(0), "LindbladModel: rate must be nonnegative");
    detail::require(dt_ > Scalar(0), "LindbladModel: dt must be positive");
    const Scalar p = rate_ * dt_;
    detail::require(p < Scalar(1),
                    "LindbladModel: p = rate*dt = " + std::to_string(p) + " must be < 1");
    const Index d = hamiltonian_.dim();
    for (const auto& l : lindblads_) {
      detail::require_square(l.rows(), l.cols(), "LindbladModel");
      detail::require(l.rows() == d, "LindbladModel: jump operator dimension mismatch");
      detail::require(all_finite(l), "LindbladModel: non-finite jump operator");
    }
    if (p > Scalar(0) && !lindblads_.empty()) {
      const HermitianEig<Scalar> eig = hermitian_eig(jump_sum(), Scalar(kOperatorTol));
      const Scalar top = eig.eigenvalues[eig.eigenvalues.size() - 1];
      detail::require(p * top <= Scalar(1) + Scalar(1e-12),
                      "LindbladModel: I - p * sum L^dagger L is not PSD (p*max_eig = " +
                          std::to_string(p * top) + "); reduce rate or dt");
    }
  }

  const HermitianOperator<Scalar>& hamiltonian() const { return hamiltonian_; }
  const std::vector<ComplexMatrix<Scalar>>& lindblads() const { return lindblads_; }
  Scalar rate() const { return rate_; }
  Scalar dt() const { return dt_; }
  Scalar p() const { return rate_ * dt_; }
  Index dim() const { return hamiltonian_.dim(); }

  // sum_alpha L^dagger L.
  ComplexMatrix<Scalar> jump_sum() const {
    ComplexMatrix<Scalar> s = ComplexMatrix<Scalar>::Zero(dim(), dim());
    for (const auto& l : lindblads_) s.noalias() += l.adjoint() * l;
    return s;
  }

  // K = -(1/2) sum_alpha L^dagger L, the anti-Hermitian-part generator.
  HermitianOperator<Scalar> k_operator() const {
    return HermitianOperator<Scalar>(ComplexMatrix<Scalar>(-jump_sum() / Scalar(2)));
  }

 private:
  HermitianOperator<Scalar> hamiltonian_;
  std::vector<ComplexMatrix<Scalar>> lindblads_;
  Scalar rate_;
  Scalar dt_;
};

// Markovian generator in its d^2 x d^2 matrix representation. Validated
// invariants: annihilates the trace and preserves hermiticity.
template <typename Scalar = double>
class Generator {
 public:
  explicit Generator(ComplexMatrix<Scalar> m, Scalar tol = Scalar(kChannelTol))
      : mat_(std::move(m)) {
    detail::require_square(mat_.rows(), mat_.cols(), "Generator");
    dim_ = detail::hilbert_dim_of(mat_.rows(), "Generator");
    detail::require(all_finite(mat_), "Generator: non-finite entries");
    const Scalar scale = std::max(Scalar(1), mat_.norm());
    const Scalar ta = detail::trace_annihilation_defect(mat_, dim_);
    detail::require(ta <= tol * scale, "Generator: trace-annihilation defect " +
                                           std::to_string(ta) + " exceeds " +
                                           std::to_string(tol * scale));
    const Scalar hp = detail::hp_defect(mat_, dim_);
    detail::require(hp <= tol * scale, "Generator: hermiticity-preservation defect " +
                                           std::to_string(hp) + " exceeds " +
                                           std::to_string(tol * scale));
  }

  static Generator unchecked(ComplexMatrix<Scalar> m) {
    Generator g;
    g.mat_ = std::move(m);
    detail::require_square(g.mat_.rows(), g.mat_.cols(), "Generator");
    g.dim_ = detail::hilbert_dim_of(g.mat_.rows(), "Generator");
    return g;
  }

  const ComplexMatrix<Scalar>& matrix() const { return mat_; }
  Index dim() const { return dim_; }

 private:
  Generator() = default;
  ComplexMatrix<Scalar> mat_;
  Index dim_ = 0;
};

// --- Application -----------------------------------------------------------

// rho_out = unvec(E vec(rho)) for a raw superoperator matrix.
template <typename Scalar>
ComplexMatrix<Scalar> apply_superop_matrix(const ComplexMatrix<Scalar>& e,
                                           const ComplexMatrix<Scalar>& rho) {
  const Index d = detail::hilbert_dim_of(e.rows(), "apply_superop_matrix");
  detail::require(rho.rows() == d && rho.cols() == d,
                  "apply_superop_matrix: state dimension mismatch");
  return unvec_rowmajor(ComplexVector<Scalar>(e * vec_rowmajor(rho)), d, d);
}

// Channel application on a state; the result of a validated channel on a
// valid state is again a valid state.
template <typename Scalar>
DensityMatrix<Scalar> apply_superop(const Superoperator<Scalar>& e,
                                    const DensityMatrix<Scalar>& rho) {
  ComplexMatrix<Scalar> out = apply_superop_matrix(e.matrix(), rho.matrix());
  if (!e.validated()) return DensityMatrix<Scalar>::unchecked(std::move(out));
  return DensityMatrix<Scalar>(std::move(out), Scalar(kChannelTol));
}

// sum_alpha M rho M^dagger.
template <typename Scalar>
ComplexMatrix<Scalar> apply_kraus(const KrausSet<Scalar>& kraus,
                                  const ComplexMatrix<Scalar>& rho) {
  detail::require(rho.rows() == kraus.dim() && rho.cols() == kraus.dim(),
                  "apply_kraus: state dimension mismatch");
  ComplexMatrix<Scalar> out = ComplexMatrix<Scalar>::Zero(kraus.dim(), kraus.dim());
  for (const auto& op : kraus.operators()) out.noalias() += op * rho * op.adjoint();
  return out;
}

// d rho / dt = unvec(G vec(rho)).
template <typename Scalar>
ComplexMatrix<Scalar> apply_generator(const Generator<Scalar>& g,
                                      const ComplexMatrix<Scalar>& rho) {
  return apply_superop_matrix(g.matrix(), rho);
}

// --- Reshuffling ------------------------------------------------------------

// Superoperator -> Choi, a bit-exact index permutation.
template <typename Scalar>
ChoiMatrix<Scalar> reshuffle(const Superoperator<Scalar>& e) {
  const Index d = e.dim();
  ComplexMatrix<Scalar> c(d * d, d * d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      for (Index k = 0; k < d; ++k)
        for (Index l = 0; l < d; ++l) c(i * d + k, j * d + l) = e.matrix()(i * d + j, k * d + l);
  return ChoiMatrix<Scalar>::unchecked(std::move(c));
}

// Choi -> Superoperator, the exact inverse permutation.
template <typename Scalar>
Superoperator<Scalar> reshuffle_back(const ChoiMatrix<Scalar>& c) {
  const Index d = c.dim();
  ComplexMatrix<Scalar> e(d * d, d * d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      for (Index k = 0; k < d; ++k)
        for (Index l = 0; l < d; ++l) e(i * d + j, k * d + l) = c.matrix()(i * d + k, j * d + l);
  return Superoperator<Scalar>::unchecked(std::move(e));
}

// --- Conversions ------------------------------------------------------------

// Rotates a matrix by a global phase so that its trace is real nonnegative;
// if the trace is negligible (traceless jump operators), the largest-modulus
// entry is made real positive instead. Fixes the U(1) gauge of Choi
// eigenvectors deterministically.
template <typename Scalar>
ComplexMatrix<Scalar> fix_global_phase(ComplexMatrix<Scalar> m,
                                       Scalar trace_tol = Scalar(1e-6)) {
  const Complex<Scalar> tr = m.trace();
  Complex<Scalar> anchor = tr;
  if (std::abs(tr) < trace_tol * static_cast<Scalar>(m.rows())) {
    Index r = 0, c = 0;
    m.cwiseAbs().maxCoeff(&r, &c);
    anchor = m(r, c);
  }
  const Scalar mag = std::abs(anchor);
  if (mag > Scalar(0)) m *= std::conj(anchor) / mag;
  return m;
}

// C = sum vec(M) vec(M)^dagger. Hermitian PSD by construction.
template <typename Scalar>
ChoiMatrix<Scalar> choi_from_kraus(const std::vector<ComplexMatrix<Scalar>>& ops) {
  detail::require(!ops.empty(), "choi_from_kraus: empty operator list");
  const Index d = ops.front().rows();
  ComplexMatrix<Scalar> c = ComplexMatrix<Scalar>::Zero(d * d, d * d);
  for (const auto& op : ops) {
    detail::require(op.rows() == d && op.cols() == d, "choi_from_kraus: dimension mismatch");
    const ComplexVector<Scalar> v = vec_rowmajor(op);
    c.noalias() += v * v.adjoint();
  }
  return ChoiMatrix<Scalar>(std::move(c));
}

template <typename Scalar>
ChoiMatrix<Scalar> choi_from_kraus(const KrausSet<Scalar>& kraus) {
  return choi_from_kraus(kraus.operators());
}

// Eigendecomposition of the Choi matrix into Kraus operators
// M_alpha = sqrt(lambda_alpha) unvec(mu_alpha), descending by eigenvalue.
// Eigenvalues <= rank_cutoff are dropped; eigenvalues below -tol are an
// error (the map is not CP at tolerance). Completeness of the result is the
// caller's concern: it holds iff the input is TP.
template <typename Scalar>
KrausSet<Scalar> kraus_from_choi(const ChoiMatrix<Scalar>& choi,
                                 Scalar rank_cutoff = Scalar(1e-10),
                                 Scalar tol = Scalar(kChannelTol)) {
  const Index d = choi.dim();
  const HermitianEig<Scalar> eig = hermitian_eig(choi.matrix(), tol);
  const Index n = eig.eigenvalues.size();
  detail::require(eig.eigenvalues[0] >= -tol,
                  "kraus_from_choi: negative Choi eigenvalue " +
                      std::to_string(eig.eigenvalues[0]) + "; map is not CP");
  std::vector<ComplexMatrix<Scalar>> ops;
  for (Index i = n - 1; i >= 0; --i) {  // descending
    const Scalar lambda = eig.eigenvalues[i];
    if (lambda <= rank_cutoff) break;
    const ComplexVector<Scalar> v = std::sqrt(lambda) * eig.eigenvectors.col(i);
    ops.push_back(fix_global_phase(unvec_rowmajor(v, d, d)));
  }
  detail::require(!ops.empty(), "kraus_from_choi: no eigenvalue above the rank cutoff");
  return KrausSet<Scalar>::unchecked(std::move(ops));
}

// E = sum kron(M, conj(M)). Rejects incomplete sets.
template <typename Scalar>
Superoperator<Scalar> superop_from_kraus(const KrausSet<Scalar>& kraus,
                                         Scalar tol = Scalar(kChannelTol)) {
  const Scalar defect = kraus.completeness_defect();
  detail::require(defect <= tol, "superop_from_kraus: completeness defect " +
                                     std::to_string(defect) + " exceeds " + std::to_string(tol));
  const Index d = kraus.dim();
  ComplexMatrix<Scalar> e = ComplexMatrix<Scalar>::Zero(d * d, d * d);
  for (const auto& op : kraus.operators())
    e.noalias() += Eigen::kroneckerProduct(op, op.conjugate()).eval();
  return Superoperator<Scalar>(std::move(e), tol);
}

// --- Channel builders -------------------------------------------------------

// One step of the discretized dissipative evolution:
//   rho -> (1-p) U M rho M U^dagger-style no-jump branch + p jump branch,
// realized by the Kraus set { sqrt(1-p) U M } u { sqrt(p) L_alpha } with
// U = exp(-i dt H) and M = sqrt((I - p sum L^dagger L) / (1-p)).
template <typename Scalar>
KrausSet<Scalar> build_discrete_lindblad(const LindbladModel<Scalar>& model) {
  const Index d = model.dim();
  const Scalar p = model.p();
  const HermitianEig<Scalar> eig = hermitian_eig(model.hamiltonian().matrix());
  ComplexVector<Scalar> phases(d);
  for (Index i = 0; i < d; ++i)
    phases[i] = std::exp(Complex<Scalar>(0, -model.dt() * eig.eigenvalues[i]));
  const ComplexMatrix<Scalar> u =
      eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();

  std::vector<ComplexMatrix<Scalar>> ops;
  if (p == Scalar(0) || model.lindblads().empty()) {
    ops.push_back(u);
    return KrausSet<Scalar>(std::move(ops));
  }
  const ComplexMatrix<Scalar> floor_arg =
      (ComplexMatrix<Scalar>::Identity(d, d) - p * model.jump_sum()) / (Scalar(1) - p);
  const ComplexMatrix<Scalar> m = psd_sqrt(floor_arg, Scalar(1e-9));
  ops.push_back(std::sqrt(Scalar(1) - p) * (u * m));
  for (const auto& l : model.lindblads()) ops.push_back(std::sqrt(p) * l);
  return KrausSet<Scalar>(std::move(ops));
}

// Mixed-unitary benchmark channel on n qubits:
//   rho -> (1-p) U rho U^dagger + (p/n) sum_i X_i rho X_i
// with U = exp(-i theta Z_1) (Z on the first qubit) and X_i the bit-flip on
// qubit i. All Kraus directions are mutually trace-orthogonal.
template <typename Scalar = double>
KrausSet<Scalar> build_pauli_mixed_channel(Index n_qubits, Scalar p, Scalar theta) {
  detail::require(n_qubits >= 1, "build_pauli_mixed_channel: need at least one qubit");
  detail::require(p > Scalar(0) && p < Scalar(1),
                  "build_pauli_mixed_channel: p must be in (0,1)");
  const Index d = Index(1) << n_qubits;
  // exp(-i theta Z_1) is diagonal with phase exp(-i theta s), s = +-1 the
  // Z-eigenvalue of the first qubit.
  ComplexMatrix<Scalar> u = ComplexMatrix<Scalar>::Zero(d, d);
  for (Index b = 0; b < d; ++b) {
    const Scalar s = ((b >> (n_qubits - 1)) & 1) ? Scalar(-1) : Scalar(1);
    u(b, b) = std::exp(Complex<Scalar>(0, -theta * s));
  }
  std::vector<ComplexMatrix<Scalar>> ops;
  ops.push_back(std::sqrt(Scalar(1) - p) * u);
  const Scalar w = std::sqrt(p / static_cast<Scalar>(n_qubits));
  for (Index q = 0; q < n_qubits; ++q) {
    // X on qubit q flips bit (n_qubits - 1 - q) of the basis index.
    const Index bit = Index(1) << (n_qubits - 1 - q);
    ComplexMatrix<Scalar> x = ComplexMatrix<Scalar>::Zero(d, d);
    for (Index b = 0; b < d; ++b) x(b ^ bit, b) = Complex<Scalar>(1);
    ops.push_back(w * x);
  }
  return KrausSet<Scalar>(std::move(ops));
}

// --- Generators ---------------------------------------------------------------

// G = -i(kron(H,I) - kron(I, conj(H)))
//     + rate * (kron(K,I) + kron(I, conj(K)) + sum kron(L, conj(L))),
// so that unvec(G vec(rho)) = -i[H, rho] + rate*(K rho + rho K + sum L rho L^dagger).
// Requires K = -(1/2) sum L^dagger L for the trace-annihilation invariant.
template <typename Scalar>
Generator<Scalar> assemble_generator(const HermitianOperator<Scalar>& hamiltonian,
                                     const std::vector<ComplexMatrix<Scalar>>& lindblads,
                                     const HermitianOperator<Scalar>& k_op, Scalar rate) {
  const Index d = hamiltonian.dim();
  detail::require(k_op.dim() == d, "assemble_generator: K dimension mismatch");
  const ComplexMatrix<Scalar> id = ComplexMatrix<Scalar>::Identity(d, d);
  const Complex<Scalar> minus_i(0, -1);
  ComplexMatrix<Scalar> g =
      minus_i * (Eigen::kroneckerProduct(hamiltonian.matrix(), id).eval() -
                 Eigen::kroneckerProduct(id, hamiltonian.matrix().conjugate()).eval());
  if (rate > Scalar(0)) {
    g += rate * (Eigen::kroneckerProduct(k_op.matrix(), id).eval() +
                 Eigen::kroneckerProduct(id, k_op.matrix().conjugate()).eval());
    for (const auto& l : lindblads) {
      detail::require(l.rows() == d && l.cols() == d,
                      "assemble_generator: jump operator dimension mismatch");
      g += rate * Eigen::kroneckerProduct(l, l.conjugate()).eval();
    }
  }
  return Generator<Scalar>(std::move(g));
}

template <typename Scalar>
Generator<Scalar> generator_from_model(const LindbladModel<Scalar>& model) {
  return assemble_generator(model.hamiltonian(), model.lindblads(), model.k_operator(),
                            model.rate());
}

// First-order finite-difference generator (E - I)/dt of a discrete channel.
template <typename Scalar>
Generator<Scalar> finite_difference_generator(const Superoperator<Scalar>& e, Scalar dt) {
  detail::require(dt > Scalar(0), "finite_difference_generator: dt must be positive");
  const Index n = e.super_dim();
  ComplexMatrix<Scalar> g = (e.matrix() - ComplexMatrix<Scalar>::Identity(n, n)) / dt;
  return Generator<Scalar>(std::move(g));
}

// --- Random instances ---------------------------------------------------------

// Random rank-r CPTP channel: Ginibre blocks orthonormalized against the
// completeness constraint, M_i = A_i (sum A^dagger A)^{-1/2}.
template <typename Scalar = double, typename Urbg>
KrausSet<Scalar> random_cptp_kraus(Index d, Index rank, Urbg& rng) {
  detail::require(rank >= 1 && rank <= d * d, "random_cptp_kraus: rank out of range");
  std::vector<ComplexMatrix<Scalar>> blocks;
  ComplexMatrix<Scalar> s = ComplexMatrix<Scalar>::Zero(d, d);
  for (Index i = 0; i < rank; ++i) {
    blocks.push_back(ginibre<Scalar>(d, d, rng));
    s.noalias() += blocks.back().adjoint() * blocks.back();
  }
  const HermitianEig<Scalar> eig = hermitian_eig(s, Scalar(1e-8) * s.norm());
  detail::require(eig.eigenvalues[0] > Scalar(0), "random_cptp_kraus: singular Gram matrix");
  RealVector<Scalar> inv_roots(d);
  for (Index i = 0; i < d; ++i) inv_roots[i] = Scalar(1) / std::sqrt(eig.eigenvalues[i]);
  const ComplexMatrix<Scalar> s_inv_sqrt =
      eig.eigenvectors * inv_roots.asDiagonal() * eig.eigenvectors.adjoint();
  std::vector<ComplexMatrix<Scalar>> ops;
  for (const auto& a : blocks) ops.push_back(a * s_inv_sqrt);
  return KrausSet<Scalar>(std::move(ops));
}

// Random dissipative model: traceless unit-norm Hermitian H and jump
// operators normalized to unit Frobenius norm (their scale lives in `rate`).
template <typename Scalar = double, typename Urbg>
LindbladModel<Scalar> random_lindblad_model(Index d, Index n_lindblads, Scalar rate, Scalar dt,
                                            Urbg& rng) {
  HermitianOperator<Scalar> h = random_hermitian<Scalar>(d, rng, true, true);
  std::vector<ComplexMatrix<Scalar>> ls;
  for (Index i = 0; i < n_lindblads; ++i) {
    ComplexMatrix<Scalar> l = ginibre<Scalar>(d, d, rng);
    l /= l.norm();
    ls.push_back(std::move(l));
  }
  return LindbladModel<Scalar>(std::move(h), std::move(ls), rate, dt);
}

}  // namespace qshadow
