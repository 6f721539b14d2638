// Copyright 2026 The rement Authors
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

// Dense complex linear algebra and two-qubit state primitives.
//
// Qubit convention: basis index 0 is |g>, index 1 is |e>, and Z|g> = +|g>.
// Two-qubit kets are ordered |q0 q1> with q0 the most significant digit, so
// the computational basis reads (gg, ge, eg, ee). With this convention the
// odd Bell states (|ge> +- |eg>)/sqrt(2) have <ZZ> = -1.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rement {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using Ket = Eigen::VectorXcd;

inline constexpr double kStructuralTol = 1e-10;
inline constexpr double kRoundTripTol = 1e-12;
inline constexpr double kEigenFloor = -1e-9;

/// Raised when a numerical procedure cannot meet its accuracy contract.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::size_t product(std::span<const int> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         [](std::size_t acc, int d) { return acc * static_cast<std::size_t>(d); });
}

// Mixed-radix digits of a flat index, most significant subsystem first.
inline void digits_of(std::size_t index, std::span<const int> dims, std::span<int> out) {
  for (std::size_t k = dims.size(); k-- > 0;) {
    out[k] = static_cast<int>(index % static_cast<std::size_t>(dims[k]));
    index /= static_cast<std::size_t>(dims[k]);
  }
}

inline void check_targets(std::span<const int> dims, std::span<const int> targets) {
  if (targets.empty()) throw std::invalid_argument("subsystem index set is empty");
  std::vector<bool> seen(dims.size(), false);
  for (int t : targets) {
    if (t < 0 || static_cast<std::size_t>(t) >= dims.size())
      throw std::invalid_argument("subsystem index " + std::to_string(t) + " out of range");
    if (seen[static_cast<std::size_t>(t)])
      throw std::invalid_argument("subsystem index " + std::to_string(t) + " repeated");
    seen[static_cast<std::size_t>(t)] = true;
  }
}

inline bool all_finite(const ComplexMatrix& m) {
  return m.array().real().allFinite() && m.array().imag().allFinite();
}

}  // namespace detail

inline double hermiticity_error(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double unitarity_error(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

/// Kronecker product, first operand most significant.
inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Ket tensor(const Ket& a, const Ket& b) {
  Ket out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline Ket basis_ket(Eigen::Index dim, Eigen::Index index) {
  Ket k = Ket::Zero(dim);
  k(index) = 1.0;
  return k;
}

/// Lifts `op`, acting on the tensor product of `targets` (in the listed
/// order), to the full space described by `dims`.
inline ComplexMatrix embed_operator(const ComplexMatrix& op, std::span<const int> dims,
                                    std::span<const int> targets) {
  detail::check_targets(dims, targets);
  std::size_t sub = 1;
  for (int t : targets) sub *= static_cast<std::size_t>(dims[static_cast<std::size_t>(t)]);
  if (static_cast<std::size_t>(op.rows()) != sub || static_cast<std::size_t>(op.cols()) != sub)
    throw std::invalid_argument("operator dimension does not match target subsystems");

  const std::size_t total = detail::product(dims);
  const std::size_t n = dims.size();
  std::vector<bool> is_target(n, false);
  for (int t : targets) is_target[static_cast<std::size_t>(t)] = true;

  // Split each flat index into (target sub-index, spectator key).
  std::vector<std::size_t> sub_index(total), rest_key(total);
  std::vector<int> dig(n);
  for (std::size_t i = 0; i < total; ++i) {
    detail::digits_of(i, dims, dig);
    std::size_t s = 0;
    for (int t : targets) s = s * static_cast<std::size_t>(dims[static_cast<std::size_t>(t)]) +
                              static_cast<std::size_t>(dig[static_cast<std::size_t>(t)]);
    std::size_t r = 0;
    for (std::size_t k = 0; k < n; ++k)
      if (!is_target[k]) r = r * static_cast<std::size_t>(dims[k]) + static_cast<std::size_t>(dig[k]);
    sub_index[i] = s;
    rest_key[i] = r;
  }

  ComplexMatrix full = ComplexMatrix::Zero(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
  for (std::size_t i = 0; i < total; ++i)
    for (std::size_t j = 0; j < total; ++j)
      if (rest_key[i] == rest_key[j])
        full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            op(static_cast<Eigen::Index>(sub_index[i]), static_cast<Eigen::Index>(sub_index[j]));
  return full;
}

/// Partial trace keeping `keep` (output subsystems stay in ascending order).
inline ComplexMatrix partial_trace(const ComplexMatrix& rho, std::span<const int> dims,
                                   std::span<const int> keep) {
  detail::check_targets(dims, keep);
  const std::size_t total = detail::product(dims);
  if (static_cast<std::size_t>(rho.rows()) != total || rho.rows() != rho.cols())
    throw std::invalid_argument("matrix does not match subsystem dimensions");

  const std::size_t n = dims.size();
  std::vector<bool> kept(n, false);
  for (int k : keep) kept[static_cast<std::size_t>(k)] = true;

  std::size_t out_dim = 1;
  for (std::size_t k = 0; k < n; ++k)
    if (kept[k]) out_dim *= static_cast<std::size_t>(dims[k]);

  std::vector<std::size_t> kept_index(total), traced_key(total);
  std::vector<int> dig(n);
  for (std::size_t i = 0; i < total; ++i) {
    detail::digits_of(i, dims, dig);
    std::size_t a = 0, b = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto d = static_cast<std::size_t>(dims[k]);
      const auto v = static_cast<std::size_t>(dig[k]);
      if (kept[k]) a = a * d + v; else b = b * d + v;
    }
    kept_index[i] = a;
    traced_key[i] = b;
  }

  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(out_dim), static_cast<Eigen::Index>(out_dim));
  for (std::size_t i = 0; i < total; ++i)
    for (std::size_t j = 0; j < total; ++j)
      if (traced_key[i] == traced_key[j])
        out(static_cast<Eigen::Index>(kept_index[i]), static_cast<Eigen::Index>(kept_index[j])) +=
            rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return out;
}

/// exp(M) by scaling and squaring with a Pade approximant.
inline ComplexMatrix matrix_exponential(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix_exponential requires a square matrix");
  return m.exp();
}

/// A unit-trace, Hermitian, positive semidefinite operator over a composite
/// space. Construction validates; every instance is a physical state.
class DensityMatrix {
 public:
  DensityMatrix(std::vector<int> dims, ComplexMatrix matrix) : dims_(std::move(dims)), m_(std::move(matrix)) {
    validate();
  }

  static DensityMatrix from_ket(std::vector<int> dims, const Ket& psi) {
    const double norm = psi.norm();
    if (!(norm > 0)) throw std::invalid_argument("cannot build a state from a zero ket");
    const Ket unit = psi / norm;
    return DensityMatrix(std::move(dims), unit * unit.adjoint());
  }

  static DensityMatrix maximally_mixed(std::vector<int> dims) {
    const auto d = static_cast<Eigen::Index>(detail::product(dims));
    return DensityMatrix(std::move(dims), ComplexMatrix::Identity(d, d) / static_cast<double>(d));
  }

  /// Normalizes a positive operator (e.g. an unnormalized measurement branch).
  static DensityMatrix normalized(std::vector<int> dims, const ComplexMatrix& m) {
    const double tr = m.trace().real();
    if (!(tr > 0)) throw std::invalid_argument("cannot normalize an operator with non-positive trace");
    ComplexMatrix h = 0.5 * (m + m.adjoint()) / tr;
    return DensityMatrix(std::move(dims), std::move(h));
  }

  const std::vector<int>& dims() const noexcept { return dims_; }
  const ComplexMatrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }

  double purity() const { return (m_ * m_).trace().real(); }

  double expectation(const ComplexMatrix& op) const { return (m_ * op).trace().real(); }

 private:
  void validate() const {
    if (dims_.empty()) throw std::invalid_argument("density matrix needs at least one subsystem");
    for (int d : dims_)
      if (d < 1) throw std::invalid_argument("subsystem dimension must be positive");
    const auto total = static_cast<Eigen::Index>(detail::product(dims_));
    if (m_.rows() != total || m_.cols() != total)
      throw std::invalid_argument("density matrix shape does not match dims");
    if (!detail::all_finite(m_)) throw std::invalid_argument("density matrix has non-finite entries");
    if (hermiticity_error(m_) > kStructuralTol) throw std::invalid_argument("density matrix is not Hermitian");
    if (std::abs(m_.trace() - Complex(1.0)) > kStructuralTol)
      throw std::invalid_argument("density matrix trace differs from 1");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < kEigenFloor)
      throw std::invalid_argument("density matrix has a negative eigenvalue");
  }

  std::vector<int> dims_;
  ComplexMatrix m_;
};

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  std::vector<int> dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return DensityMatrix(std::move(dims), tensor(a.matrix(), b.matrix()));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  ComplexMatrix reduced = partial_trace(rho.matrix(), rho.dims(), keep);
  std::vector<int> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> dims;
  for (int k : sorted) dims.push_back(rho.dims()[static_cast<std::size_t>(k)]);
  return DensityMatrix(std::move(dims), 0.5 * (reduced + reduced.adjoint()));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep) {
  return partial_trace(rho, std::span<const int>(keep.begin(), keep.size()));
}

/// U rho U^dagger with U acting on `targets`.
inline DensityMatrix apply_unitary(const DensityMatrix& rho, const ComplexMatrix& u, std::span<const int> targets) {
  if (unitarity_error(u) > kStructuralTol) throw std::invalid_argument("operator is not unitary");
  const ComplexMatrix full = embed_operator(u, rho.dims(), targets);
  ComplexMatrix out = full * rho.matrix() * full.adjoint();
  return DensityMatrix(rho.dims(), 0.5 * (out + out.adjoint()));
}

inline DensityMatrix apply_unitary(const DensityMatrix& rho, const ComplexMatrix& u, std::initializer_list<int> targets) {
  return apply_unitary(rho, u, std::span<const int>(targets.begin(), targets.size()));
}

// ---------------------------------------------------------------------------
// Pauli algebra

namespace pauli {

inline ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }

inline ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

inline ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

/// Index 0..3 -> I, X, Y, Z.
inline ComplexMatrix by_index(int k) {
  switch (k) {
    case 0: return identity();
    case 1: return x();
    case 2: return y();
    case 3: return z();
    default: throw std::out_of_range("Pauli index must be in 0..3");
  }
}

inline constexpr std::array<char, 4> kLetters{'I', 'X', 'Y', 'Z'};

/// exp(-i angle P / 2) for P = X.
inline ComplexMatrix rotation_x(double angle) {
  return std::cos(angle / 2) * identity() - Complex(0, 1) * std::sin(angle / 2) * x();
}

/// exp(-i angle P / 2) for P = Y; rotation_y(pi) maps |g> -> |e>, |e> -> -|g>.
inline ComplexMatrix rotation_y(double angle) {
  return std::cos(angle / 2) * identity() - Complex(0, 1) * std::sin(angle / 2) * y();
}

}  // namespace pauli

/// The 16 two-qubit expectation values <P (x) Q>, index 4*p + q with
/// p, q in {I, X, Y, Z}. `sigma` holds standard errors when estimated from
/// finite data.
struct PauliVector {
  std::array<double, 16> components{};
  std::optional<std::array<double, 16>> sigma;

  static std::string label(std::size_t index) {
    return {pauli::kLetters.at(index / 4), pauli::kLetters.at(index % 4)};
  }

  static std::size_t index_of(std::string_view label) {
    if (label.size() != 2) throw std::invalid_argument("Pauli label must have two letters");
    auto find = [](char c) -> std::size_t {
      for (std::size_t k = 0; k < 4; ++k)
        if (pauli::kLetters[k] == c) return k;
      throw std::invalid_argument(std::string("unknown Pauli letter '") + c + "'");
    };
    return 4 * find(label[0]) + find(label[1]);
  }

  double operator[](std::string_view label) const { return components[index_of(label)]; }
};

inline PauliVector pauli_decompose(const ComplexMatrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4) throw std::invalid_argument("Pauli decomposition needs a 4x4 matrix");
  PauliVector v;
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q)
      v.components[static_cast<std::size_t>(4 * p + q)] =
          (rho * tensor(pauli::by_index(p), pauli::by_index(q))).trace().real();
  return v;
}

inline PauliVector pauli_decompose(const DensityMatrix& rho) {
  if (rho.dims() != std::vector<int>{2, 2}) throw std::invalid_argument("Pauli decomposition needs a two-qubit state");
  return pauli_decompose(rho.matrix());
}

/// rho = 1/4 sum_PQ c_PQ P (x) Q. Not validated: finite-shot estimates may
/// reconstruct to a non-positive operator.
inline ComplexMatrix pauli_reconstruct(const PauliVector& v) {
  ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q)
      rho += v.components[static_cast<std::size_t>(4 * p + q)] * tensor(pauli::by_index(p), pauli::by_index(q));
  return rho / 4.0;
}

// ---------------------------------------------------------------------------
// Named two-qubit states

namespace states {

inline Ket qubit(double theta, double phi) {
  Ket k(2);
  k << std::cos(theta / 2), std::polar(1.0, phi) * std::sin(theta / 2);
  return k;
}

inline Ket computational(int q0, int q1) { return basis_ket(4, 2 * q0 + q1); }
inline Ket gg() { return computational(0, 0); }
inline Ket ee() { return computational(1, 1); }

inline Ket odd_bell_plus() { return (computational(0, 1) + computational(1, 0)) / std::sqrt(2.0); }
inline Ket odd_bell_minus() { return (computational(0, 1) - computational(1, 0)) / std::sqrt(2.0); }

/// (|ge> + e^{i phi}|eg>)/sqrt(2).
inline Ket odd_bell(double phi) {
  return (computational(0, 1) + std::polar(1.0, phi) * computational(1, 0)) / std::sqrt(2.0);
}

}  // namespace states

inline double state_fidelity(const ComplexMatrix& rho, const Ket& target) {
  if (rho.rows() != target.size()) throw std::invalid_argument("state and target dimensions differ");
  return (target.adjoint() * rho * target)(0, 0).real();
}

inline double state_fidelity(const DensityMatrix& rho, const Ket& target) {
  if (std::abs(target.norm() - 1.0) > kStructuralTol) throw std::invalid_argument("target ket is not normalized");
  return state_fidelity(rho.matrix(), target);
}

/// Wootters concurrence. Accepts unphysical operators (finite-shot
/// reconstructions); slightly negative eigenvalues of rho*rho~ are clamped.
inline double concurrence(const ComplexMatrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4) throw std::invalid_argument("concurrence needs a 4x4 matrix");
  const ComplexMatrix yy = tensor(pauli::y(), pauli::y());
  const ComplexMatrix r = rho * yy * rho.conjugate() * yy;
  Eigen::ComplexEigenSolver<ComplexMatrix> es(r, false);
  std::array<double, 4> lambda{};
  for (int k = 0; k < 4; ++k) lambda[static_cast<std::size_t>(k)] = std::sqrt(std::max(0.0, es.eigenvalues()(k).real()));
  std::sort(lambda.begin(), lambda.end(), std::greater<>());
  return std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

inline double concurrence(const DensityMatrix& rho) {
  if (rho.dims() != std::vector<int>{2, 2}) throw std::invalid_argument("concurrence needs a two-qubit state");
  return concurrence(rho.matrix());
}

}  // namespace rement
