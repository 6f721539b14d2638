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

// Dual-rail flying-photon Fock space: 50/50 hybrid, qubit-photon entangler
// and pure-loss channel. Rails are truncated at n_max photons each.

#include "rement/qmath.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace rement {

struct FockSpaceSpec {
  int n_max = 2;

  int rail_dim() const { return n_max + 1; }

  void validate() const {
    // The |ee> branch puts two photons on one rail after the hybrid.
    if (n_max < 2) throw std::invalid_argument("n_max must be at least 2");
  }
};

inline ComplexMatrix annihilation(int dim) {
  ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

inline ComplexMatrix number_operator(int dim) {
  ComplexMatrix n = ComplexMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

/// e^{i phase n} on one rail.
inline ComplexMatrix phase_shifter(int dim, double phase) {
  ComplexMatrix u = ComplexMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) u(k, k) = std::polar(1.0, phase * k);
  return u;
}

/// Two-rail |n0 n1> ket (rail 0 most significant).
inline Ket two_rail_ket(const FockSpaceSpec& spec, int n0, int n1) {
  const int d = spec.rail_dim();
  return basis_ket(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(n0) * d + n1);
}

/// U_BS = exp(-3 pi (a^dag b - a b^dag) / 4) with a on rail 0 and b on
/// rail 1. Maps (|10> + |01>)/sqrt2 to -|10>, (|10> - |01>)/sqrt2 to |01>
/// and |11> to -(|02> - |20>)/sqrt2.
inline ComplexMatrix beam_splitter_unitary(const FockSpaceSpec& spec) {
  spec.validate();
  const int d = spec.rail_dim();
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const ComplexMatrix a = tensor(annihilation(d), id);
  const ComplexMatrix b = tensor(id, annihilation(d));
  // Closed on every total-number sector <= n_max, so truncation is exact
  // for protocol states.
  const ComplexMatrix generator = a.adjoint() * b - a * b.adjoint();
  return matrix_exponential(-0.75 * M_PI * generator);
}

/// Unitary on qubit (x) rail realizing a|g0> + b|e0> -> a|g0> + b|e1>.
/// It swaps |e0> and |e1> and leaves the rest of the space alone, which is
/// the completion used by the 36-dimensional protocol model.
inline ComplexMatrix entangler_unitary(const FockSpaceSpec& spec) {
  spec.validate();
  const int d = spec.rail_dim();
  ComplexMatrix u = ComplexMatrix::Identity(2 * d, 2 * d);
  const int e0 = d, e1 = d + 1;
  u(e0, e0) = 0;
  u(e1, e1) = 0;
  u(e0, e1) = 1;
  u(e1, e0) = 1;
  return u;
}

/// Entangles a bare qubit with a fresh (vacuum) rail. Output dims {2, n_max+1}.
inline DensityMatrix entangle_qubit_with_photon(const DensityMatrix& qubit_state, const FockSpaceSpec& spec) {
  if (qubit_state.dims() != std::vector<int>{2}) throw std::invalid_argument("expected a single-qubit state");
  spec.validate();
  const int d = spec.rail_dim();
  ComplexMatrix vac = ComplexMatrix::Zero(d, d);
  vac(0, 0) = 1;
  const ComplexMatrix joint = tensor(qubit_state.matrix(), vac);
  const ComplexMatrix u = entangler_unitary(spec);
  return DensityMatrix({2, d}, u * joint * u.adjoint());
}

/// Population of the rail outside its vacuum state.
inline double rail_occupation(const DensityMatrix& rho, int rail) {
  const ComplexMatrix reduced = partial_trace(rho.matrix(), rho.dims(), std::vector<int>{rail});
  return 1.0 - reduced(0, 0).real();
}

/// Embedded entangler for a joint state: `qubit` emits into `rail`, which
/// must be in vacuum.
inline DensityMatrix entangle_qubit_with_photon(const DensityMatrix& rho, int qubit, int rail, const FockSpaceSpec& spec) {
  const auto& dims = rho.dims();
  if (qubit < 0 || rail < 0 || static_cast<std::size_t>(qubit) >= dims.size() ||
      static_cast<std::size_t>(rail) >= dims.size())
    throw std::invalid_argument("subsystem index out of range");
  if (dims[static_cast<std::size_t>(qubit)] != 2 || dims[static_cast<std::size_t>(rail)] != spec.rail_dim())
    throw std::invalid_argument("subsystem dimensions do not match a qubit and a rail");
  if (rail_occupation(rho, rail) > kStructuralTol) throw std::invalid_argument("photon rail is not in vacuum");
  return apply_unitary(rho, entangler_unitary(spec), {qubit, rail});
}

/// Kraus operators of a pure-loss channel with transmissivity `eta` on a
/// rail of dimension `dim`.
inline std::vector<ComplexMatrix> loss_kraus(int dim, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in [0, 1]");
  std::vector<ComplexMatrix> ks;
  for (int k = 0; k < dim; ++k) {
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    for (int n = k; n < dim; ++n) {
      const double binom = std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0));
      m(n - k, n) = std::sqrt(binom * std::pow(eta, n - k) * std::pow(1.0 - eta, k));
    }
    ks.push_back(std::move(m));
  }
  return ks;
}

/// Loss applied to an arbitrary (possibly unnormalized) operator.
inline ComplexMatrix loss_channel(const ComplexMatrix& rho, std::span<const int> dims, int rail, double eta) {
  if (rail < 0 || static_cast<std::size_t>(rail) >= dims.size()) throw std::invalid_argument("rail index out of range");
  if (eta == 1.0) return rho;
  const int target[] = {rail};
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : loss_kraus(dims[static_cast<std::size_t>(rail)], eta)) {
    const ComplexMatrix full = embed_operator(k, dims, target);
    out += full * rho * full.adjoint();
  }
  return out;
}

inline DensityMatrix loss_channel(const DensityMatrix& rho, int rail, double eta) {
  ComplexMatrix out = loss_channel(rho.matrix(), rho.dims(), rail, eta);
  return DensityMatrix(rho.dims(), 0.5 * (out + out.adjoint()));
}

}  // namespace rement
