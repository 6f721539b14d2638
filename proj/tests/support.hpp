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

// Random state generators shared by the unit tests.

#include "rement/qmath.hpp"

#include <random>
#include <vector>

namespace rement::testing {

inline ComplexMatrix random_ginibre(Eigen::Index n, Eigen::Index m, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix a(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) a(i, j) = Complex(g(rng), g(rng));
  return a;
}

/// Full-rank mixed state drawn from the Hilbert-Schmidt measure.
inline DensityMatrix random_state(std::vector<int> dims, std::mt19937_64& rng) {
  Eigen::Index d = 1;
  for (int k : dims) d *= k;
  const ComplexMatrix g = random_ginibre(d, d, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(std::move(dims), 0.5 * (rho + rho.adjoint()));
}

inline Ket random_ket(Eigen::Index d, std::mt19937_64& rng) {
  Ket k = random_ginibre(d, 1, rng);
  return k / k.norm();
}

inline ComplexMatrix random_hermitian(Eigen::Index d, std::mt19937_64& rng) {
  const ComplexMatrix g = random_ginibre(d, d, rng);
  return 0.5 * (g + g.adjoint());
}

inline ComplexMatrix random_unitary(Eigen::Index d, std::mt19937_64& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_ginibre(d, d, rng));
  return qr.householderQ();
}

}  // namespace rement::testing
