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

// Joint two-qubit readout with assignment errors, linear-inversion
// correction and Pauli reconstruction from nine pre-rotation settings.
//
// Outcomes are ordered (GG, GE, EG, EE). Each setting rotates each qubit
// independently before a Z-basis readout.

#include "rement/parallel.hpp"
#include "rement/qmath.hpp"
#include "rement/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rement {

inline constexpr std::array<std::string_view, 4> kOutcomeLabels{"GG", "GE", "EG", "EE"};

/// a(j, i): probability that computational state i is recorded as outcome j.
class AssignmentMatrix {
 public:
  explicit AssignmentMatrix(const Eigen::Matrix4d& a) : a_(a) { validate(); }

  static AssignmentMatrix identity() { return AssignmentMatrix(Eigen::Matrix4d::Identity()); }

  /// Calibration measured on the Alice/Bob joint readout.
  static AssignmentMatrix measured() {
    Eigen::Matrix4d a;
    a << 0.941, 0.047, 0.031, 0.001,
         0.031, 0.925, 0.001, 0.030,
         0.027, 0.001, 0.931, 0.031,
         0.001, 0.027, 0.037, 0.938;
    return AssignmentMatrix(a);
  }

  const Eigen::Matrix4d& matrix() const noexcept { return a_; }
  const Eigen::Matrix4d& inverse() const noexcept { return inv_; }
  double operator()(int j, int i) const { return a_(j, i); }

 private:
  void validate() {
    if (!a_.allFinite()) throw std::invalid_argument("assignment matrix has non-finite entries");
    if ((a_.array() < 0).any() || (a_.array() > 1).any())
      throw std::invalid_argument("assignment matrix entries must lie in [0, 1]");
    for (int i = 0; i < 4; ++i)
      if (std::abs(a_.col(i).sum() - 1.0) > 1e-6)
        throw std::invalid_argument("assignment matrix column " + std::to_string(i) + " does not sum to 1");
    Eigen::JacobiSVD<Eigen::Matrix4d> svd(a_);
    const auto& s = svd.singularValues();
    if (!(s(3) > 0) || s(0) / s(3) > 1e12) throw std::invalid_argument("assignment matrix is singular");
    inv_ = a_.inverse();
  }

  Eigen::Matrix4d a_;
  Eigen::Matrix4d inv_;
};

/// Pi_j^expt = sum_i A_ji |i><i|.
inline std::array<ComplexMatrix, 4> imperfect_projectors(const AssignmentMatrix& a) {
  std::array<ComplexMatrix, 4> out;
  for (int j = 0; j < 4; ++j) {
    out[static_cast<std::size_t>(j)] = ComplexMatrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i) out[static_cast<std::size_t>(j)](i, i) = a(j, i);
  }
  return out;
}

inline Eigen::Vector4d correct_counts(const Eigen::Vector4d& b, const AssignmentMatrix& a) { return a.inverse() * b; }

enum class PreRotation { id = 0, ry90 = 1, rx90 = 2 };

inline ComplexMatrix pre_rotation_matrix(PreRotation r) {
  switch (r) {
    case PreRotation::id: return pauli::identity();
    case PreRotation::ry90: return pauli::rotation_y(M_PI / 2);
    case PreRotation::rx90: return pauli::rotation_x(M_PI / 2);
  }
  throw std::invalid_argument("unknown pre-rotation");
}

inline std::string_view pre_rotation_name(PreRotation r) {
  switch (r) {
    case PreRotation::id: return "Id";
    case PreRotation::ry90: return "Ry90";
    case PreRotation::rx90: return "Rx90";
  }
  return "?";
}

/// Pauli index (1 = X, 2 = Y, 3 = Z) and sign s with R^dag Z R = s P.
struct MeasuredAxis {
  int pauli = 3;
  double sign = 1.0;
};

inline MeasuredAxis measured_axis(PreRotation r) {
  const ComplexMatrix u = pre_rotation_matrix(r);
  const ComplexMatrix observed = u.adjoint() * pauli::z() * u;
  for (int p = 1; p < 4; ++p) {
    const double c = (observed * pauli::by_index(p)).trace().real() / 2;
    if (std::abs(std::abs(c) - 1.0) < 1e-12) return {p, c > 0 ? 1.0 : -1.0};
  }
  throw std::logic_error("pre-rotation does not map Z onto a Pauli axis");
}

struct TomographySetting {
  PreRotation alice = PreRotation::id;
  PreRotation bob = PreRotation::id;

  ComplexMatrix unitary() const { return tensor(pre_rotation_matrix(alice), pre_rotation_matrix(bob)); }
};

struct TomographySettings {
  std::array<TomographySetting, 9> settings;
  std::uint64_t shots_per_setting = 0;

  /// {Id, Ry90, Rx90} x {Id, Ry90, Rx90}, index 3 * alice + bob.
  static TomographySettings standard(std::uint64_t shots) {
    TomographySettings t;
    constexpr std::array<PreRotation, 3> rs{PreRotation::id, PreRotation::ry90, PreRotation::rx90};
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b) t.settings[3 * a + b] = {rs[a], rs[b]};
    t.shots_per_setting = shots;
    return t;
  }
};

/// Outcome probabilities (or frequencies) per setting.
using ProbabilityTable = std::array<Eigen::Vector4d, 9>;

struct CountsTable {
  std::array<std::array<std::uint64_t, 4>, 9> counts{};

  std::uint64_t shots(std::size_t setting) const {
    const auto& c = counts.at(setting);
    return c[0] + c[1] + c[2] + c[3];
  }

  Eigen::Vector4d frequencies(std::size_t setting) const {
    const double n = static_cast<double>(shots(setting));
    Eigen::Vector4d f = Eigen::Vector4d::Zero();
    if (n > 0)
      for (int j = 0; j < 4; ++j) f(j) = static_cast<double>(counts[setting][static_cast<std::size_t>(j)]) / n;
    return f;
  }
};

/// P_jk = Tr[Pi_j^expt R_k rho R_k^dag].
inline ProbabilityTable simulate_probabilities(const ComplexMatrix& rho, const AssignmentMatrix& a,
                                               const TomographySettings& settings) {
  if (rho.rows() != 4 || rho.cols() != 4) throw std::invalid_argument("tomography needs a two-qubit state");
  const auto projectors = imperfect_projectors(a);
  ProbabilityTable out;
  for (std::size_t k = 0; k < 9; ++k) {
    const ComplexMatrix u = settings.settings[k].unitary();
    const ComplexMatrix rotated = u * rho * u.adjoint();
    for (int j = 0; j < 4; ++j) out[k](j) = (projectors[static_cast<std::size_t>(j)] * rotated).trace().real();
  }
  return out;
}

inline ProbabilityTable simulate_probabilities(const DensityMatrix& rho, const AssignmentMatrix& a,
                                               const TomographySettings& settings) {
  if (rho.dims() != std::vector<int>{2, 2}) throw std::invalid_argument("tomography needs a two-qubit state");
  return simulate_probabilities(rho.matrix(), a, settings);
}

/// One multinomial draw by sequential conditional binomials.
template <typename Rng>
std::array<std::uint64_t, 4> sample_multinomial(std::uint64_t n, const Eigen::Vector4d& p, Rng& rng) {
  std::array<std::uint64_t, 4> out{};
  std::uint64_t remaining = n;
  double mass = 1.0;
  for (int j = 0; j < 3 && remaining > 0; ++j) {
    const double q = mass > 0 ? std::clamp(std::max(0.0, p(j)) / mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::uint64_t> draw(remaining, q);
    const std::uint64_t k = draw(rng);
    out[static_cast<std::size_t>(j)] = k;
    remaining -= k;
    mass -= std::max(0.0, p(j));
  }
  out[3] = remaining;
  return out;
}

/// Setting k draws from its own stream keyed by (seed, k).
inline CountsTable simulate_counts(const DensityMatrix& rho, const AssignmentMatrix& a,
                                   const TomographySettings& settings, std::uint64_t seed, unsigned threads = 1) {
  const ProbabilityTable p = simulate_probabilities(rho, a, settings);
  const auto per_setting = parallel_map(9, threads, [&](std::size_t k) {
    SplitMix64 rng(seed, k);
    return sample_multinomial(settings.shots_per_setting, p[k], rng);
  });
  CountsTable table;
  for (std::size_t k = 0; k < 9; ++k) table.counts[k] = per_setting[k];
  return table;
}

namespace detail {

// Parity weights turning (GG, GE, EG, EE) probabilities into <Z_A>, <Z_B>
// and <Z_A Z_B>.
inline const Eigen::Vector4d kParityA{1, 1, -1, -1};
inline const Eigen::Vector4d kParityB{1, -1, 1, -1};
inline const Eigen::Vector4d kParityAB{1, -1, -1, 1};

/// Per-setting probabilities and their covariances, combined into Pauli
/// components. Single-qubit terms average the three settings that share
/// the qubit's rotation.
inline PauliVector assemble(const TomographySettings& settings, const ProbabilityTable& p,
                            const std::array<Eigen::Matrix4d, 9>* cov) {
  PauliVector v;
  v.components[0] = 1.0;
  std::array<double, 16> var{};
  std::array<int, 16> hits{};
  auto add = [&](std::size_t index, double sign, const Eigen::Vector4d& w, std::size_t k) {
    v.components[index] += sign * w.dot(p[k]);
    if (cov) var[index] += w.dot((*cov)[k] * w);
    ++hits[index];
  };
  for (std::size_t k = 0; k < 9; ++k) {
    const MeasuredAxis ma = measured_axis(settings.settings[k].alice);
    const MeasuredAxis mb = measured_axis(settings.settings[k].bob);
    const auto ia = static_cast<std::size_t>(ma.pauli), ib = static_cast<std::size_t>(mb.pauli);
    add(4 * ia + ib, ma.sign * mb.sign, kParityAB, k);
    add(4 * ia, ma.sign, kParityA, k);
    add(ib, mb.sign, kParityB, k);
  }
  std::array<double, 16> sigma{};
  for (std::size_t i = 1; i < 16; ++i) {
    if (hits[i] == 0) throw std::invalid_argument("settings do not cover Pauli component " + PauliVector::label(i));
    v.components[i] /= hits[i];
    sigma[i] = std::sqrt(std::max(0.0, var[i])) / hits[i];
  }
  if (cov) v.sigma = sigma;
  return v;
}

}  // namespace detail

/// Infinite-shot reconstruction; `a` is undone when supplied.
inline PauliVector reconstruct_pauli(const ProbabilityTable& probabilities, const TomographySettings& settings,
                                     const AssignmentMatrix* a = nullptr) {
  ProbabilityTable p = probabilities;
  if (a)
    for (auto& b : p) b = correct_counts(b, *a);
  return detail::assemble(settings, p, nullptr);
}

/// Finite-shot reconstruction with standard errors from the multinomial
/// covariance of each setting, propagated through A^-1.
inline PauliVector reconstruct_pauli(const CountsTable& counts, const TomographySettings& settings,
                                     const AssignmentMatrix* a = nullptr) {
  ProbabilityTable p;
  std::array<Eigen::Matrix4d, 9> cov;
  for (std::size_t k = 0; k < 9; ++k) {
    const double n = static_cast<double>(counts.shots(k));
    if (!(n > 0)) throw std::invalid_argument("setting " + std::to_string(k) + " has no counts");
    const Eigen::Vector4d f = counts.frequencies(k);
    Eigen::Matrix4d c = (Eigen::Matrix4d(f.asDiagonal()) - f * f.transpose()) / n;
    if (a) {
      p[k] = correct_counts(f, *a);
      c = a->inverse() * c * a->inverse().transpose();
    } else {
      p[k] = f;
    }
    cov[k] = c;
  }
  return detail::assemble(settings, p, &cov);
}

inline bool is_physical(const PauliVector& v) {
  const ComplexMatrix rho = pauli_reconstruct(v);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= kEigenFloor;
}

struct FidelityEstimate {
  double fidelity = 0.0;
  double sigma_fidelity = 0.0;
  double concurrence = 0.0;
  double sigma_concurrence = 0.0;
  bool physical = true;  ///< reconstructed operator is positive semidefinite
};

/// Metrics of the reconstructed operator. Each component is moved by
/// +-sigma in turn; half the resulting spread is that component's
/// contribution, and contributions add in quadrature.
inline FidelityEstimate fidelity_with_errors(const PauliVector& v, const Ket& target) {
  if (target.size() != 4 || std::abs(target.norm() - 1.0) > kStructuralTol)
    throw std::invalid_argument("target must be a normalized two-qubit ket");
  FidelityEstimate e;
  const ComplexMatrix rho = pauli_reconstruct(v);
  e.fidelity = state_fidelity(rho, target);
  e.concurrence = concurrence(rho);
  e.physical = is_physical(v);
  if (!v.sigma) return e;
  double var_f = 0, var_c = 0;
  for (std::size_t i = 1; i < 16; ++i) {
    const double s = (*v.sigma)[i];
    if (s == 0.0) continue;
    PauliVector up = v, down = v;
    up.components[i] += s;
    down.components[i] -= s;
    const ComplexMatrix ru = pauli_reconstruct(up), rd = pauli_reconstruct(down);
    const double df = 0.5 * std::abs(state_fidelity(ru, target) - state_fidelity(rd, target));
    const double dc = 0.5 * std::abs(concurrence(ru) - concurrence(rd));
    var_f += df * df;
    var_c += dc * dc;
  }
  e.sigma_fidelity = std::sqrt(var_f);
  e.sigma_concurrence = std::sqrt(var_c);
  return e;
}

/// Cross-check of the error bars: parametric bootstrap over the observed
/// frequencies. Returns standard deviations of fidelity and concurrence.
inline std::pair<double, double> bootstrap_errors(const CountsTable& counts, const TomographySettings& settings,
                                                  const AssignmentMatrix* a, const Ket& target, int resamples,
                                                  std::uint64_t seed) {
  if (resamples < 2) throw std::invalid_argument("bootstrap needs at least two resamples");
  double sf = 0, sf2 = 0, sc = 0, sc2 = 0;
  for (int r = 0; r < resamples; ++r) {
    CountsTable resampled;
    for (std::size_t k = 0; k < 9; ++k) {
      SplitMix64 rng(seed, static_cast<std::uint64_t>(r) * 9 + k);
      resampled.counts[k] = sample_multinomial(counts.shots(k), counts.frequencies(k), rng);
    }
    PauliVector v = reconstruct_pauli(resampled, settings, a);
    const ComplexMatrix rho = pauli_reconstruct(v);
    const double f = state_fidelity(rho, target), c = concurrence(rho);
    sf += f;
    sf2 += f * f;
    sc += c;
    sc2 += c * c;
  }
  const double n = resamples;
  auto sd = [n](double s, double s2) { return std::sqrt(std::max(0.0, (s2 - s * s / n) / (n - 1))); };
  return {sd(sf, sf2), sd(sc, sc2)};
}

}  // namespace rement
