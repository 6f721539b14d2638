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

#include "rement/protocol.hpp"
#include "rement/tomography.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

namespace rement {
namespace {

const auto kMeasured = AssignmentMatrix::measured();
const auto kIdentity = AssignmentMatrix::identity();

DensityMatrix bell() { return DensityMatrix::from_ket({2, 2}, states::odd_bell_plus()); }

TEST(Assignment, Validation) {
  Eigen::Matrix4d bad = Eigen::Matrix4d::Identity();
  bad(0, 0) = 0.9;
  EXPECT_THROW(AssignmentMatrix{bad}, std::invalid_argument);  // column 0 sums to 0.9
  Eigen::Matrix4d singular = Eigen::Matrix4d::Zero();
  singular.row(0).setConstant(0.5);
  singular.row(1).setConstant(0.5);
  EXPECT_THROW(AssignmentMatrix{singular}, std::invalid_argument);
  Eigen::Matrix4d negative = Eigen::Matrix4d::Identity();
  negative(0, 1) = -0.1;
  negative(1, 1) = 1.1;
  EXPECT_THROW(AssignmentMatrix{negative}, std::invalid_argument);
}

TEST(ImperfectProjectors, IdentityCalibration) {
  const auto p = imperfect_projectors(kIdentity);
  for (int j = 0; j < 4; ++j) {
    ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
    expected(j, j) = 1;
    EXPECT_EQ(p[static_cast<std::size_t>(j)], expected);
  }
}

TEST(ImperfectProjectors, MeasuredCalibrationFirstRow) {
  const auto p = imperfect_projectors(kMeasured);
  const Eigen::Vector4d expected{0.941, 0.047, 0.031, 0.001};
  EXPECT_LT((p[0].diagonal().real() - expected).norm(), 1e-15);
  EXPECT_LT((p[0] - ComplexMatrix(p[0].diagonal().asDiagonal())).norm(), 1e-15);
}

TEST(ImperfectProjectors, Completeness) {
  const auto p = imperfect_projectors(kMeasured);
  EXPECT_LT((p[0] + p[1] + p[2] + p[3] - ComplexMatrix::Identity(4, 4)).norm(), 1e-6);
}

TEST(PreRotations, MeasuredAxes) {
  EXPECT_EQ(measured_axis(PreRotation::id).pauli, 3);
  EXPECT_EQ(measured_axis(PreRotation::ry90).pauli, 1);
  EXPECT_EQ(measured_axis(PreRotation::rx90).pauli, 2);
}

TEST(Settings, NineCombinations) {
  const auto s = TomographySettings::standard(100);
  EXPECT_EQ(s.settings.size(), 9u);
  EXPECT_EQ(s.settings[5].alice, PreRotation::ry90);
  EXPECT_EQ(s.settings[5].bob, PreRotation::rx90);
}

TEST(SimulateCounts, GroundStateWithPerfectReadout) {
  const auto gg = DensityMatrix::from_ket({2, 2}, states::gg());
  const auto c = simulate_counts(gg, kIdentity, TomographySettings::standard(1000), 3);
  EXPECT_EQ(c.counts[0], (std::array<std::uint64_t, 4>{1000, 0, 0, 0}));
}

TEST(SimulateCounts, ProbabilitiesMatchTraceFormula) {
  std::mt19937_64 rng(31);
  const auto rho = testing::random_state({2, 2}, rng);
  const auto s = TomographySettings::standard(0);
  const auto table = simulate_probabilities(rho, kMeasured, s);
  const auto proj = imperfect_projectors(kMeasured);
  for (std::size_t k = 0; k < 9; ++k) {
    const ComplexMatrix r = s.settings[k].unitary();
    for (int j = 0; j < 4; ++j) {
      const double direct = (proj[static_cast<std::size_t>(j)] * r * rho.matrix() * r.adjoint()).trace().real();
      EXPECT_NEAR(table[k](j), direct, 1e-12);
    }
  }
}

TEST(SimulateCounts, MeasuredCalibrationOnGroundState) {
  const auto gg = DensityMatrix::from_ket({2, 2}, states::gg());
  const auto table = simulate_probabilities(gg, kMeasured, TomographySettings::standard(0));
  const Eigen::Vector4d expected{0.941, 0.031, 0.027, 0.001};
  EXPECT_LT((table[0] - expected).norm(), 1e-12);
}

TEST(SimulateCounts, DeterministicAndThreadIndependent) {
  const auto s = TomographySettings::standard(5000);
  const auto a = simulate_counts(bell(), kMeasured, s, 42, 1);
  const auto b = simulate_counts(bell(), kMeasured, s, 42, 4);
  const auto c = simulate_counts(bell(), kMeasured, s, 43, 1);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_NE(a.counts, c.counts);
  for (std::size_t k = 0; k < 9; ++k) EXPECT_EQ(a.shots(k), 5000u);
}

TEST(Correction, IdentityIsNoOp) {
  const Eigen::Vector4d b{0.1, 0.2, 0.3, 0.4};
  EXPECT_LT((correct_counts(b, kIdentity) - b).norm(), 1e-15);
}

TEST(Correction, InvertsCorruption) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::Vector4d p{u(rng), u(rng), u(rng), u(rng)};
    p /= p.sum();
    const Eigen::Vector4d q = correct_counts(kMeasured.matrix() * p, kMeasured);
    EXPECT_LT((q - p).norm(), 1e-9);
    EXPECT_NEAR(q.sum(), 1.0, 1e-9);
  }
}

TEST(Correction, FirstBasisVector) {
  const Eigen::Vector4d b = kMeasured.matrix().col(0);
  EXPECT_LT((correct_counts(b, kMeasured) - Eigen::Vector4d(1, 0, 0, 0)).norm(), 1e-9);
}

TEST(Reconstruct, ExactBellProbabilities) {
  const auto s = TomographySettings::standard(0);
  const auto v = reconstruct_pauli(simulate_probabilities(bell(), kIdentity, s), s);
  EXPECT_NEAR(v["XX"], 1, 1e-12);
  EXPECT_NEAR(v["YY"], 1, 1e-12);
  EXPECT_NEAR(v["ZZ"], -1, 1e-12);
}

TEST(Reconstruct, InfiniteShotRoundTripOnRandomStates) {
  std::mt19937_64 rng(33);
  const auto s = TomographySettings::standard(0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rho = testing::random_state({2, 2}, rng);
    const auto truth = pauli_decompose(rho);
    const auto clean = reconstruct_pauli(simulate_probabilities(rho, kIdentity, s), s);
    const auto corrected = reconstruct_pauli(simulate_probabilities(rho, kMeasured, s), s, &kMeasured);
    for (std::size_t i = 0; i < 16; ++i) {
      EXPECT_NEAR(clean.components[i], truth.components[i], 1e-12);
      EXPECT_NEAR(corrected.components[i], clean.components[i], 1e-9);
    }
  }
}

TEST(Reconstruct, FiniteShotsConvergeWithPerfectReadout) {
  std::mt19937_64 rng(34);
  const auto rho = testing::random_state({2, 2}, rng);
  const auto s = TomographySettings::standard(1000000);
  const auto v = reconstruct_pauli(simulate_counts(rho, kIdentity, s, 5), s);
  const auto truth = pauli_decompose(rho);
  ASSERT_TRUE(v.sigma);
  for (std::size_t i = 1; i < 16; ++i)
    EXPECT_LT(std::abs(v.components[i] - truth.components[i]), 5 * (*v.sigma)[i]) << PauliVector::label(i);
}

TEST(Reconstruct, CorruptedSamplesCorrectWithinThreeSigma) {
  const auto rho = *run_two_rounds(ProtocolConfig{})[Herald::cc].state;
  const auto s = TomographySettings::standard(200000);
  const auto v = reconstruct_pauli(simulate_counts(rho, kMeasured, s, 2024), s, &kMeasured);
  const auto truth = pauli_decompose(rho);
  for (std::size_t i = 1; i < 16; ++i) {
    const double sigma = (*v.sigma)[i];
    EXPECT_LT(std::abs(v.components[i] - truth.components[i]), 3 * sigma) << PauliVector::label(i);
    EXPECT_LT(sigma, 0.01);
    EXPECT_GT(sigma, 0.001);
  }
}

TEST(Reconstruct, SigmaPropagatesThroughCorrection) {
  const auto s = TomographySettings::standard(200000);
  const auto counts = simulate_counts(bell(), kMeasured, s, 1);
  const auto raw = reconstruct_pauli(counts, s);
  const auto corrected = reconstruct_pauli(counts, s, &kMeasured);
  // Undoing the readout errors amplifies the noise.
  for (std::size_t i = 1; i < 16; ++i) EXPECT_GT((*corrected.sigma)[i], (*raw.sigma)[i]);
}

TEST(FidelityErrors, ZeroSigmaGivesZeroError) {
  PauliVector v = pauli_decompose(bell());
  v.sigma = std::array<double, 16>{};
  const auto e = fidelity_with_errors(v, states::odd_bell_plus());
  EXPECT_NEAR(e.fidelity, 1, 1e-12);
  EXPECT_EQ(e.sigma_fidelity, 0.0);
  EXPECT_EQ(e.sigma_concurrence, 0.0);
}

TEST(FidelityErrors, PercentLevelComponentsGivePercentLevelFidelity) {
  PauliVector v = pauli_decompose(bell());
  std::array<double, 16> sigma;
  sigma.fill(0.01);
  sigma[0] = 0;
  v.sigma = sigma;
  const auto e = fidelity_with_errors(v, states::odd_bell_plus());
  // F = (1 + XX + YY - ZZ) / 4 here, so three components contribute 0.0025 each.
  EXPECT_NEAR(e.sigma_fidelity, std::sqrt(3.0) * 0.0025, 1e-12);
  EXPECT_GT(e.sigma_fidelity, 0.001);
  EXPECT_LT(e.sigma_fidelity, 0.02);
}

TEST(FidelityErrors, CentralValueIsUnperturbed) {
  const auto s = TomographySettings::standard(20000);
  const auto v = reconstruct_pauli(simulate_counts(bell(), kMeasured, s, 8), s, &kMeasured);
  const auto e = fidelity_with_errors(v, states::odd_bell_plus());
  EXPECT_NEAR(e.fidelity, state_fidelity(pauli_reconstruct(v), states::odd_bell_plus()), 1e-15);
}

TEST(FidelityErrors, BootstrapAgreesWithPerturbation) {
  const auto rho = *run_two_rounds(ProtocolConfig{})[Herald::cc].state;
  const auto s = TomographySettings::standard(20000);
  const auto counts = simulate_counts(rho, kMeasured, s, 9);
  const auto v = reconstruct_pauli(counts, s, &kMeasured);
  const auto e = fidelity_with_errors(v, states::odd_bell_plus());
  const auto [sf, sc] = bootstrap_errors(counts, s, &kMeasured, states::odd_bell_plus(), 200, 4);
  EXPECT_GT(sf, 0.5 * e.sigma_fidelity);
  EXPECT_LT(sf, 2.0 * e.sigma_fidelity);
  EXPECT_GT(sc, 0.0);
}

TEST(FidelityErrors, FlagsUnphysicalReconstruction) {
  PauliVector v = pauli_decompose(bell());
  v.components[PauliVector::index_of("ZZ")] = -1.2;
  EXPECT_FALSE(fidelity_with_errors(v, states::odd_bell_plus()).physical);
  EXPECT_TRUE(fidelity_with_errors(pauli_decompose(bell()), states::odd_bell_plus()).physical);
}

}  // namespace
}  // namespace rement
