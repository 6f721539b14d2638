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

#include "rement/sampler.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace rement {
namespace {

const TomographySettings kSettings = TomographySettings::standard(0);

std::vector<ShotRecord> ideal_shots(std::uint64_t n, std::uint64_t seed, unsigned threads = 4) {
  return sample_shots(ProtocolConfig::ideal(), kSettings, AssignmentMatrix::identity(), n, seed, threads);
}

TEST(Sampler, FailedInitializationRecordsNothing) {
  ProtocolConfig c = ProtocolConfig::ideal();
  c.p_init = 0;
  const auto shots = sample_shots(c, kSettings, AssignmentMatrix::identity(), 1000, 3);
  for (const auto& r : shots) {
    EXPECT_FALSE(r.init_ok);
    EXPECT_FALSE(r.click1 || r.click2);
    EXPECT_EQ(r.outcome, -1);
  }
  std::ostringstream os;
  write_shots_csv(os, {shots.front()});
  EXPECT_EQ(os.str(), "shot,init_ok,click1,click2,tomo_setting,outcome\n0,0,0,0,,\n");
}

TEST(Sampler, IdealSuccessProbability) {
  const auto s = aggregate(ideal_shots(100000, 11), kSettings, nullptr);
  EXPECT_EQ(s.p_init_hat.value, 1.0);
  EXPECT_LT(std::abs(s.p_success_hat.value - 0.125), 5 * s.p_success_hat.sigma);
}

TEST(Sampler, DeterministicAcrossThreadCounts) {
  const auto a = ideal_shots(20000, 5, 1), b = ideal_shots(20000, 5, 7);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].click1, b[i].click1);
    EXPECT_EQ(a[i].click2, b[i].click2);
    EXPECT_EQ(a[i].tomo_setting, b[i].tomo_setting);
    EXPECT_EQ(a[i].outcome, b[i].outcome);
  }
  const auto c = ideal_shots(20000, 6);
  std::size_t differ = 0;
  for (std::size_t i = 0; i < a.size(); ++i) differ += a[i].outcome != c[i].outcome;
  EXPECT_GT(differ, 1000u);
}

TEST(Sampler, ShotsRegenerateIndividually) {
  const ProtocolConfig c{};
  const auto shots = sample_shots(c, kSettings, AssignmentMatrix::measured(), 5000, 21, 3);
  const ShotModel model(c, AssignmentMatrix::measured(), kSettings);
  for (std::uint64_t i : {0ull, 17ull, 4999ull}) {
    const auto r = detail::draw_shot(c, model, 21, i);
    EXPECT_EQ(r.init_ok, shots[i].init_ok);
    EXPECT_EQ(r.click1, shots[i].click1);
    EXPECT_EQ(r.click2, shots[i].click2);
  }
}

TEST(Sampler, SettingsCycleWithinEachBranch) {
  const auto s = aggregate(ideal_shots(30001, 8), kSettings, nullptr);
  for (const auto& table : s.counts) {
    std::uint64_t lo = ~0ull, hi = 0;
    for (std::size_t k = 0; k < 9; ++k) {
      lo = std::min(lo, table.shots(k));
      hi = std::max(hi, table.shots(k));
    }
    EXPECT_LE(hi - lo, 1u);
  }
}

TEST(Sampler, BranchFrequenciesPassChiSquare) {
  const ProtocolConfig c{};
  const std::uint64_t n = 200000;
  const auto s = aggregate(sample_shots(c, kSettings, AssignmentMatrix::measured(), n, 99, 4), kSettings, nullptr);
  const auto table = run_two_rounds(c);
  const double init = static_cast<double>(s.p_init_hat.successes);
  double chi2 = 0;
  for (Herald h : kHeralds) {
    const double expected = init * table[h].probability;
    const double d = static_cast<double>(s.branch_counts[static_cast<std::size_t>(h)]) - expected;
    chi2 += d * d / expected;
  }
  EXPECT_LT(chi2, 16.27);  // three degrees of freedom, p = 0.001
  EXPECT_LT(std::abs(s.p_init_hat.value - c.p_init), 5 * s.p_init_hat.sigma);
}

TEST(Sampler, DefaultOverallSuccessNearFourPerMille) {
  const ProtocolConfig c{};
  const auto s = aggregate(sample_shots(c, kSettings, AssignmentMatrix::measured(), 1000000, 2024, 4), kSettings, nullptr);
  const double expected = c.p_init * run_two_rounds(c)[Herald::cc].probability;
  EXPECT_LT(std::abs(s.p_success_hat.value - expected), 5 * s.p_success_hat.sigma);
  EXPECT_NEAR(s.p_success_hat.value, 0.004, 0.001);
}

TEST(Sampler, ReconstructionAgreesWithAnalyticState) {
  const ProtocolConfig c = ProtocolConfig::ideal();
  const auto a = AssignmentMatrix::measured();
  const auto s = aggregate(sample_shots(c, kSettings, a, 1000000, 77, 4), kSettings, &a);
  ASSERT_TRUE(s.pauli && s.pauli->sigma);
  const PauliVector exact = pauli_decompose(*run_two_rounds(c)[Herald::cc].state);
  for (std::size_t i = 1; i < 16; ++i) {
    const double sd = (*s.pauli->sigma)[i];
    ASSERT_GT(sd, 0) << PauliVector::label(i);
    EXPECT_LT(std::abs(s.pauli->components[i] - exact.components[i]), 5 * sd) << PauliVector::label(i);
  }
}

TEST(Sampler, ErrorsShrinkWithRootShots) {
  auto mean_sigma = [](std::uint64_t n) {
    const auto s = aggregate(ideal_shots(n, 4), kSettings, nullptr);
    double sum = 0;
    for (std::size_t i = 1; i < 16; ++i) sum += (*s.pauli->sigma)[i];
    return sum / 15;
  };
  const double ratio = mean_sigma(100000) / mean_sigma(400000);
  EXPECT_NEAR(ratio, 2.0, 0.4);
}

TEST(Sampler, PureAntiCorrelation) {
  const auto s = aggregate(ideal_shots(50000, 13), kSettings, nullptr);
  ASSERT_TRUE(s.pauli);
  EXPECT_DOUBLE_EQ((*s.pauli)["ZZ"], -1.0);
}

TEST(Sampler, UnsampledSettingGivesNoReconstruction) {
  const auto s = aggregate(ideal_shots(40, 1), kSettings, nullptr);
  EXPECT_LT(s.branch_counts[0], 9u);
  EXPECT_FALSE(s.pauli.has_value());
}

TEST(Frequency, BinomialError) {
  const auto f = binomial_frequency(25, 100);
  EXPECT_DOUBLE_EQ(f.value, 0.25);
  EXPECT_DOUBLE_EQ(f.sigma, std::sqrt(0.25 * 0.75 / 100));
  const auto empty = binomial_frequency(0, 0);
  EXPECT_EQ(empty.value, 0.0);
  EXPECT_EQ(empty.sigma, 0.0);
}

}  // namespace
}  // namespace rement
