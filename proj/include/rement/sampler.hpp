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

// Shot-level Monte Carlo of the heralded protocol. Each shot draws its
// initialization, both heralds and, when initialized, a tomography outcome
// from the conditional state of its branch. Randomness is keyed by
// (seed, shot index), so any shot can be regenerated on its own.

#include "rement/parallel.hpp"
#include "rement/protocol.hpp"
#include "rement/random.hpp"
#include "rement/tomography.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace rement {

struct ShotRecord {
  std::uint64_t shot = 0;
  bool init_ok = false;
  bool click1 = false;
  bool click2 = false;
  int tomo_setting = -1;  ///< 0..8, -1 when not initialized
  int outcome = -1;       ///< index into kOutcomeLabels, -1 when not initialized
};

/// Outcome distribution per branch and setting, precomputed once.
struct ShotModel {
  OutcomeTable table;
  std::array<std::optional<ProbabilityTable>, 4> tomography;

  ShotModel(const ProtocolConfig& config, const AssignmentMatrix& a, const TomographySettings& settings)
      : table(run_two_rounds(config)) {
    for (Herald h : kHeralds)
      if (const auto& b = table[h]; b.state)
        tomography[static_cast<std::size_t>(h)] = simulate_probabilities(*b.state, a, settings);
  }
};

namespace detail {

inline int draw_index(double u, const double* weights, int n) {
  double acc = 0;
  for (int i = 0; i < n - 1; ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return n - 1;
}

/// Draws everything but the tomography setting.
inline ShotRecord draw_shot(const ProtocolConfig& config, const ShotModel& model, std::uint64_t seed,
                            std::uint64_t index) {
  SplitMix64 rng(seed, index);
  ShotRecord r;
  r.shot = index;
  r.init_ok = rng.uniform() < config.p_init;
  const double u_branch = rng.uniform();
  if (!r.init_ok) return r;
  std::array<double, 4> pb{};
  for (Herald h : kHeralds) pb[static_cast<std::size_t>(h)] = model.table[h].probability;
  const auto h = static_cast<Herald>(draw_index(u_branch, pb.data(), 4));
  r.click1 = h == Herald::cc || h == Herald::cnc;
  r.click2 = h == Herald::cc || h == Herald::ncc;
  return r;
}

}  // namespace detail

/// `n` shots. Settings cycle round-robin over the initialized shots of each
/// heralding branch, in shot order.
inline std::vector<ShotRecord> sample_shots(const ProtocolConfig& config, const TomographySettings& settings,
                                            const AssignmentMatrix& a, std::uint64_t n, std::uint64_t seed,
                                            unsigned threads = 1) {
  const ShotModel model(config, a, settings);
  auto records = parallel_map(n, threads, [&](std::size_t i) { return detail::draw_shot(config, model, seed, i); });

  // Sequential prefix pass: the setting of a shot depends on how many
  // earlier shots landed in the same branch.
  std::array<std::uint64_t, 4> seen{};
  for (auto& r : records) {
    if (!r.init_ok) continue;
    const auto h = static_cast<std::size_t>(herald_of(r.click1, r.click2));
    r.tomo_setting = static_cast<int>(seen[h]++ % 9);
  }

  // Outcome draws use a second keyed stream so they stay independent of
  // the herald draws above.
  parallel_map(n, threads, [&](std::size_t i) {
    auto& r = records[i];
    if (!r.init_ok) return 0;
    const auto h = static_cast<std::size_t>(herald_of(r.click1, r.click2));
    const auto& probs = model.tomography[h];
    if (!probs) throw std::logic_error("sampled a zero-probability branch");
    const Eigen::Vector4d& p = (*probs)[static_cast<std::size_t>(r.tomo_setting)];
    SplitMix64 rng(derive_seed(seed, 0x746f6d6fULL), i);
    r.outcome = detail::draw_index(rng.uniform(), p.data(), 4);
    return 0;
  });
  return records;
}

inline void write_shots_csv(std::ostream& os, const std::vector<ShotRecord>& records) {
  os << "shot,init_ok,click1,click2,tomo_setting,outcome\n";
  for (const auto& r : records) {
    os << r.shot << ',' << int(r.init_ok) << ',' << int(r.click1) << ',' << int(r.click2) << ',';
    if (r.init_ok) os << r.tomo_setting << ',' << kOutcomeLabels[static_cast<std::size_t>(r.outcome)];
    else os << ',';
    os << '\n';
  }
}

struct Frequency {
  double value = 0.0;
  double sigma = 0.0;  ///< binomial standard error
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
};

inline Frequency binomial_frequency(std::uint64_t k, std::uint64_t n) {
  Frequency f;
  f.successes = k;
  f.trials = n;
  if (n > 0) {
    f.value = static_cast<double>(k) / static_cast<double>(n);
    f.sigma = std::sqrt(f.value * (1 - f.value) / static_cast<double>(n));
  }
  return f;
}

struct RunSummary {
  std::uint64_t shots = 0;
  Frequency p_init_hat;
  Frequency p_click1_hat;  ///< among initialized shots
  Frequency p_click2_hat;  ///< among initialized shots with a round-one click
  Frequency p_success_hat; ///< (C,C) among all shots
  std::array<std::uint64_t, 4> branch_counts{};
  std::array<CountsTable, 4> counts;  ///< per heralding branch
  /// Reconstruction of the (C,C) counts; empty if a setting has no shots.
  std::optional<PauliVector> pauli;

  const CountsTable& post_selected_counts() const { return counts[static_cast<std::size_t>(Herald::cc)]; }
};

/// Pauli vector of one branch's counts, or empty if a setting is unsampled.
inline std::optional<PauliVector> reconstruct_branch(const RunSummary& s, Herald h, const TomographySettings& settings,
                                                     const AssignmentMatrix* a) {
  const auto& c = s.counts[static_cast<std::size_t>(h)];
  for (std::size_t k = 0; k < 9; ++k)
    if (c.shots(k) == 0) return std::nullopt;
  return reconstruct_pauli(c, settings, a);
}

/// `a` corrects the readout when supplied.
inline RunSummary aggregate(const std::vector<ShotRecord>& records, const TomographySettings& settings,
                            const AssignmentMatrix* a) {
  RunSummary s;
  s.shots = records.size();
  std::uint64_t init = 0, c1 = 0, c12 = 0;
  for (const auto& r : records) {
    if (!r.init_ok) continue;
    ++init;
    c1 += r.click1;
    c12 += r.click1 && r.click2;
    const auto h = static_cast<std::size_t>(herald_of(r.click1, r.click2));
    ++s.branch_counts[h];
    ++s.counts[h].counts.at(static_cast<std::size_t>(r.tomo_setting)).at(static_cast<std::size_t>(r.outcome));
  }
  s.p_init_hat = binomial_frequency(init, s.shots);
  s.p_click1_hat = binomial_frequency(c1, init);
  s.p_click2_hat = binomial_frequency(c12, c1);
  s.p_success_hat = binomial_frequency(c12, s.shots);
  s.pauli = reconstruct_branch(s, Herald::cc, settings, a);
  return s;
}

}  // namespace rement
