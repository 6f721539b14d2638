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

// Phenomenological single-photon detector: a non-number-resolving click
// model with dark counts, its closed-form two-round Bell fidelity, and a
// thresholded Gaussian readout model.

#include "rement/qmath.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

namespace rement {

/// Click probabilities for one detection round.
struct DetectorRoundParams {
  double p_dark = 0.0;  ///< P(click | vacuum)
  double p_real = 1.0;  ///< P(click | one or more photons)

  void validate() const {
    if (!(p_dark >= 0.0 && p_dark <= 1.0)) throw std::invalid_argument("p_dark must lie in [0, 1]");
    if (!(p_real >= 0.0 && p_real <= 1.0)) throw std::invalid_argument("p_real must lie in [0, 1]");
  }
};

enum class ClickLabel { click, no_click };

struct MeasurementOutcome {
  ClickLabel label = ClickLabel::no_click;
  double probability = 0.0;
  /// Empty when the branch has zero probability.
  std::optional<DensityMatrix> post_state;
};

/// Unnormalized branch operators; their traces are the branch probabilities.
struct DetectorBranches {
  ComplexMatrix click;
  ComplexMatrix no_click;
};

/// Applies M_n = |0><n| on `rail` with the click weights of `params`. Every
/// n >= 1 clicks with p_real; the rail ends in vacuum on both branches.
inline DetectorBranches detector_branches(const ComplexMatrix& rho, std::span<const int> dims, int rail,
                                          const DetectorRoundParams& params) {
  params.validate();
  if (rail < 0 || static_cast<std::size_t>(rail) >= dims.size()) throw std::invalid_argument("rail index out of range");
  const int d = dims[static_cast<std::size_t>(rail)];
  if (d < 3) throw std::invalid_argument("detector rail must hold at least two photons");

  const int target[] = {rail};
  DetectorBranches out{ComplexMatrix::Zero(rho.rows(), rho.cols()), ComplexMatrix::Zero(rho.rows(), rho.cols())};
  for (int n = 0; n < d; ++n) {
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    m(0, n) = 1.0;
    const ComplexMatrix full = embed_operator(m, dims, target);
    const ComplexMatrix projected = full * rho * full.adjoint();
    const double p_click = n == 0 ? params.p_dark : params.p_real;
    out.click += p_click * projected;
    out.no_click += (1.0 - p_click) * projected;
  }
  return out;
}

inline std::pair<MeasurementOutcome, MeasurementOutcome> detector_measure(const DensityMatrix& rho, int rail,
                                                                          const DetectorRoundParams& params) {
  const auto branches = detector_branches(rho.matrix(), rho.dims(), rail, params);
  auto make = [&](ClickLabel label, const ComplexMatrix& m) {
    MeasurementOutcome o;
    o.label = label;
    o.probability = std::max(0.0, m.trace().real());
    if (o.probability > 0.0) o.post_state = DensityMatrix::normalized(rho.dims(), m);
    return o;
  };
  return {make(ClickLabel::click, branches.click), make(ClickLabel::no_click, branches.no_click)};
}

/// Two-round (click, click) fidelity to |O+> limited by dark counts.
inline double f_det_closed_form(const DetectorRoundParams& round1, const DetectorRoundParams& round2) {
  round1.validate();
  round2.validate();
  const double d1 = round1.p_dark, d2 = round2.p_dark, r1 = round1.p_real, r2 = round2.p_real;
  const double numerator = 3 * d1 * d2 + d1 * r2 + 4 * r1 * r2;
  const double denominator = 11 * d1 * d2 + 8 * d2 * r1 + 9 * d1 * r2 + 4 * r1 * r2;
  if (denominator == 0.0) throw std::domain_error("dark-count fidelity undefined: no click is possible");
  return numerator / denominator;
}

// ---------------------------------------------------------------------------
// Readout threshold trade-off
//
// The detector-qubit readout yields unit-variance Gaussians: the |g>
// population centred at 0 and the |e> population at `separation`. A shot
// is a click when the signal exceeds the threshold. `base` holds the
// intrinsic qubit-excitation probabilities without and with a photon.

struct ThresholdedRates {
  double p_dark_eff = 0.0;
  double p_click_eff = 0.0;
  double ratio = 0.0;  ///< p_dark_eff / p_click_eff
};

inline double gaussian_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

inline ThresholdedRates readout_threshold_model(double separation, double threshold, const DetectorRoundParams& base) {
  base.validate();
  const double click_given_e = gaussian_tail(threshold - separation);
  const double click_given_g = gaussian_tail(threshold);
  ThresholdedRates r;
  r.p_dark_eff = base.p_dark * click_given_e + (1.0 - base.p_dark) * click_given_g;
  r.p_click_eff = base.p_real * click_given_e + (1.0 - base.p_real) * click_given_g;
  r.ratio = r.p_click_eff > 0.0 ? r.p_dark_eff / r.p_click_eff : std::numeric_limits<double>::quiet_NaN();
  return r;
}

/// Separation for which the midpoint threshold gives `target_ratio`.
/// Reachable ratios lie in (p_dark / p_real, 1).
inline double calibrate_separation(const DetectorRoundParams& base, double target_ratio) {
  base.validate();
  const double floor = base.p_real > 0 ? base.p_dark / base.p_real : 1.0;
  if (!(target_ratio > floor && target_ratio < 1.0))
    throw std::invalid_argument("target ratio is not reachable for these base parameters");
  double lo = 0.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    // The midpoint ratio falls monotonically with separation.
    if (readout_threshold_model(mid, mid / 2, base).ratio > target_ratio) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace rement
