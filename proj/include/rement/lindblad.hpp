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

// Open-system dynamics of the photon detector.
//
// The cascaded model couples an emitter cavity (holding the flying photon
// at t = 0) unidirectionally into a detector cavity that is dispersively
// coupled to a two-level detector qubit. A number-selective Gaussian pulse
// flips the qubit when the detector cavity holds one photon.
//
// Rates and frequencies are given as f = rate / 2pi in MHz, times in ns.
// Internally everything is in rad/ns.

#include "rement/parallel.hpp"
#include "rement/photonics.hpp"
#include "rement/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rement {

/// MHz (rate / 2pi) to rad/ns.
inline constexpr double mhz_to_rad_per_ns(double f) { return 2 * M_PI * f * 1e-3; }

struct GaussianPulse {
  double sigma = 120.0;         ///< ns
  double total_length = 480.0;  ///< ns, centred window
  double start_time = 0.0;      ///< ns, relative to photon release
  /// Peak Rabi rate (MHz). Empty means: area pi over the truncated window.
  std::optional<double> amplitude;

  double centre() const { return start_time + total_length / 2; }
  double end_time() const { return start_time + total_length; }

  /// Peak Rabi rate in rad/ns.
  double peak_rate() const {
    if (amplitude) return mhz_to_rad_per_ns(*amplitude);
    const double half = total_length / 2;
    const double area = sigma * std::sqrt(2 * M_PI) * std::erf(half / (sigma * std::sqrt(2.0)));
    return M_PI / area;
  }

  /// Rabi rate in rad/ns at time t.
  double rate(double t) const {
    if (t < start_time || t > end_time()) return 0.0;
    const double x = (t - centre()) / sigma;
    return peak_rate() * std::exp(-0.5 * x * x);
  }

  void validate() const {
    if (!(sigma > 0)) throw std::invalid_argument("pulse sigma must be positive");
    if (!(total_length > 0)) throw std::invalid_argument("pulse length must be positive");
    if (!std::isfinite(start_time)) throw std::invalid_argument("pulse start must be finite");
    if (amplitude && !std::isfinite(*amplitude)) throw std::invalid_argument("pulse amplitude must be finite");
  }
};

struct CascadedSystemParams {
  double kappa_A = 0.9;  ///< MHz
  double kappa_D = 0.9;  ///< MHz
  double chi_D = 3.0;    ///< MHz
  int emitter_dim = 3;
  int detector_cavity_dim = 4;
  GaussianPulse pulse;
  /// Drive frequency relative to the bare qubit transition, MHz. Empty
  /// means the one-photon line at -chi_D.
  std::optional<double> detuning;
  double dt = 1.0;  ///< ns

  double drive_detuning() const { return detuning ? *detuning : -chi_D; }

  void validate() const {
    if (!(kappa_A >= 0) || !(kappa_D > 0)) throw std::invalid_argument("cavity rates must be positive");
    if (!std::isfinite(chi_D)) throw std::invalid_argument("dispersive shift must be finite");
    if (emitter_dim < 3) throw std::invalid_argument("emitter cavity needs at least 3 levels");
    if (detector_cavity_dim < 4) throw std::invalid_argument("detector cavity needs at least 4 levels");
    if (!(dt > 0)) throw std::invalid_argument("time step must be positive");
    pulse.validate();
    if (dt > pulse.sigma / 4) throw std::invalid_argument("time step must resolve the pulse (dt <= sigma / 4)");
  }
};

struct TimeTraces {
  std::vector<double> times;  ///< ns
  std::vector<double> n_A;
  std::vector<double> n_D;
  std::vector<double> p_e;
  std::vector<double> pulse;  ///< Rabi rate, MHz

  void write_csv(std::ostream& os) const {
    os << "time_ns,n_A,n_D,p_e,pulse\n";
    os.precision(10);
    for (std::size_t i = 0; i < times.size(); ++i)
      os << times[i] << ',' << n_A[i] << ',' << n_D[i] << ',' << p_e[i] << ',' << pulse[i] << '\n';
  }
};

struct CascadedResult {
  TimeTraces traces;
  double p_click = 0.0;
  double trace_error = 0.0;        ///< |tr rho - 1| at the end
  double guard_population = 0.0;   ///< top detector-cavity level, maximum over time
};

namespace detail {

struct CascadedOperators {
  ComplexMatrix a, d, sigma_plus, n_a, n_d, p_e, guard;
  ComplexMatrix h_static_on, h_static_off;  // with / without emitter coupling
  ComplexMatrix c_on, c_off;
};

inline CascadedOperators cascaded_operators(const CascadedSystemParams& p) {
  const int na = p.emitter_dim, nd = p.detector_cavity_dim;
  const ComplexMatrix ia = ComplexMatrix::Identity(na, na), iq = ComplexMatrix::Identity(2, 2),
                      id = ComplexMatrix::Identity(nd, nd);
  ComplexMatrix sp = ComplexMatrix::Zero(2, 2);
  sp(1, 0) = 1;
  ComplexMatrix pe = ComplexMatrix::Zero(2, 2);
  pe(1, 1) = 1;
  ComplexMatrix top = ComplexMatrix::Zero(nd, nd);
  top(nd - 1, nd - 1) = 1;

  CascadedOperators o;
  o.a = tensor(tensor(annihilation(na), iq), id);
  o.d = tensor(tensor(ia, iq), annihilation(nd));
  o.sigma_plus = tensor(tensor(ia, sp), id);
  o.n_a = o.a.adjoint() * o.a;
  o.n_d = o.d.adjoint() * o.d;
  o.p_e = tensor(tensor(ia, pe), id);
  o.guard = tensor(tensor(ia, iq), top);

  const double ka = mhz_to_rad_per_ns(p.kappa_A), kd = mhz_to_rad_per_ns(p.kappa_D);
  const double chi = mhz_to_rad_per_ns(p.chi_D);
  const ComplexMatrix h_disp = -chi * o.p_e * o.n_d;
  const ComplexMatrix h_casc =
      Complex(0, 0.5) * std::sqrt(ka * kd) * (o.a.adjoint() * o.d - o.a * o.d.adjoint());
  o.c_on = std::sqrt(ka) * o.a + std::sqrt(kd) * o.d;
  o.c_off = std::sqrt(kd) * o.d;
  const Complex half_i(0, 0.5);
  o.h_static_on = h_disp + h_casc - half_i * (o.c_on.adjoint() * o.c_on);
  o.h_static_off = h_disp - half_i * (o.c_off.adjoint() * o.c_off);
  return o;
}

}  // namespace detail

/// Runs the cascaded master equation from min(0, pulse start) to the end
/// of the pulse with fixed-step RK4. The emitter releases its photon at
/// t = 0; before that it is decoupled.
inline CascadedResult cascaded_simulate(int initial_fock, const CascadedSystemParams& params) {
  params.validate();
  if (initial_fock < 0 || initial_fock > 2 || initial_fock >= params.emitter_dim)
    throw std::invalid_argument("initial Fock state must be 0, 1 or 2");
  const auto ops = detail::cascaded_operators(params);
  const Eigen::Index dim = ops.a.rows();
  const double delta = mhz_to_rad_per_ns(params.drive_detuning());

  // Pure-state start: emitter |n>, qubit |g>, detector cavity vacuum.
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  const Eigen::Index start_index = static_cast<Eigen::Index>(initial_fock) * 2 * params.detector_cavity_dim;
  rho(start_index, start_index) = 1.0;

  auto rhs = [&](double t, bool emitting, const ComplexMatrix& r) -> ComplexMatrix {
    const double omega = params.pulse.rate(t);
    ComplexMatrix h = emitting ? ops.h_static_on : ops.h_static_off;
    if (omega != 0.0) {
      const ComplexMatrix drive = std::polar(0.5 * omega, -delta * t) * ops.sigma_plus;
      h += drive + drive.adjoint();
    }
    const ComplexMatrix& c = emitting ? ops.c_on : ops.c_off;
    const ComplexMatrix hr = h * r;
    return Complex(0, -1) * hr + Complex(0, 1) * hr.adjoint() + c * r * c.adjoint();
  };

  CascadedResult out;
  auto record = [&](double t, const ComplexMatrix& r) {
    auto ev = [&](const ComplexMatrix& op) { return (op * r).trace().real(); };
    out.traces.times.push_back(t);
    out.traces.n_A.push_back(ev(ops.n_a));
    out.traces.n_D.push_back(ev(ops.n_d));
    out.traces.p_e.push_back(ev(ops.p_e));
    out.traces.pulse.push_back(params.pulse.rate(t) / mhz_to_rad_per_ns(1.0));
    out.guard_population = std::max(out.guard_population, ev(ops.guard));
  };

  auto integrate = [&](double t0, double t1, bool emitting) {
    if (!(t1 > t0)) return;
    const auto steps = static_cast<long>(std::ceil((t1 - t0) / params.dt - 1e-9));
    const double h = (t1 - t0) / static_cast<double>(steps);
    for (long s = 0; s < steps; ++s) {
      const double t = t0 + h * static_cast<double>(s);
      const ComplexMatrix k1 = rhs(t, emitting, rho);
      const ComplexMatrix k2 = rhs(t + h / 2, emitting, rho + (h / 2) * k1);
      const ComplexMatrix k3 = rhs(t + h / 2, emitting, rho + (h / 2) * k2);
      const ComplexMatrix k4 = rhs(t + h, emitting, rho + h * k3);
      rho += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      record(t0 + h * static_cast<double>(s + 1), rho);
    }
  };

  const double t_begin = std::min(0.0, params.pulse.start_time);
  const double t_end = std::max(0.0, params.pulse.end_time());
  record(t_begin, rho);
  integrate(t_begin, 0.0, false);
  integrate(0.0, t_end, params.kappa_A > 0);

  if (!detail::all_finite(rho)) throw NumericalError("cascaded integration diverged");
  out.trace_error = std::abs(rho.trace().real() - 1.0);
  if (out.trace_error > 1e-8)
    throw NumericalError("cascaded integration lost trace: error " + std::to_string(out.trace_error));
  const double herm = hermiticity_error(rho);
  if (herm > kStructuralTol)
    throw NumericalError("cascaded integration lost Hermiticity: error " + std::to_string(herm));
  const double min_eig = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly)
                             .eigenvalues()
                             .minCoeff();
  if (min_eig < -1e-8) throw NumericalError("cascaded integration lost positivity: eigenvalue " + std::to_string(min_eig));
  if (out.guard_population > 1e-3)
    throw NumericalError("detector cavity truncation reached: guard population " +
                         std::to_string(out.guard_population));
  out.p_click = (ops.p_e * rho).trace().real();
  return out;
}

inline double cascaded_p_click(int initial_fock, const CascadedSystemParams& params) {
  return cascaded_simulate(initial_fock, params).p_click;
}

// ---------------------------------------------------------------------------
// Sensitivity of the one-photon click probability

struct RobustnessEntry {
  std::string parameter;
  double p_minus = 0.0;
  double p_plus = 0.0;
  double max_relative_change = 0.0;
};

struct RobustnessReport {
  double p_nominal = 0.0;
  std::vector<RobustnessEntry> entries;
  double max_relative_change = 0.0;
};

/// Varies, one at a time and by +-variation: the emitter bandwidth against
/// a fixed detector bandwidth, the pulse width (with its window), and the
/// pulse timing (start shifted by variation * sigma).
inline RobustnessReport parameter_robustness(const CascadedSystemParams& params, double variation,
                                             unsigned threads = 1) {
  if (!(variation >= 0 && variation < 1)) throw std::invalid_argument("variation must lie in [0, 1)");
  using Tweak = void (*)(CascadedSystemParams&, double);
  struct Knob {
    const char* name;
    Tweak apply;
  };
  static constexpr Knob knobs[] = {
      {"bandwidth_mismatch", [](CascadedSystemParams& p, double s) { p.kappa_A *= 1 + s; }},
      {"pulse_length",
       [](CascadedSystemParams& p, double s) {
         p.pulse.sigma *= 1 + s;
         p.pulse.total_length *= 1 + s;
       }},
      {"pulse_timing", [](CascadedSystemParams& p, double s) { p.pulse.start_time += s * p.pulse.sigma; }},
  };
  constexpr std::size_t n_knobs = sizeof(knobs) / sizeof(knobs[0]);

  const auto results = parallel_map(2 * n_knobs + 1, threads, [&](std::size_t i) {
    CascadedSystemParams p = params;
    if (i > 0) knobs[(i - 1) / 2].apply(p, (i % 2 == 1) ? -variation : variation);
    return cascaded_p_click(1, p);
  });

  RobustnessReport r;
  r.p_nominal = results[0];
  for (std::size_t k = 0; k < n_knobs; ++k) {
    RobustnessEntry e;
    e.parameter = knobs[k].name;
    e.p_minus = results[2 * k + 1];
    e.p_plus = results[2 * k + 2];
    e.max_relative_change = std::max(std::abs(e.p_minus - r.p_nominal), std::abs(e.p_plus - r.p_nominal)) /
                            r.p_nominal;
    r.max_relative_change = std::max(r.max_relative_change, e.max_relative_change);
    r.entries.push_back(std::move(e));
  }
  return r;
}

enum class PulseAxis { detuning, delay };

/// Click probability against drive detuning (MHz) or pulse start (ns).
inline std::vector<double> pulse_sweep(const CascadedSystemParams& params, int initial_fock, PulseAxis axis,
                                       const std::vector<double>& values, unsigned threads = 1) {
  return parallel_map(values.size(), threads, [&](std::size_t i) {
    CascadedSystemParams p = params;
    if (axis == PulseAxis::detuning) p.detuning = values[i];
    else p.pulse.start_time = values[i];
    return cascaded_p_click(initial_fock, p);
  });
}

// ---------------------------------------------------------------------------
// Damped sideband Rabi oscillation on |f0> <-> |e1> with |e1> -> |e0>

struct SidebandTrace {
  std::vector<double> times;        ///< ns
  std::vector<double> contrast;     ///< p_f - p_e
  std::vector<double> p_click;      ///< eta * P(e1)
};

/// Amplitudes (c_f0, c_e1) under H = (Omega/2)(|e1><f0| + h.c.) with |e1>
/// decaying at kappa. Rates in rad/ns.
inline std::pair<Complex, Complex> sideband_amplitudes(double omega, double kappa, double t) {
  // c_f'' + (kappa/2) c_f' + (omega^2/4) c_f = 0, c_f(0) = 1, c_f'(0) = 0.
  const double g = kappa / 4;
  const Complex w = std::sqrt(Complex(omega * omega / 4 - kappa * kappa / 16, 0));
  const Complex decay = std::exp(-g * t);
  Complex cf, ce;
  if (std::abs(w) < 1e-14) {
    cf = decay * (1.0 + g * t);
    ce = Complex(0, -1) * decay * (omega / 2) * t;
  } else {
    cf = decay * (std::cos(w * t) + g / w * std::sin(w * t));
    ce = Complex(0, -1) * decay * (omega / 2) * std::sin(w * t) / w;
  }
  return {cf, ce};
}

inline SidebandTrace sideband_rabi(double drive_rate, double kappa, double eta, const std::vector<double>& t_grid) {
  if (!(drive_rate >= 0) || !(kappa >= 0)) throw std::invalid_argument("rates must be non-negative");
  if (!(eta >= 0 && eta <= 1)) throw std::invalid_argument("eta must lie in [0, 1]");
  const double om = mhz_to_rad_per_ns(drive_rate), k = mhz_to_rad_per_ns(kappa);
  SidebandTrace out;
  for (double t : t_grid) {
    if (!(t >= 0)) throw std::invalid_argument("sideband times must be non-negative");
    const auto [cf, ce] = sideband_amplitudes(om, k, t);
    const double pf = std::norm(cf), pe1 = std::norm(ce);
    out.times.push_back(t);
    out.contrast.push_back(pf - (1.0 - pf));
    out.p_click.push_back(eta * pe1);
  }
  return out;
}

/// Time of complete transfer out of |f0> (first zero of c_f), ns. Infinite
/// when overdamped.
inline double sideband_pi_time(double drive_rate, double kappa) {
  const double om = mhz_to_rad_per_ns(drive_rate), k = mhz_to_rad_per_ns(kappa);
  const double w2 = om * om / 4 - k * k / 16;
  if (!(w2 > 0)) return std::numeric_limits<double>::infinity();
  const double w = std::sqrt(w2);
  return (M_PI - std::atan(4 * w / k)) / w;
}

/// Drive rate (MHz) giving `pi_time` (ns) at damping `kappa` (MHz).
inline double calibrate_sideband_drive(double pi_time, double kappa) {
  if (!(pi_time > 0)) throw std::invalid_argument("pi time must be positive");
  // pi_time falls monotonically with drive above the critical value.
  double lo = kappa / 2, hi = std::max(1.0, kappa);
  while (sideband_pi_time(hi, kappa) > pi_time) hi *= 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sideband_pi_time(mid, kappa) > pi_time) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace rement
