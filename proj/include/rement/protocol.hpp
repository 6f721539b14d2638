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

// Two-round heralded entanglement on the joint space
// Alice (x) Bob (x) detector rail (x) load rail.
//
// Bob emits into the detector rail and Alice into the load rail. The
// hybrid mixes the two rails; only the detector rail is measured. The load
// rail is never reset: whatever the hybrid routed to it in round one is
// still present when round two starts, and it is traced out at the end.

#include "rement/detector.hpp"
#include "rement/parallel.hpp"
#include "rement/photonics.hpp"
#include "rement/qmath.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rement {

inline constexpr int kAlice = 0;
inline constexpr int kBob = 1;
inline constexpr int kDetectorRail = 2;
inline constexpr int kLoadRail = 3;

struct ProtocolConfig {
  // Preparation cos(theta/2)|g> + e^{i phi} sin(theta/2)|e>.
  double theta_A = M_PI / 2;
  double phi_A = 0.0;
  double theta_B = M_PI / 2;
  double phi_B = -0.3 * M_PI;  // cancels phi_off

  // Echo coherence times and protocol duration, microseconds.
  double t2e_A = 10.0;
  double t2e_B = 16.0;
  double t_seq = 2.5;

  DetectorRoundParams round1{0.006, 0.21};
  DetectorRoundParams round2{0.005, 0.26};

  // Extra transmissivity on the detector rail. p_real already folds in
  // the measured chain loss, so the default adds none.
  double eta_loss = 1.0;

  // Relative phase picked up by Bob's photon before the hybrid, round 1.
  double phi_off = 0.3 * M_PI;

  int n_max = 2;

  double p_init = 0.57;
  double t_rep = 21.0;  // microseconds

  /// Lossless, perfect detector, no decoherence, no offset phase.
  static ProtocolConfig ideal() {
    ProtocolConfig c;
    c.phi_B = 0.0;
    c.phi_off = 0.0;
    c.t_seq = 0.0;
    c.round1 = {0.0, 1.0};
    c.round2 = {0.0, 1.0};
    c.eta_loss = 1.0;
    c.p_init = 1.0;
    return c;
  }

  FockSpaceSpec fock() const { return FockSpaceSpec{n_max}; }

  void validate() const {
    for (double v : {theta_A, phi_A, theta_B, phi_B, phi_off})
      if (!std::isfinite(v)) throw std::invalid_argument("preparation angles must be finite");
    if (!(t2e_A > 0) || !(t2e_B > 0)) throw std::invalid_argument("coherence times must be positive");
    if (!(t_seq >= 0) || !std::isfinite(t_seq)) throw std::invalid_argument("t_seq must be non-negative");
    if (!(t_rep > 0) || !std::isfinite(t_rep)) throw std::invalid_argument("t_rep must be positive");
    if (!(p_init >= 0 && p_init <= 1)) throw std::invalid_argument("p_init must lie in [0, 1]");
    if (!(eta_loss >= 0 && eta_loss <= 1)) throw std::invalid_argument("eta_loss must lie in [0, 1]");
    round1.validate();
    round2.validate();
    fock().validate();
  }
};

enum class Herald { cc = 0, cnc = 1, ncc = 2, ncnc = 3 };

inline constexpr std::array<Herald, 4> kHeralds{Herald::cc, Herald::cnc, Herald::ncc, Herald::ncnc};

inline std::string_view herald_name(Herald h) {
  switch (h) {
    case Herald::cc: return "C,C";
    case Herald::cnc: return "C,NC";
    case Herald::ncc: return "NC,C";
    case Herald::ncnc: return "NC,NC";
  }
  return "?";
}

inline Herald herald_of(bool click1, bool click2) {
  return click1 ? (click2 ? Herald::cc : Herald::cnc) : (click2 ? Herald::ncc : Herald::ncnc);
}

struct Branch {
  double probability = 0.0;
  std::optional<DensityMatrix> state;  ///< two-qubit; empty if probability is 0
};

struct OutcomeTable {
  std::array<Branch, 4> branches;

  const Branch& operator[](Herald h) const { return branches[static_cast<std::size_t>(h)]; }
  Branch& operator[](Herald h) { return branches[static_cast<std::size_t>(h)]; }

  double p_click1() const { return (*this)[Herald::cc].probability + (*this)[Herald::cnc].probability; }

  /// P(click in round 2 | click in round 1); 0 when round 1 never clicks.
  double p_click2_given_click1() const {
    const double p1 = p_click1();
    return p1 > 0 ? (*this)[Herald::cc].probability / p1 : 0.0;
  }

  double total_probability() const {
    double s = 0;
    for (const auto& b : branches) s += b.probability;
    return s;
  }
};

namespace detail {

inline std::vector<int> joint_dims(const FockSpaceSpec& spec) {
  return {2, 2, spec.rail_dim(), spec.rail_dim()};
}

inline ComplexMatrix conjugate_by(const ComplexMatrix& rho, std::span<const int> dims, const ComplexMatrix& u,
                                  std::initializer_list<int> targets) {
  const ComplexMatrix full = embed_operator(u, dims, std::span<const int>(targets.begin(), targets.size()));
  return full * rho * full.adjoint();
}

inline ComplexMatrix prepared_joint_state(const ProtocolConfig& c) {
  const auto spec = c.fock();
  const int d = spec.rail_dim();
  const Ket psi = tensor(tensor(states::qubit(c.theta_A, c.phi_A), states::qubit(c.theta_B, c.phi_B)),
                         tensor(basis_ket(d, 0), basis_ket(d, 0)));
  return psi * psi.adjoint();
}

/// Both qubits emit. The swap acts on whatever the rail holds, so the load
/// rail left over from an earlier round is carried along.
inline ComplexMatrix emit(const ComplexMatrix& rho, std::span<const int> dims, const FockSpaceSpec& spec) {
  const ComplexMatrix u = entangler_unitary(spec);
  ComplexMatrix out = conjugate_by(rho, dims, u, {kBob, kDetectorRail});
  return conjugate_by(out, dims, u, {kAlice, kLoadRail});
}

inline ComplexMatrix hybrid(const ComplexMatrix& rho, std::span<const int> dims, const FockSpaceSpec& spec) {
  return conjugate_by(rho, dims, beam_splitter_unitary(spec), {kDetectorRail, kLoadRail});
}

inline ComplexMatrix pi_pulses(const ComplexMatrix& rho, std::span<const int> dims) {
  const ComplexMatrix ry = pauli::rotation_y(M_PI);
  ComplexMatrix out = conjugate_by(rho, dims, ry, {kAlice});
  return conjugate_by(out, dims, ry, {kBob});
}

/// One detection round on an unnormalized operator.
inline DetectorBranches round(const ComplexMatrix& rho, std::span<const int> dims, const ProtocolConfig& c,
                              const DetectorRoundParams& det, double offset_phase, bool photons) {
  const auto spec = c.fock();
  ComplexMatrix s = photons ? emit(rho, dims, spec) : rho;
  if (offset_phase != 0.0) s = conjugate_by(s, dims, phase_shifter(spec.rail_dim(), offset_phase), {kDetectorRail});
  s = hybrid(s, dims, spec);
  s = loss_channel(s, dims, kDetectorRail, c.eta_loss);
  return detector_branches(s, dims, kDetectorRail, det);
}

inline ComplexMatrix qubits_only(const ComplexMatrix& rho, std::span<const int> dims) {
  const int keep[] = {kAlice, kBob};
  return partial_trace(rho, dims, keep);
}

}  // namespace detail

/// Phase damping on the two qubits (subsystems 0 and 1) of any state.
/// Coherences in qubit q shrink by exp(-duration / t2_q).
inline DensityMatrix apply_phase_damping(const DensityMatrix& rho, double duration, double t2e_A, double t2e_B) {
  if (!(duration >= 0)) throw std::invalid_argument("duration must be non-negative");
  if (!(t2e_A > 0) || !(t2e_B > 0)) throw std::invalid_argument("coherence times must be positive");
  const auto& dims = rho.dims();
  if (dims.size() < 2 || dims[0] != 2 || dims[1] != 2)
    throw std::invalid_argument("phase damping expects qubits as the first two subsystems");
  if (duration == 0.0) return rho;
  ComplexMatrix m = rho.matrix();
  for (auto [qubit, t2] : {std::pair{kAlice, t2e_A}, std::pair{kBob, t2e_B}}) {
    const double alpha = (1 + std::exp(-duration / t2)) / 2;
    const int target[] = {qubit};
    const ComplexMatrix e0 = embed_operator(std::sqrt(alpha) * pauli::identity(), dims, target);
    const ComplexMatrix e1 = embed_operator(std::sqrt(1 - alpha) * pauli::z(), dims, target);
    m = e0 * m * e0.adjoint() + e1 * m * e1.adjoint();
  }
  return DensityMatrix(dims, 0.5 * (m + m.adjoint()));
}

/// Joint state after both qubits, prepared on the equator with zero phase,
/// have emitted into their rails.
inline DensityMatrix ideal_state_after_entangling(const FockSpaceSpec& spec = {}) {
  ProtocolConfig c = ProtocolConfig::ideal();
  c.n_max = spec.n_max;
  const auto dims = detail::joint_dims(spec);
  return DensityMatrix(dims, detail::emit(detail::prepared_joint_state(c), dims, spec));
}

/// The 50/50 hybrid on the two rails of a joint protocol state.
inline DensityMatrix apply_beam_splitter_step(const DensityMatrix& rho) {
  const auto& dims = rho.dims();
  if (dims.size() != 4 || dims[0] != 2 || dims[1] != 2 || dims[2] != dims[3])
    throw std::invalid_argument("expected a joint (qubit, qubit, rail, rail) state");
  return apply_unitary(rho, beam_splitter_unitary(FockSpaceSpec{dims[2] - 1}), {kDetectorRail, kLoadRail});
}

namespace detail {

inline Branch make_branch(const ComplexMatrix& unnormalized, const ProtocolConfig& c) {
  Branch b;
  b.probability = std::max(0.0, unnormalized.trace().real());
  if (b.probability > 0) {
    DensityMatrix rho = DensityMatrix::normalized({2, 2}, unnormalized);
    b.state = apply_phase_damping(rho, c.t_seq, c.t2e_A, c.t2e_B);
  }
  return b;
}

inline OutcomeTable run_sequence(const ProtocolConfig& c, bool photons) {
  c.validate();
  const auto dims = joint_dims(c.fock());
  const ComplexMatrix rho0 = prepared_joint_state(c);

  const auto first = round(rho0, dims, c, c.round1, c.phi_off, photons);
  OutcomeTable table;
  for (bool click1 : {true, false}) {
    const ComplexMatrix after1 = pi_pulses(click1 ? first.click : first.no_click, dims);
    const auto second = round(after1, dims, c, c.round2, 0.0, photons);
    for (bool click2 : {true, false})
      table[herald_of(click1, click2)] = make_branch(qubits_only(click2 ? second.click : second.no_click, dims), c);
  }
  return table;
}

}  // namespace detail

/// The full two-round protocol with all four heralding branches.
inline OutcomeTable run_two_rounds(const ProtocolConfig& config) { return detail::run_sequence(config, true); }

/// Weights of the round-one click state on (|O+>, |ee>, |gg>, |O->).
inline std::array<double, 4> rho3_click_weights(const ProtocolConfig& c) {
  c.validate();
  const auto dims = detail::joint_dims(c.fock());
  const auto first = detail::round(detail::prepared_joint_state(c), dims, c, c.round1, c.phi_off, true);
  const double p = first.click.trace().real();
  if (!(p > 0)) throw std::domain_error("round one never clicks for this configuration");
  const ComplexMatrix rho = detail::qubits_only(first.click, dims) / p;
  const std::array<Ket, 4> basis{states::odd_bell_plus(), states::ee(), states::gg(), states::odd_bell_minus()};
  std::array<double, 4> w{};
  for (std::size_t k = 0; k < 4; ++k) w[k] = state_fidelity(rho, basis[k]);
  return w;
}

/// Same pulse sequence with no photon emission and no post-selection.
inline DensityMatrix run_control(const ProtocolConfig& config) {
  const OutcomeTable t = detail::run_sequence(config, false);
  ComplexMatrix sum = ComplexMatrix::Zero(4, 4);
  for (const auto& b : t.branches)
    if (b.state) sum += b.probability * b.state->matrix();
  return DensityMatrix::normalized({2, 2}, sum);
}

struct SuccessRate {
  double p_success = 0.0;
  double rate = 0.0;  ///< heralded pairs per second
};

/// `t_rep` in microseconds.
inline SuccessRate success_rate(double p_init, double p_click1, double p_click2, double t_rep) {
  if (!(t_rep > 0)) throw std::invalid_argument("t_rep must be positive");
  for (double p : {p_init, p_click1, p_click2})
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument("probabilities must lie in [0, 1]");
  SuccessRate r;
  r.p_success = p_init * p_click1 * p_click2;
  r.rate = r.p_success / (t_rep * 1e-6);
  return r;
}

inline SuccessRate success_rate(const ProtocolConfig& c) {
  const OutcomeTable t = run_two_rounds(c);
  return success_rate(c.p_init, t.p_click1(), t.p_click2_given_click1(), c.t_rep);
}

/// Fidelity of |O+> after `t_seq` of phase damping alone.
inline double decoherence_fidelity(const ProtocolConfig& c) {
  const auto bell = DensityMatrix::from_ket({2, 2}, states::odd_bell_plus());
  return state_fidelity(apply_phase_damping(bell, c.t_seq, c.t2e_A, c.t2e_B), states::odd_bell_plus());
}

// ---------------------------------------------------------------------------
// Parameter sweeps

enum class SweepAxis { theta_A, phi_A, theta_B, phi_B, phi_off, eta_loss, t_seq };

inline std::string_view axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::theta_A: return "theta_A";
    case SweepAxis::phi_A: return "phi_A";
    case SweepAxis::theta_B: return "theta_B";
    case SweepAxis::phi_B: return "phi_B";
    case SweepAxis::phi_off: return "phi_off";
    case SweepAxis::eta_loss: return "eta_loss";
    case SweepAxis::t_seq: return "t_seq";
  }
  return "?";
}

inline SweepAxis parse_axis(std::string_view name) {
  for (auto a : {SweepAxis::theta_A, SweepAxis::phi_A, SweepAxis::theta_B, SweepAxis::phi_B, SweepAxis::phi_off,
                 SweepAxis::eta_loss, SweepAxis::t_seq})
    if (axis_name(a) == name) return a;
  throw std::invalid_argument("unknown sweep axis '" + std::string(name) + "'");
}

inline ProtocolConfig with_axis(ProtocolConfig c, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::theta_A: c.theta_A = value; break;
    case SweepAxis::phi_A: c.phi_A = value; break;
    case SweepAxis::theta_B: c.theta_B = value; break;
    case SweepAxis::phi_B: c.phi_B = value; break;
    case SweepAxis::phi_off: c.phi_off = value; break;
    case SweepAxis::eta_loss: c.eta_loss = value; break;
    case SweepAxis::t_seq: c.t_seq = value; break;
  }
  return c;
}

struct SweepPoint {
  double value = 0.0;
  double p_cc = 0.0;
  std::optional<PauliVector> pauli;  ///< of the (C,C) branch
  double concurrence = 0.0;
};

inline std::vector<SweepPoint> sweep(const ProtocolConfig& config, SweepAxis axis, const std::vector<double>& values,
                                     unsigned threads = 1) {
  return parallel_map(values.size(), threads, [&](std::size_t i) {
    const OutcomeTable t = run_two_rounds(with_axis(config, axis, values[i]));
    const Branch& b = t[Herald::cc];
    SweepPoint p;
    p.value = values[i];
    p.p_cc = b.probability;
    if (b.state) {
      p.pauli = pauli_decompose(*b.state);
      p.concurrence = concurrence(*b.state);
    }
    return p;
  });
}

}  // namespace rement
