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

// JSON run configuration and result serialization.

#include "rement/lindblad.hpp"
#include "rement/protocol.hpp"
#include "rement/sampler.hpp"
#include "rement/tomography.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace rement {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

/// Malformed or out-of-range configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  ProtocolConfig protocol;
  std::uint64_t shots = 200000;
  std::uint64_t seed = 1;
  std::uint64_t shots_per_setting = 200000;
  AssignmentMatrix assignment = AssignmentMatrix::measured();
  /// Where the assignment matrix came from: "measured", "identity",
  /// "inline" or a file path.
  std::string assignment_source = "measured";
  CascadedSystemParams cascade;
};

namespace detail {

inline void reject_unknown(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
void read(const Json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  if constexpr (std::is_integral_v<T>) {
    const auto& v = j.at(key);
    if (!v.is_number_integer() || (std::is_unsigned_v<T> && !v.is_number_unsigned()))
      throw ConfigError(where + "." + key + " must be a " + (std::is_unsigned_v<T> ? "non-negative " : "") + "integer");
  }
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

inline void read_optional(const Json& j, const char* key, std::optional<double>& out, const std::string& where) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
    return;
  }
  double v = 0;
  read(j, key, v, where);
  out = v;
}

inline Eigen::Matrix4d matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) throw ConfigError(where + " must be a 4x4 array of rows");
  Eigen::Matrix4d a;
  for (int r = 0; r < 4; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (!row.is_array() || row.size() != 4) throw ConfigError(where + " must be a 4x4 array of rows");
    for (int c = 0; c < 4; ++c) {
      const auto& v = row.at(static_cast<std::size_t>(c));
      if (!v.is_number()) throw ConfigError(where + " entries must be numbers");
      a(r, c) = v.get<double>();
    }
  }
  return a;
}

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace detail

inline Json matrix_to_json(const Eigen::Matrix4d& a) {
  Json rows = Json::array();
  for (int r = 0; r < 4; ++r) rows.push_back({a(r, 0), a(r, 1), a(r, 2), a(r, 3)});
  return rows;
}

/// Calibration document: {"schema_version", "basis", "A"} with row-major A.
inline AssignmentMatrix assignment_from_json(const Json& j) {
  detail::reject_unknown(j, "calibration", {"schema_version", "basis", "A"});
  if (j.contains("basis") && j.at("basis") != Json(kOutcomeLabels))
    throw ConfigError("calibration basis must be [GG, GE, EG, EE]");
  if (!j.contains("A")) throw ConfigError("calibration has no A matrix");
  try {
    return AssignmentMatrix(detail::matrix_from_json(j.at("A"), "calibration.A"));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("calibration: ") + e.what());
  }
}

inline Json assignment_to_json(const AssignmentMatrix& a) {
  return Json{{"schema_version", kSchemaVersion}, {"basis", kOutcomeLabels}, {"A", matrix_to_json(a.matrix())}};
}

/// Builds a run configuration; relative file references resolve against
/// `base_dir`.
inline RunConfig run_config_from_json(const Json& j, const std::filesystem::path& base_dir = {}) {
  using detail::read;
  using detail::reject_unknown;
  RunConfig rc;
  auto& p = rc.protocol;
  reject_unknown(j, "config",
                 {"schema_version", "preparation", "decoherence", "detector", "loss", "timing", "sampling",
                  "tomography", "fock", "cascade"});
  if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion)
    throw ConfigError("unsupported schema_version");

  if (j.contains("preparation")) {
    const auto& s = j.at("preparation");
    reject_unknown(s, "preparation", {"theta_A", "phi_A", "theta_B", "phi_B", "phi_off"});
    read(s, "theta_A", p.theta_A, "preparation");
    read(s, "phi_A", p.phi_A, "preparation");
    read(s, "theta_B", p.theta_B, "preparation");
    read(s, "phi_B", p.phi_B, "preparation");
    read(s, "phi_off", p.phi_off, "preparation");
  }
  if (j.contains("decoherence")) {
    const auto& s = j.at("decoherence");
    reject_unknown(s, "decoherence", {"t2e_A", "t2e_B", "t_seq"});
    read(s, "t2e_A", p.t2e_A, "decoherence");
    read(s, "t2e_B", p.t2e_B, "decoherence");
    read(s, "t_seq", p.t_seq, "decoherence");
  }
  if (j.contains("detector")) {
    const auto& s = j.at("detector");
    reject_unknown(s, "detector", {"round1", "round2"});
    for (auto [key, target] : {std::pair{"round1", &p.round1}, std::pair{"round2", &p.round2}}) {
      if (!s.contains(key)) continue;
      const std::string where = std::string("detector.") + key;
      reject_unknown(s.at(key), where, {"p_dark", "p_real"});
      read(s.at(key), "p_dark", target->p_dark, where);
      read(s.at(key), "p_real", target->p_real, where);
    }
  }
  if (j.contains("loss")) {
    reject_unknown(j.at("loss"), "loss", {"eta"});
    read(j.at("loss"), "eta", p.eta_loss, "loss");
  }
  if (j.contains("timing")) {
    reject_unknown(j.at("timing"), "timing", {"t_rep", "p_init"});
    read(j.at("timing"), "t_rep", p.t_rep, "timing");
    read(j.at("timing"), "p_init", p.p_init, "timing");
  }
  if (j.contains("fock")) {
    reject_unknown(j.at("fock"), "fock", {"n_max"});
    read(j.at("fock"), "n_max", p.n_max, "fock");
  }
  if (j.contains("sampling")) {
    reject_unknown(j.at("sampling"), "sampling", {"shots", "seed"});
    read(j.at("sampling"), "shots", rc.shots, "sampling");
    read(j.at("sampling"), "seed", rc.seed, "sampling");
  }
  if (j.contains("tomography")) {
    const auto& s = j.at("tomography");
    reject_unknown(s, "tomography", {"assignment", "assignment_file", "assignment_source", "shots_per_setting"});
    read(s, "shots_per_setting", rc.shots_per_setting, "tomography");
    if (s.contains("assignment") && s.contains("assignment_file"))
      throw ConfigError("tomography: give either assignment or assignment_file, not both");
    try {
      if (s.contains("assignment")) {
        const auto& a = s.at("assignment");
        if (a == "measured") {
          rc.assignment = AssignmentMatrix::measured();
          rc.assignment_source = "measured";
        } else if (a == "identity") {
          rc.assignment = AssignmentMatrix::identity();
          rc.assignment_source = "identity";
        } else {
          rc.assignment = AssignmentMatrix(detail::matrix_from_json(a, "tomography.assignment"));
          rc.assignment_source = "inline";
          // Echoed configs carry the original source as a label.
          read(s, "assignment_source", rc.assignment_source, "tomography");
        }
      } else if (s.contains("assignment_file")) {
        std::filesystem::path file = s.at("assignment_file").get<std::string>();
        if (file.is_relative()) file = base_dir / file;
        rc.assignment = assignment_from_json(detail::read_json_file(file));
        rc.assignment_source = file.string();
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("tomography: ") + e.what());
    }
  }
  if (j.contains("cascade")) {
    const auto& s = j.at("cascade");
    auto& c = rc.cascade;
    reject_unknown(s, "cascade",
                   {"kappa_A", "kappa_D", "chi_D", "emitter_dim", "detector_cavity_dim", "sigma", "total_length",
                    "start_time", "amplitude", "detuning", "dt"});
    read(s, "kappa_A", c.kappa_A, "cascade");
    read(s, "kappa_D", c.kappa_D, "cascade");
    read(s, "chi_D", c.chi_D, "cascade");
    read(s, "emitter_dim", c.emitter_dim, "cascade");
    read(s, "detector_cavity_dim", c.detector_cavity_dim, "cascade");
    read(s, "sigma", c.pulse.sigma, "cascade");
    read(s, "total_length", c.pulse.total_length, "cascade");
    read(s, "start_time", c.pulse.start_time, "cascade");
    detail::read_optional(s, "amplitude", c.pulse.amplitude, "cascade");
    detail::read_optional(s, "detuning", c.detuning, "cascade");
    read(s, "dt", c.dt, "cascade");
  }

  try {
    p.validate();
    rc.cascade.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return rc;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from_json(detail::read_json_file(path), path.parent_path());
}

/// Fully resolved configuration, defaults materialized.
inline Json to_json(const RunConfig& rc) {
  const auto& p = rc.protocol;
  const auto& c = rc.cascade;
  Json tomo{{"shots_per_setting", rc.shots_per_setting}, {"assignment_source", rc.assignment_source},
            {"assignment", matrix_to_json(rc.assignment.matrix())}};
  return Json{
      {"schema_version", kSchemaVersion},
      {"preparation",
       {{"theta_A", p.theta_A}, {"phi_A", p.phi_A}, {"theta_B", p.theta_B}, {"phi_B", p.phi_B}, {"phi_off", p.phi_off}}},
      {"decoherence", {{"t2e_A", p.t2e_A}, {"t2e_B", p.t2e_B}, {"t_seq", p.t_seq}}},
      {"detector",
       {{"round1", {{"p_dark", p.round1.p_dark}, {"p_real", p.round1.p_real}}},
        {"round2", {{"p_dark", p.round2.p_dark}, {"p_real", p.round2.p_real}}}}},
      {"loss", {{"eta", p.eta_loss}}},
      {"timing", {{"t_rep", p.t_rep}, {"p_init", p.p_init}}},
      {"sampling", {{"shots", rc.shots}, {"seed", rc.seed}}},
      {"tomography", tomo},
      {"fock", {{"n_max", p.n_max}}},
      {"cascade",
       {{"kappa_A", c.kappa_A},
        {"kappa_D", c.kappa_D},
        {"chi_D", c.chi_D},
        {"emitter_dim", c.emitter_dim},
        {"detector_cavity_dim", c.detector_cavity_dim},
        {"sigma", c.pulse.sigma},
        {"total_length", c.pulse.total_length},
        {"start_time", c.pulse.start_time},
        {"amplitude", c.pulse.amplitude ? Json(*c.pulse.amplitude) : Json(nullptr)},
        {"detuning", c.drive_detuning()},
        {"dt", c.dt}}},
  };
}

// ---------------------------------------------------------------------------
// Counts documents

inline PreRotation parse_pre_rotation(const std::string& name) {
  for (auto r : {PreRotation::id, PreRotation::ry90, PreRotation::rx90})
    if (pre_rotation_name(r) == name) return r;
  throw ConfigError("unknown pre-rotation '" + name + "'");
}

/// {"schema_version", "basis", "settings": [{"alice", "bob", "counts"}]}
/// with exactly nine settings.
inline std::pair<CountsTable, TomographySettings> counts_from_json(const Json& j) {
  detail::reject_unknown(j, "counts", {"schema_version", "basis", "settings"});
  if (j.contains("basis") && j.at("basis") != Json(kOutcomeLabels))
    throw ConfigError("counts basis must be [GG, GE, EG, EE]");
  if (!j.contains("settings") || !j.at("settings").is_array() || j.at("settings").size() != 9)
    throw ConfigError("counts must list exactly nine settings");
  CountsTable table;
  TomographySettings settings;
  for (std::size_t k = 0; k < 9; ++k) {
    const auto& s = j.at("settings").at(k);
    const std::string where = "counts.settings[" + std::to_string(k) + "]";
    detail::reject_unknown(s, where, {"alice", "bob", "counts"});
    try {
      settings.settings[k] = {parse_pre_rotation(s.at("alice").get<std::string>()),
                              parse_pre_rotation(s.at("bob").get<std::string>())};
      const auto& c = s.at("counts");
      if (!c.is_array() || c.size() != 4) throw ConfigError(where + ".counts must have four entries");
      for (std::size_t o = 0; o < 4; ++o) {
        if (!c.at(o).is_number_unsigned()) throw ConfigError(where + ".counts must be non-negative integers");
        table.counts[k][o] = c.at(o).get<std::uint64_t>();
      }
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(where + " is malformed");
    }
  }
  return {table, settings};
}

inline Json counts_to_json(const CountsTable& table, const TomographySettings& settings) {
  Json list = Json::array();
  for (std::size_t k = 0; k < 9; ++k)
    list.push_back({{"alice", pre_rotation_name(settings.settings[k].alice)},
                    {"bob", pre_rotation_name(settings.settings[k].bob)},
                    {"counts", table.counts[k]}});
  return Json{{"schema_version", kSchemaVersion}, {"basis", kOutcomeLabels}, {"settings", list}};
}

// ---------------------------------------------------------------------------
// Results

inline Json pauli_to_json(const PauliVector& v) {
  Json comps = Json::object();
  for (std::size_t i = 0; i < 16; ++i) comps[PauliVector::label(i)] = v.components[i];
  Json out{{"components", comps}};
  if (v.sigma) {
    Json sig = Json::object();
    for (std::size_t i = 0; i < 16; ++i) sig[PauliVector::label(i)] = (*v.sigma)[i];
    out["sigma"] = sig;
  }
  return out;
}

inline Json fidelity_to_json(const FidelityEstimate& e) {
  return Json{{"fidelity", e.fidelity},
              {"sigma_fidelity", e.sigma_fidelity},
              {"concurrence", e.concurrence},
              {"sigma_concurrence", e.sigma_concurrence},
              {"physical", e.physical}};
}

inline Json frequency_to_json(const Frequency& f) {
  return Json{{"value", f.value}, {"sigma", f.sigma}, {"successes", f.successes}, {"trials", f.trials}};
}

}  // namespace rement
