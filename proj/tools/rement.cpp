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

// rement: command-line front end for the remote-entanglement simulator.
//
//   rement protocol     [--config F] [--shots N --seed S] [--out F]
//   rement sweep        --axis A --from X --to Y --points K [--out F]
//   rement detector-sim --fock N [--sweep detuning|delay ...] [--out F]
//   rement tomo         --counts F [--cal F] [--target O+|O-] [--out F]
//   rement defaults
//
// Exit codes: 0 success, 2 configuration or usage error, 3 numerical error.

#include "rement/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace rement;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr const char* kDefaultConfigName = "rement.json";

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Explicit path, or rement.json in $REMENT_CONFIG_DIR, or built-in defaults.
RunConfig resolve_config(const std::string& path) {
  const char* dir = std::getenv("REMENT_CONFIG_DIR");
  if (!path.empty()) {
    fs::path p = path;
    if (p.is_relative() && !fs::exists(p) && dir) p = fs::path(dir) / p;
    return load_run_config(p);
  }
  if (dir) {
    const fs::path p = fs::path(dir) / kDefaultConfigName;
    if (fs::exists(p)) return load_run_config(p);
  }
  return RunConfig{};
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw UsageError("cannot write " + out);
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::vector<double> linspace(double from, double to, int points) {
  if (points < 1) throw UsageError("--points must be at least 1");
  std::vector<double> v;
  for (int i = 0; i < points; ++i) v.push_back(points == 1 ? from : from + (to - from) * i / (points - 1));
  return v;
}

Ket target_ket(const std::string& name) {
  if (name == "O+") return states::odd_bell_plus();
  if (name == "O-") return states::odd_bell_minus();
  throw UsageError("--target must be O+ or O-");
}

Json branch_json(const Branch& b, Herald h) {
  Json j{{"herald", herald_name(h)}, {"probability", b.probability}};
  if (b.state) {
    j["pauli"] = pauli_to_json(pauli_decompose(*b.state));
    j["fidelity"] = state_fidelity(*b.state, states::odd_bell_plus());
    j["concurrence"] = concurrence(*b.state);
  } else {
    j["state"] = nullptr;
  }
  return j;
}

// ---------------------------------------------------------------------------

int cmd_protocol(const std::string& config_path, std::optional<std::uint64_t> shots, std::optional<std::uint64_t> seed,
                 const std::string& out, unsigned threads) {
  RunConfig rc = resolve_config(config_path);
  if (shots) rc.shots = *shots;
  if (seed) rc.seed = *seed;
  const auto& p = rc.protocol;

  const OutcomeTable table = run_two_rounds(p);
  Json outcomes = Json::array();
  for (Herald h : kHeralds) outcomes.push_back(branch_json(table[h], h));

  const Branch& cc = table[Herald::cc];
  Json theory{{"fidelity", cc.state ? Json(state_fidelity(*cc.state, states::odd_bell_plus())) : Json(nullptr)},
              {"concurrence", cc.state ? Json(concurrence(*cc.state)) : Json(nullptr)}};
  Json budget = Json::object();
  try {
    budget["f_det"] = f_det_closed_form(p.round1, p.round2);
  } catch (const std::domain_error&) {
    budget["f_det"] = nullptr;
  }
  budget["f_t2"] = decoherence_fidelity(p);
  Json rho3 = nullptr;
  if (table.p_click1() > 0) {
    const auto w = rho3_click_weights(p);
    rho3 = {{"O+", w[0]}, {"ee", w[1]}, {"gg", w[2]}, {"O-", w[3]}};
  }
  const SuccessRate sr = success_rate(p.p_init, table.p_click1(), table.p_click2_given_click1(), p.t_rep);

  Json j{{"schema_version", kSchemaVersion},
         {"command", "protocol"},
         {"config", to_json(rc)},
         {"mode", shots ? "sampled" : "analytic"},
         {"outcomes", outcomes},
         {"fidelity_theory", theory},
         {"fidelity_budget", budget},
         {"rho3_click_weights", rho3},
         {"success", {{"p_click1", table.p_click1()},
                      {"p_click2_given_click1", table.p_click2_given_click1()},
                      {"p_success", sr.p_success},
                      {"rate_per_s", sr.rate}}}};

  if (shots) {
    const auto settings = TomographySettings::standard(0);
    const auto records = sample_shots(p, settings, rc.assignment, rc.shots, rc.seed, threads);
    const RunSummary s = aggregate(records, settings, &rc.assignment);
    Json sampled{{"shots", s.shots},
                 {"p_init_hat", frequency_to_json(s.p_init_hat)},
                 {"p_click1_hat", frequency_to_json(s.p_click1_hat)},
                 {"p_click2_hat", frequency_to_json(s.p_click2_hat)},
                 {"p_success_hat", frequency_to_json(s.p_success_hat)},
                 {"branch_counts", s.branch_counts},
                 {"post_selected_counts", counts_to_json(s.post_selected_counts(), settings)}};
    if (s.pauli) {
      sampled["pauli"] = pauli_to_json(*s.pauli);
      sampled["metrics"] = fidelity_to_json(fidelity_with_errors(*s.pauli, states::odd_bell_plus()));
    } else {
      sampled["pauli"] = nullptr;
    }
    j["sampled"] = sampled;
  }
  emit(out, dump(j));
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& axis, double from, double to, int points,
              const std::string& out, unsigned threads) {
  const RunConfig rc = resolve_config(config_path);
  const SweepAxis a = parse_axis(axis);
  const auto values = linspace(from, to, points);
  const auto result = sweep(rc.protocol, a, values, threads);
  std::ostringstream os;
  os.precision(12);
  os << axis_name(a);
  for (std::size_t i = 0; i < 16; ++i) os << ',' << PauliVector::label(i);
  os << ",p_cc\n";
  for (const auto& pt : result) {
    os << pt.value;
    for (std::size_t i = 0; i < 16; ++i) {
      os << ',';
      if (pt.pauli) os << pt.pauli->components[i];
    }
    os << ',' << pt.p_cc << '\n';
  }
  emit(out, os.str());
  return 0;
}

int cmd_detector_sim(const std::string& config_path, int fock, const std::string& sweep_axis, double from, double to,
                     int points, const std::string& out, const std::string& summary_out, unsigned threads) {
  const RunConfig rc = resolve_config(config_path);
  if (fock < 0 || fock > 2) throw UsageError("--fock must be 0, 1 or 2");
  const auto& params = rc.cascade;
  Json summary{{"schema_version", kSchemaVersion}, {"command", "detector-sim"}, {"config", to_json(rc)},
               {"fock", fock}};
  std::ostringstream os;
  os.precision(10);
  if (sweep_axis.empty()) {
    const CascadedResult r = cascaded_simulate(fock, params);
    r.traces.write_csv(os);
    summary["p_click"] = r.p_click;
    summary["dark_count"] = fock == 0 ? r.p_click : cascaded_p_click(0, params);
    summary["trace_error"] = r.trace_error;
    summary["guard_population"] = r.guard_population;
  } else {
    PulseAxis axis;
    if (sweep_axis == "detuning") axis = PulseAxis::detuning;
    else if (sweep_axis == "delay") axis = PulseAxis::delay;
    else throw UsageError("--sweep must be detuning or delay");
    const auto values = linspace(from, to, points);
    const auto p = pulse_sweep(params, fock, axis, values, threads);
    os << (axis == PulseAxis::detuning ? "detuning_mhz" : "delay_ns") << ",p_click\n";
    std::size_t best = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      os << values[i] << ',' << p[i] << '\n';
      if (p[i] > p[best]) best = i;
    }
    summary["sweep"] = sweep_axis;
    summary["argmax"] = values[best];
    summary["max_p_click"] = p[best];
  }
  emit(out, os.str());
  if (!summary_out.empty()) emit(summary_out, dump(summary));
  else if (!out.empty() && out != "-") std::cout << dump(summary);
  return 0;
}

int cmd_tomo(const std::string& counts_path, const std::string& cal_path, const std::string& target,
             int bootstrap, std::uint64_t seed, const std::string& out) {
  const auto [counts, settings] = counts_from_json(detail::read_json_file(counts_path));
  const AssignmentMatrix a =
      cal_path.empty() ? AssignmentMatrix::identity() : assignment_from_json(detail::read_json_file(cal_path));
  const Ket psi = target_ket(target);
  for (std::size_t k = 0; k < 9; ++k)
    if (counts.shots(k) == 0) throw ConfigError("setting " + std::to_string(k) + " has no counts");
  const PauliVector raw = reconstruct_pauli(counts, settings, nullptr);
  const PauliVector corrected = reconstruct_pauli(counts, settings, &a);
  Json j{{"schema_version", kSchemaVersion},
         {"command", "tomo"},
         {"target", target},
         {"calibration", assignment_to_json(a)},
         {"raw", {{"pauli", pauli_to_json(raw)}, {"metrics", fidelity_to_json(fidelity_with_errors(raw, psi))}}},
         {"corrected",
          {{"pauli", pauli_to_json(corrected)}, {"metrics", fidelity_to_json(fidelity_with_errors(corrected, psi))}}}};
  if (bootstrap > 0) {
    const auto [sf, sc] = bootstrap_errors(counts, settings, &a, psi, bootstrap, seed);
    j["corrected"]["bootstrap"] = {{"resamples", bootstrap}, {"seed", seed}, {"sigma_fidelity", sf},
                                   {"sigma_concurrence", sc}};
  }
  emit(out, dump(j));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heralded remote-entanglement simulator"};
  app.require_subcommand(1);
  std::string config_path, out;
  unsigned threads = default_thread_count();

  auto* proto = app.add_subcommand("protocol", "Two-round protocol: branches, fidelities, success rate");
  std::optional<std::uint64_t> shots, seed;
  bool analytic = false;
  proto->add_option("--config", config_path, "Run configuration (JSON)");
  proto->add_flag("--analytic", analytic, "Analytic branch propagation only (default)");
  auto* shots_opt = proto->add_option("--shots", shots, "Also run a Monte Carlo with this many shots");
  proto->add_option("--seed", seed, "Monte Carlo seed")->needs(shots_opt);
  proto->add_option("--out", out, "Output JSON file (default stdout)");
  proto->add_option("--threads", threads, "Worker cap")->check(CLI::PositiveNumber);
  shots_opt->excludes(proto->get_option("--analytic"));

  auto* sw = app.add_subcommand("sweep", "Pauli vector of the (C,C) branch along one parameter");
  std::string axis;
  double from = 0, to = 0;
  int points = 0;
  sw->add_option("--config", config_path, "Run configuration (JSON)");
  sw->add_option("--axis", axis, "theta_A, phi_A, theta_B, phi_B, phi_off, eta_loss or t_seq")->required();
  sw->add_option("--from", from, "First value")->required();
  sw->add_option("--to", to, "Last value")->required();
  sw->add_option("--points", points, "Number of points")->required();
  sw->add_option("--out", out, "Output CSV file (default stdout)");
  sw->add_option("--threads", threads, "Worker cap")->check(CLI::PositiveNumber);

  auto* det = app.add_subcommand("detector-sim", "Cascaded detector simulation");
  int fock = 1;
  std::string sweep_axis, summary_out;
  det->add_option("--config", config_path, "Run configuration (JSON)");
  det->add_option("--fock", fock, "Incident Fock state: 0, 1 or 2");
  det->add_option("--sweep", sweep_axis, "detuning (MHz) or delay (ns)");
  det->add_option("--from", from, "First sweep value");
  det->add_option("--to", to, "Last sweep value");
  det->add_option("--points", points, "Number of sweep points");
  det->add_option("--out", out, "Output CSV file (default stdout)");
  det->add_option("--summary", summary_out, "Summary JSON file");
  det->add_option("--threads", threads, "Worker cap")->check(CLI::PositiveNumber);

  auto* tomo = app.add_subcommand("tomo", "Readout-corrected reconstruction of tomography counts");
  std::string counts_path, cal_path, target = "O+";
  int bootstrap = 0;
  std::uint64_t tomo_seed = 1;
  tomo->add_option("--counts", counts_path, "Counts JSON")->required();
  tomo->add_option("--cal", cal_path, "Calibration JSON (default identity)");
  tomo->add_option("--target", target, "O+ or O-");
  tomo->add_option("--bootstrap", bootstrap, "Bootstrap resamples for a cross-check of the error bars");
  tomo->add_option("--seed", tomo_seed, "Bootstrap seed");
  tomo->add_option("--out", out, "Output JSON file (default stdout)");

  auto* defaults = app.add_subcommand("defaults", "Print the resolved configuration");
  defaults->add_option("--config", config_path, "Run configuration (JSON)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*proto) return cmd_protocol(config_path, shots, seed, out, threads);
    if (*sw) return cmd_sweep(config_path, axis, from, to, points, out, threads);
    if (*det) {
      if (!sweep_axis.empty() && points < 1) throw UsageError("--points must be at least 1");
      return cmd_detector_sim(config_path, fock, sweep_axis, from, to, points, out, summary_out, threads);
    }
    if (*tomo) return cmd_tomo(counts_path, cal_path, target, bootstrap, tomo_seed, out);
    if (*defaults) {
      std::cout << dump(to_json(resolve_config(config_path)));
      return 0;
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::domain_error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitUsage;
}
