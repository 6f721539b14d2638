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

#include "rement/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

namespace rement {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / ("rement_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  fs::create_directories(dir);
  return dir;
}

TEST(Config, EmptyDocumentGivesDefaults) {
  const RunConfig rc = run_config_from_json(Json::object());
  const ProtocolConfig d{};
  EXPECT_EQ(rc.protocol.theta_A, d.theta_A);
  EXPECT_EQ(rc.protocol.round1.p_dark, d.round1.p_dark);
  EXPECT_EQ(rc.shots, 200000u);
  EXPECT_EQ(rc.assignment_source, "measured");
  EXPECT_TRUE(rc.assignment.matrix().isApprox(AssignmentMatrix::measured().matrix()));
}

TEST(Config, ReadsNestedSections) {
  const Json j = Json::parse(R"({
    "preparation": {"phi_B": 0.5},
    "detector": {"round2": {"p_dark": 0.01, "p_real": 0.1}},
    "loss": {"eta": 0.8},
    "timing": {"t_rep": 30, "p_init": 0.5},
    "sampling": {"shots": 1000, "seed": 9},
    "tomography": {"assignment": "identity"},
    "cascade": {"kappa_A": 1.1, "detuning": -2.5}
  })");
  const RunConfig rc = run_config_from_json(j);
  EXPECT_EQ(rc.protocol.phi_B, 0.5);
  EXPECT_EQ(rc.protocol.round2.p_dark, 0.01);
  EXPECT_EQ(rc.protocol.round2.p_real, 0.1);
  EXPECT_EQ(rc.protocol.round1.p_real, ProtocolConfig{}.round1.p_real);
  EXPECT_EQ(rc.protocol.eta_loss, 0.8);
  EXPECT_EQ(rc.protocol.t_rep, 30);
  EXPECT_EQ(rc.protocol.p_init, 0.5);
  EXPECT_EQ(rc.shots, 1000u);
  EXPECT_EQ(rc.seed, 9u);
  EXPECT_TRUE(rc.assignment.matrix().isIdentity());
  EXPECT_EQ(rc.cascade.kappa_A, 1.1);
  EXPECT_EQ(rc.cascade.drive_detuning(), -2.5);
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(run_config_from_json(Json::parse(R"({"prep": {}})")), ConfigError);
  EXPECT_THROW(run_config_from_json(Json::parse(R"({"detector": {"round1": {"p_drak": 0.1}}})")), ConfigError);
  EXPECT_THROW(run_config_from_json(Json::parse(R"({"cascade": {"kappa": 1}})")), ConfigError);
}

TEST(Config, RejectsBadValues) {
  EXPECT_THROW(run_config_from_json(Json::parse(R"({"detector": {"round1": {"p_dark": 1.5}}})")), ConfigError);
  EXPECT_THROW(run_config_from_json(Json::parse(R"({"timing": {"t_rep": -1}})")), ConfigError);
  EXPECT_THROW(run_config_from_json(Json::parse(R"({"sampling": {"shots": -5}})")), ConfigError);
  EXPECT_THROW(run_config_from_json(Json::parse(R"({"sampling": {"seed": 1.5}})")), ConfigError);
  EXPECT_THROW(run_config_from_json(Json::parse(R"({"loss": {"eta": "high"}})")), ConfigError);
  EXPECT_THROW(run_config_from_json(Json::parse(R"({"schema_version": 2})")), ConfigError);
  EXPECT_THROW(run_config_from_json(Json::parse(R"({"cascade": {"emitter_dim": 1}})")), ConfigError);
}

TEST(Config, EchoRoundTrips) {
  RunConfig rc;
  rc.protocol.phi_A = 0.25;
  rc.seed = 42;
  rc.cascade.pulse.amplitude = 2.0;
  const Json echoed = to_json(rc);
  EXPECT_EQ(echoed.at("schema_version"), kSchemaVersion);
  const RunConfig back = run_config_from_json(echoed);
  EXPECT_EQ(to_json(back).dump(), echoed.dump());
}

TEST(Config, AssignmentFileResolvesRelativeToConfig) {
  const fs::path dir = scratch_dir();
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity() * 0.9;
  m += Eigen::Matrix4d::Constant(0.025);
  {
    std::ofstream(dir / "cal.json") << assignment_to_json(AssignmentMatrix(m)).dump();
    std::ofstream(dir / "run.json") << R"({"tomography": {"assignment_file": "cal.json"}})";
  }
  const RunConfig rc = load_run_config(dir / "run.json");
  EXPECT_TRUE(rc.assignment.matrix().isApprox(m, 1e-15));
  EXPECT_EQ(fs::path(rc.assignment_source).filename(), "cal.json");
  fs::remove_all(dir);
}

TEST(Config, MissingFileIsAConfigError) {
  EXPECT_THROW(load_run_config("/nonexistent/rement.json"), ConfigError);
}

TEST(Calibration, RoundTrip) {
  const AssignmentMatrix a = AssignmentMatrix::measured();
  const AssignmentMatrix back = assignment_from_json(assignment_to_json(a));
  EXPECT_TRUE(back.matrix().isApprox(a.matrix(), 0));
}

TEST(Calibration, RejectsSingularAndMalformed) {
  Json singular = assignment_to_json(AssignmentMatrix::identity());
  singular["A"] = Json::parse("[[0.5,0.5,0,0],[0.5,0.5,0,0],[0,0,1,0],[0,0,0,1]]");
  EXPECT_THROW(assignment_from_json(singular), ConfigError);
  Json wrong_shape = singular;
  wrong_shape["A"] = Json::parse("[[1,0],[0,1]]");
  EXPECT_THROW(assignment_from_json(wrong_shape), ConfigError);
  Json wrong_basis = assignment_to_json(AssignmentMatrix::identity());
  wrong_basis["basis"] = {"EE", "EG", "GE", "GG"};
  EXPECT_THROW(assignment_from_json(wrong_basis), ConfigError);
}

TEST(Counts, RoundTrip) {
  const auto settings = TomographySettings::standard(1000);
  const auto rho = DensityMatrix::from_ket({2, 2}, states::odd_bell_plus());
  const CountsTable table = simulate_counts(rho, AssignmentMatrix::measured(), settings, 3);
  const auto [back, back_settings] = counts_from_json(counts_to_json(table, settings));
  for (std::size_t k = 0; k < 9; ++k) {
    EXPECT_EQ(back.counts[k], table.counts[k]);
    EXPECT_EQ(back_settings.settings[k].alice, settings.settings[k].alice);
    EXPECT_EQ(back_settings.settings[k].bob, settings.settings[k].bob);
  }
}

TEST(Counts, RejectsMalformed) {
  const auto settings = TomographySettings::standard(10);
  Json doc = counts_to_json(CountsTable{}, settings);
  Json short_doc = doc;
  short_doc["settings"].erase(0);
  EXPECT_THROW(counts_from_json(short_doc), ConfigError);
  Json bad_rotation = doc;
  bad_rotation["settings"][0]["alice"] = "Rz90";
  EXPECT_THROW(counts_from_json(bad_rotation), ConfigError);
  Json bad_counts = doc;
  bad_counts["settings"][3]["counts"] = {1, 2, 3};
  EXPECT_THROW(counts_from_json(bad_counts), ConfigError);
  Json negative = doc;
  negative["settings"][3]["counts"] = {1, -2, 3, 4};
  EXPECT_THROW(counts_from_json(negative), ConfigError);
}

TEST(Results, PauliHasSixteenLabels) {
  const Json j = pauli_to_json(pauli_decompose(DensityMatrix::from_ket({2, 2}, states::odd_bell_plus())));
  ASSERT_EQ(j.at("components").size(), 16u);
  EXPECT_EQ(j.at("components").begin().key(), "II");
  EXPECT_DOUBLE_EQ(j.at("components").at("ZZ").get<double>(), -1.0);
  EXPECT_FALSE(j.contains("sigma"));
}

}  // namespace
}  // namespace rement
