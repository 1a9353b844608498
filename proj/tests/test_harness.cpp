/*
 * Copyright 2026 The hwrec authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hwrec/fock.hpp"
#include "hwrec/harness.hpp"
#include "hwrec/rng.hpp"
#include "support.hpp"

using namespace hwrec;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::filesystem::path scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "hwrec_harness_test";
  std::filesystem::create_directories(dir);
  return dir;
}

const char* kSmallExact =
    "mode = fidelity_vs_shots\n"
    "M = 3\n"
    "N = 2\n"
    "n_states = 3\n"
    "shot_schedule = exact\n"
    "seed = 11\n";

}  // namespace

TEST_CASE("random probe states are normalized, Haar-spread and replayable") {
  RngStream rng(1);
  const Eigen::VectorXcd psi = random_pure_state(3, 2, rng);
  REQUIRE(psi.size() == 6);
  CHECK(std::abs(psi.norm() - 1.0) <= 1e-12);

  RngStream replay(1);
  const Eigen::VectorXcd again = random_pure_state(3, 2, replay);
  CHECK((psi.array() == again.array()).all());

  // Mean squared amplitude per slot converges to 1/6 at the Haar rate.
  const int draws = 10000;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(6);
  RngStream stream(77);
  for (int i = 0; i < draws; ++i)
    mean += random_pure_state(3, 2, stream).cwiseAbs2();
  mean /= draws;
  // Var |a|^2 = (d-1)/(d^2 (d+1)) for Haar vectors of dimension d = 6.
  const double sigma = std::sqrt(5.0 / (36.0 * 7.0) / draws);
  for (int i = 0; i < 6; ++i)
    CHECK(std::abs(mean(i) - 1.0 / 6.0) <= 3.0 * sigma);
}

TEST_CASE("configuration text parses every documented key") {
  const ExperimentConfig config = parse_config_text(
      "# full example\n"
      "mode = noise_sweep\n"
      "M = 3\n"
      "N = 2   # photons\n"
      "n_states = 7\n"
      "shot_schedule = 128, 1888, 2048\n"
      "noise_delta_theta = 0.0, 0.2\n"
      "noise_delta_phi = 0.1\n"
      "noise_resample = per_state\n"
      "seed = 99\n"
      "assert_min_mean_fidelity = 0.9\n"
      "output_path = /tmp/out/run\n");
  CHECK(config.mode == RunMode::kNoiseSweep);
  CHECK(config.modes == 3);
  CHECK(config.photons == 2);
  CHECK(config.n_states == 7);
  CHECK(!config.exact);
  CHECK(config.shot_schedule == std::vector<std::int64_t>{128, 1888, 2048});
  REQUIRE(config.noise_points.size() == 2);
  CHECK(config.noise_points[0].delta_theta == 0.0);
  CHECK(config.noise_points[0].delta_phi == 0.1);
  CHECK(config.noise_points[1].delta_theta == 0.2);
  CHECK(config.noise_points[1].delta_phi == 0.1);
  CHECK(config.resample == NoiseResample::kPerState);
  CHECK(config.seed == 99);
  CHECK(config.assert_min_mean_fidelity.has_value());
  CHECK(config.output_path == "/tmp/out/run");
  validate_config(config);

  const ExperimentConfig exact = parse_config_text(kSmallExact);
  CHECK(exact.exact);
  CHECK(exact.shot_schedule.empty());
  validate_config(exact);
}

TEST_CASE("configuration parsing fails fast on malformed input") {
  CHECK_THROWS_AS(parse_config_text("mode = fidelity_vs_shots\nM = 3\nN = 2\n"
                                    "shot_schedule = exact\ntypo_key = 1\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("mode = fidelity_vs_shots\nM = 3\nM = 5\n"
                                    "N = 2\nshot_schedule = exact\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("mode = fidelity_vs_shots\nM = 3\nN = 2\n"),
                  ConfigError);  // missing shot_schedule
  CHECK_THROWS_AS(parse_config_text("mode = bogus\nM = 3\nN = 2\n"
                                    "shot_schedule = exact\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("mode = fidelity_vs_shots\nM = three\nN = 2\n"
                                    "shot_schedule = exact\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("mode = fidelity_vs_shots\nM = 3\nN = 2\n"
                                    "shot_schedule = exact\nnonsense line\n"),
                  ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/path/config.txt"), ConfigError);
}

TEST_CASE("semantic validation rejects inconsistent experiments") {
  ExperimentConfig base = parse_config_text(kSmallExact);

  ExperimentConfig bad = base;
  bad.modes = 4;  // composite mode counts have no full measurement schedule
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  bad = base;
  bad.photons = 3;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  bad = base;
  bad.n_states = 0;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  bad = base;
  bad.exact = false;  // neither exact nor any shot counts
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  bad = base;
  bad.shot_schedule = {0};
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  bad = base;
  bad.noise_points.push_back({0.1, 0.1});  // noise outside noise_sweep mode
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  bad = base;
  bad.mode = RunMode::kNoiseSweep;  // noise_sweep without a grid
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  bad = base;
  bad.mode = RunMode::kNoiseSweep;  // per-shot noise needs finite shots
  bad.noise_points.push_back({0.1, 0.1});
  bad.resample = NoiseResample::kPerShot;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  bad = base;
  bad.mode = RunMode::kNoiseSweep;
  bad.noise_points.push_back({-0.1, 0.1});  // negative width
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  bad = base;
  bad.mode = RunMode::kSingleState;
  bad.n_states = 3;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  bad = base;
  bad.assert_min_mean_fidelity = 1.5;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
}

TEST_CASE("worker resolution prefers the argument, then the environment") {
  CHECK(resolve_worker_count(5) == 5);
  setenv("HWREC_WORKERS", "3", 1);
  CHECK(resolve_worker_count(0) == 3);
  setenv("HWREC_WORKERS", "zero", 1);
  CHECK_THROWS_AS(resolve_worker_count(0), ConfigError);
  unsetenv("HWREC_WORKERS");
  CHECK(resolve_worker_count(0) >= 1);
}

TEST_CASE("the exact pipeline reconstructs every probe state") {
  const ExperimentConfig config = parse_config_text(kSmallExact);
  const RunResult result = run_fidelity_vs_shots(config, 2);
  REQUIRE(result.trials.size() == 3);
  REQUIRE(result.aggregates.size() == 1);
  CHECK(result.aggregates[0].n_shot == 0);
  CHECK(result.aggregates[0].mean_fidelity >= 1.0 - 1e-6);
  for (const TrialRecord& trial : result.trials) {
    CHECK(trial.fidelity >= 0.0);
    CHECK(trial.fidelity <= 1.0 + 1e-12);
    CHECK(trial.n_shot == 0);
  }
}

TEST_CASE("reports are byte-identical for any worker count") {
  ExperimentConfig config = parse_config_text(
      "mode = fidelity_vs_shots\nM = 3\nN = 2\nn_states = 4\n"
      "shot_schedule = 64, 256\nseed = 21\n");
  const auto dir = scratch_dir();
  const RunResult serial = run_experiment(config, 1);
  const RunResult pooled = run_experiment(config, 3);
  emit_report(serial, (dir / "serial").string());
  emit_report(pooled, (dir / "pooled").string());
  CHECK(read_file(dir / "serial.csv") == read_file(dir / "pooled.csv"));
  REQUIRE(serial.trials.size() == pooled.trials.size());
  for (size_t i = 0; i < serial.trials.size(); ++i) {
    CHECK(serial.trials[i].fidelity == pooled.trials[i].fidelity);
    CHECK(serial.trials[i].seed_used == pooled.trials[i].seed_used);
  }
}

TEST_CASE("a zero-width noise grid point replays the noiseless run") {
  const std::string shared =
      "M = 3\nN = 2\nn_states = 2\nshot_schedule = 64\nseed = 33\n";
  const ExperimentConfig plain =
      parse_config_text("mode = fidelity_vs_shots\n" + shared);
  const ExperimentConfig swept = parse_config_text(
      "mode = noise_sweep\n" + shared +
      "noise_delta_theta = 0.0\nnoise_delta_phi = 0.0\n");
  const RunResult a = run_fidelity_vs_shots(plain, 2);
  const RunResult b = run_noise_sweep(swept, 2);
  REQUIRE(a.trials.size() == b.trials.size());
  for (size_t i = 0; i < a.trials.size(); ++i)
    CHECK(a.trials[i].fidelity == b.trials[i].fidelity);
  CHECK(a.aggregates[0].mean_fidelity == b.aggregates[0].mean_fidelity);
}

TEST_CASE("noise degrades shots-mode fidelity deterministically") {
  const ExperimentConfig config = parse_config_text(
      "mode = noise_sweep\nM = 3\nN = 2\nn_states = 2\n"
      "shot_schedule = 64\nseed = 55\n"
      "noise_delta_theta = 0.0, 0.25\nnoise_delta_phi = 0.0\n");
  const RunResult first = run_noise_sweep(config, 2);
  const RunResult second = run_noise_sweep(config, 1);
  REQUIRE(first.aggregates.size() == 2);
  for (size_t i = 0; i < first.trials.size(); ++i)
    CHECK(first.trials[i].fidelity == second.trials[i].fidelity);
  CHECK(first.aggregates[1].mean_fidelity < first.aggregates[0].mean_fidelity);
}

TEST_CASE("every resampling granularity runs and is reproducible") {
  for (const char* granularity : {"per_run", "per_state", "per_configuration",
                                  "per_shot"}) {
    const ExperimentConfig config = parse_config_text(
        std::string("mode = noise_sweep\nM = 3\nN = 2\nn_states = 1\n"
                    "shot_schedule = 16\nseed = 66\n"
                    "noise_delta_theta = 0.1\nnoise_delta_phi = 0.1\n"
                    "noise_resample = ") +
        granularity + "\n");
    const RunResult a = run_noise_sweep(config, 1);
    const RunResult b = run_noise_sweep(config, 2);
    REQUIRE(a.trials.size() == 1);
    CHECK(a.trials[0].fidelity == b.trials[0].fidelity);
    CHECK(a.trials[0].fidelity >= 0.0);
    CHECK(a.trials[0].fidelity <= 1.0 + 1e-12);
  }
}

TEST_CASE("reports follow the documented schema and round-trip") {
  ExperimentConfig config = parse_config_text(kSmallExact);
  const RunResult result = run_experiment(config, 2);
  const auto dir = scratch_dir();
  const std::string stem = (dir / "schema_check").string();
  emit_report(result, stem);

  const std::string csv = read_file(dir / "schema_check.csv");
  CHECK(csv.rfind("M,N,N_shot,delta_theta,delta_phi,mean_fidelity,"
                  "std_fidelity,n_states,seed\n", 0) == 0);
  // Exact mode reports zero shots and zero noise widths.
  std::istringstream lines(csv);
  std::string header, row;
  std::getline(lines, header);
  REQUIRE(std::getline(lines, row).good());
  CHECK(row.rfind("3,2,0,0,0,", 0) == 0);

  const nlohmann::json doc = nlohmann::json::parse(read_file(dir / "schema_check.json"));
  CHECK(doc.at("schema").get<std::string>() == "hwrec-report-1");
  CHECK(doc.at("config").at("M").get<int>() == 3);
  CHECK(doc.at("config").at("shot_schedule").get<std::string>() == "exact");
  const auto& trials = doc.at("trials");
  REQUIRE(trials.size() == result.trials.size());
  for (size_t i = 0; i < trials.size(); ++i) {
    const auto& entry = trials[i].at("rho_mle");
    const Eigen::MatrixXcd& stored = result.trials[i].rho_mle;
    REQUIRE(static_cast<Eigen::Index>(entry.size()) ==
            stored.rows() * stored.cols());
    for (Eigen::Index r = 0; r < stored.rows(); ++r) {
      for (Eigen::Index c = 0; c < stored.cols(); ++c) {
        const auto& pair = entry[static_cast<size_t>(r * stored.cols() + c)];
        CHECK(std::abs(pair[0].get<double>() - stored(r, c).real()) <= 1e-15);
        CHECK(std::abs(pair[1].get<double>() - stored(r, c).imag()) <= 1e-15);
      }
    }
    CHECK(trials[i].at("fidelity").get<double>() == result.trials[i].fidelity);
  }

  CHECK_THROWS_AS(emit_report(result, ""), ConfigError);
}

TEST_CASE("mode-checked wrappers reject mismatched configurations") {
  const ExperimentConfig fidelity = parse_config_text(kSmallExact);
  CHECK_THROWS_AS(run_noise_sweep(fidelity, 1), ConfigError);
  const ExperimentConfig sweep = parse_config_text(
      "mode = noise_sweep\nM = 3\nN = 2\nn_states = 1\nshot_schedule = 16\n"
      "noise_delta_theta = 0.1\nnoise_delta_phi = 0.0\nseed = 3\n");
  CHECK_THROWS_AS(run_fidelity_vs_shots(sweep, 1), ConfigError);
}
