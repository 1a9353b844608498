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

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hwrec/clements.hpp"
#include "hwrec/rng.hpp"

namespace hwrec {

/// Rejected configuration input (maps to CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RunMode { kFidelityVsShots, kNoiseSweep, kSingleState };

/// How often the mesh noise of a measurement circuit is redrawn.
enum class NoiseResample {
  kPerRun,            // one draw per setting, shared by all states
  kPerState,          // redrawn for every probe state
  kPerConfiguration,  // redrawn per state and per setting (default)
  kPerShot            // redrawn for every single shot
};

struct ExperimentConfig {
  RunMode mode = RunMode::kFidelityVsShots;
  int modes = 3;
  int photons = 2;
  int n_states = 1;
  bool exact = false;                      // exact parities instead of shots
  std::vector<std::int64_t> shot_schedule; // empty iff exact
  std::vector<NoiseSpec> noise_points;     // noise_sweep only
  NoiseResample resample = NoiseResample::kPerConfiguration;
  std::uint64_t seed = 0;
  std::string output_path;
  std::optional<double> assert_min_mean_fidelity;
};

/// Parses the flat key = value configuration format (# comments, one key
/// per line). Unknown or duplicate keys are ConfigErrors.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Semantic validation (prime mode count, photon bounds, schedule shape...).
void validate_config(const ExperimentConfig& config);

/// Haar-random probe state in the (modes, photons) sector.
Eigen::VectorXcd random_pure_state(int modes, int photons, RngStream& rng);

struct TrialRecord {
  int state_id = 0;
  std::int64_t n_shot = 0;  // 0 means exact parities
  double delta_theta = 0.0;
  double delta_phi = 0.0;
  double fidelity = 0.0;
  double wall_seconds = 0.0;
  std::uint64_t seed_used = 0;
  Eigen::MatrixXcd rho_mle;
  Eigen::MatrixXcd rho_truth;
};

struct AggregatePoint {
  std::int64_t n_shot = 0;
  double delta_theta = 0.0;
  double delta_phi = 0.0;
  double mean_fidelity = 0.0;
  double std_fidelity = 0.0;  // sample standard deviation
  int n_states = 0;
};

struct RunResult {
  ExperimentConfig config;
  std::vector<TrialRecord> trials;
  std::vector<AggregatePoint> aggregates;
};

/// Worker count resolution: explicit argument, else the HWREC_WORKERS
/// environment variable, else the hardware concurrency.
int resolve_worker_count(int requested);

/// Runs the configured experiment. Trials execute on a worker pool but all
/// randomness is derived per trial from (seed, ids), so results and the
/// CSV report are identical for any worker count.
RunResult run_experiment(const ExperimentConfig& config, int workers = 0);

/// Mode-checked wrappers around run_experiment.
RunResult run_fidelity_vs_shots(const ExperimentConfig& config, int workers = 0);
RunResult run_noise_sweep(const ExperimentConfig& config, int workers = 0);

/// Writes <path_stem>.csv (aggregates) and <path_stem>.json (config, trials
/// and reconstructed matrices as row-major [re, im] pairs).
void emit_report(const RunResult& result, const std::string& path_stem);

}  // namespace hwrec
