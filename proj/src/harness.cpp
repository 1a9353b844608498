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

#include "hwrec/harness.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "hwrec/dqc1.hpp"
#include "hwrec/fock.hpp"
#include "hwrec/hw.hpp"
#include "hwrec/mle.hpp"

namespace hwrec {

namespace {

// Stream derivation tags; every trial-level random quantity hangs off
// (master seed, tag, ids) so results never depend on execution order.
constexpr std::uint64_t kTagState = 0x51a7eull;
constexpr std::uint64_t kTagTrial = 0x7e57ull;
constexpr std::uint64_t kTagNoise = 0x4015eull;
constexpr std::uint64_t kTagFit = 0xf17ull;

bool is_prime(int n) {
  if (n < 2) return false;
  for (int p = 2; static_cast<long long>(p) * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string cur;
  for (char ch : value) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) items.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) items.push_back(cur);
  return items;
}

std::int64_t parse_int(const std::string& s, const std::string& key) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("configuration key '" + key + "': '" + s + "' is not an integer");
  return v;
}

std::uint64_t parse_uint(const std::string& s, const std::string& key) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("configuration key '" + key + "': '" + s + "' is not a non-negative integer");
  return v;
}

double parse_real(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("configuration key '" + key + "': '" + s + "' is not a number");
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::vector<double> noise_thetas;
  std::vector<double> noise_phis;
  bool have_mode = false, have_modes = false, have_photons = false, have_schedule = false;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
    if (!seen.insert(key).second)
      throw ConfigError("duplicate configuration key '" + key + "'");

    if (key == "mode") {
      if (value == "fidelity_vs_shots") config.mode = RunMode::kFidelityVsShots;
      else if (value == "noise_sweep") config.mode = RunMode::kNoiseSweep;
      else if (value == "single_state") config.mode = RunMode::kSingleState;
      else throw ConfigError("mode must be fidelity_vs_shots, noise_sweep or single_state");
      have_mode = true;
    } else if (key == "M") {
      config.modes = static_cast<int>(parse_int(value, key));
      have_modes = true;
    } else if (key == "N") {
      config.photons = static_cast<int>(parse_int(value, key));
      have_photons = true;
    } else if (key == "n_states") {
      config.n_states = static_cast<int>(parse_int(value, key));
    } else if (key == "shot_schedule") {
      if (value == "exact") {
        config.exact = true;
      } else {
        for (const std::string& item : split_list(value))
          config.shot_schedule.push_back(parse_int(item, key));
      }
      have_schedule = true;
    } else if (key == "seed") {
      config.seed = parse_uint(value, key);
    } else if (key == "output_path") {
      config.output_path = value;
    } else if (key == "noise_delta_theta") {
      for (const std::string& item : split_list(value))
        noise_thetas.push_back(parse_real(item, key));
    } else if (key == "noise_delta_phi") {
      for (const std::string& item : split_list(value))
        noise_phis.push_back(parse_real(item, key));
    } else if (key == "noise_resample") {
      if (value == "per_run") config.resample = NoiseResample::kPerRun;
      else if (value == "per_state") config.resample = NoiseResample::kPerState;
      else if (value == "per_configuration") config.resample = NoiseResample::kPerConfiguration;
      else if (value == "per_shot") config.resample = NoiseResample::kPerShot;
      else throw ConfigError("noise_resample must be per_run, per_state, per_configuration or per_shot");
    } else if (key == "assert_min_mean_fidelity") {
      config.assert_min_mean_fidelity = parse_real(value, key);
    } else {
      throw ConfigError("unknown configuration key '" + key + "'");
    }
  }

  if (!have_mode) throw ConfigError("missing required key 'mode'");
  if (!have_modes) throw ConfigError("missing required key 'M'");
  if (!have_photons) throw ConfigError("missing required key 'N'");
  if (!have_schedule) throw ConfigError("missing required key 'shot_schedule'");

  if (!noise_thetas.empty() || !noise_phis.empty()) {
    if (noise_thetas.empty()) noise_thetas.push_back(0.0);
    if (noise_phis.empty()) noise_phis.push_back(0.0);
    for (double dt : noise_thetas)
      for (double dp : noise_phis) config.noise_points.push_back({dt, dp});
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void validate_config(const ExperimentConfig& config) {
  if (!is_prime(config.modes))
    throw ConfigError("M = " + std::to_string(config.modes) +
                      " is not prime; the measurement schedule requires a prime mode count");
  if (config.photons < 1 || config.photons >= config.modes)
    throw ConfigError("N must satisfy 1 <= N < M");
  if (config.n_states < 1) throw ConfigError("n_states must be >= 1");
  if (config.exact && !config.shot_schedule.empty())
    throw ConfigError("shot_schedule cannot mix 'exact' with shot counts");
  if (!config.exact) {
    if (config.shot_schedule.empty()) throw ConfigError("shot_schedule must not be empty");
    for (std::int64_t s : config.shot_schedule)
      if (s < 1) throw ConfigError("shot counts must be >= 1");
  }
  if (config.mode == RunMode::kNoiseSweep) {
    if (config.noise_points.empty())
      throw ConfigError("noise_sweep mode requires noise_delta_theta / noise_delta_phi");
    for (const NoiseSpec& p : config.noise_points)
      if (p.delta_theta < 0.0 || p.delta_phi < 0.0)
        throw ConfigError("noise widths must be non-negative");
    if (config.resample == NoiseResample::kPerShot && config.exact)
      throw ConfigError("per_shot noise resampling requires finite shot counts");
  } else {
    if (!config.noise_points.empty())
      throw ConfigError("noise grids are only used in noise_sweep mode");
  }
  if (config.mode == RunMode::kSingleState && config.n_states != 1)
    throw ConfigError("single_state mode requires n_states = 1");
  if (config.assert_min_mean_fidelity &&
      (*config.assert_min_mean_fidelity < 0.0 || *config.assert_min_mean_fidelity > 1.0))
    throw ConfigError("assert_min_mean_fidelity must lie in [0, 1]");
}

Eigen::VectorXcd random_pure_state(int modes, int photons, RngStream& rng) {
  return haar_state(cached_basis(modes, photons).size(), rng);
}

int resolve_worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HWREC_WORKERS")) {
    const std::string s(env);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v < 1)
      throw ConfigError("HWREC_WORKERS must be a positive integer");
    return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

struct TrialSpec {
  int noise_idx = -1;  // -1: no mesh noise
  int shot_idx = 0;
  int state_id = 0;
  std::int64_t n_shot = 0;  // 0: exact parities
};

TrialRecord run_one_trial(const ExperimentConfig& config, const TrialSpec& spec) {
  const auto t_start = std::chrono::steady_clock::now();
  const FockBasis& basis = cached_basis(config.modes, config.photons);

  RngStream state_stream =
      RngStream::derive(config.seed, {kTagState, static_cast<std::uint64_t>(spec.state_id)});
  const Eigen::VectorXcd psi = random_pure_state(config.modes, config.photons, state_stream);
  const Eigen::MatrixXcd rho_truth = hw_reduce(psi * psi.adjoint(), basis);

  // The measurement stream ignores whether noise is active (noise draws use
  // their own tag), so a zero-width noise point replays the noiseless run.
  RngStream trial_stream = RngStream::derive(
      config.seed, {kTagTrial, static_cast<std::uint64_t>(spec.state_id),
                    static_cast<std::uint64_t>(spec.shot_idx),
                    static_cast<std::uint64_t>(spec.noise_idx < 0 ? 0 : spec.noise_idx)});

  CircuitHook hook;
  if (spec.noise_idx >= 0) {
    const NoiseSpec noise = config.noise_points[spec.noise_idx];
    const NoiseResample resample = config.resample;
    const std::uint64_t seed = config.seed;
    const std::uint64_t noise_id = static_cast<std::uint64_t>(spec.noise_idx);
    const std::uint64_t state_id = static_cast<std::uint64_t>(spec.state_id);
    const std::uint64_t shot_id = static_cast<std::uint64_t>(spec.shot_idx);
    hook = [=](int cfg_index, const MeasurementConfig&, const Eigen::MatrixXcd& t,
               std::int64_t replicate) {
      const std::uint64_t cfg_id = static_cast<std::uint64_t>(cfg_index);
      RngStream noise_stream = [&] {
        switch (resample) {
          case NoiseResample::kPerRun:
            return RngStream::derive(seed, {kTagNoise, noise_id, cfg_id});
          case NoiseResample::kPerState:
            return RngStream::derive(seed, {kTagNoise, noise_id, state_id, cfg_id});
          case NoiseResample::kPerConfiguration:
            return RngStream::derive(seed, {kTagNoise, noise_id, state_id, shot_id, cfg_id});
          case NoiseResample::kPerShot:
          default:
            return RngStream::derive(seed, {kTagNoise, noise_id, state_id, shot_id, cfg_id,
                                            static_cast<std::uint64_t>(replicate)});
        }
      }();
      return noisy_unitary(t, noise, noise_stream);
    };
  }

  EstimateOptions opts;
  opts.exact = spec.n_shot == 0;
  opts.n_shot = spec.n_shot;
  opts.per_shot_noise = spec.noise_idx >= 0 && config.resample == NoiseResample::kPerShot;

  const ExpectationTable table =
      estimate_full_table(psi, config.modes, config.photons, opts, &trial_stream,
                          hook ? &hook : nullptr);

  FitOptions fit_options;
  fit_options.seed = mix_seed(config.seed, mix_seed(kTagFit, trial_stream.base_seed()));
  const FitResult fit_result = fit(table, fit_options);

  TrialRecord record;
  record.state_id = spec.state_id;
  record.n_shot = spec.n_shot;
  if (spec.noise_idx >= 0) {
    record.delta_theta = config.noise_points[spec.noise_idx].delta_theta;
    record.delta_phi = config.noise_points[spec.noise_idx].delta_phi;
  }
  record.fidelity = fidelity(rho_truth, fit_result.rho);
  record.seed_used = trial_stream.base_seed();
  record.rho_mle = fit_result.rho;
  record.rho_truth = rho_truth;
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return record;
}

void parallel_for(int count, int workers, const std::function<void(int)>& body) {
  if (workers <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min(workers, count);
  pool.reserve(n_threads);
  for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, int workers) {
  validate_config(config);

  std::vector<std::int64_t> shots = config.shot_schedule;
  if (config.exact) shots = {0};
  const bool with_noise = config.mode == RunMode::kNoiseSweep;
  const int n_noise = with_noise ? static_cast<int>(config.noise_points.size()) : 1;
  const int n_shot_entries = static_cast<int>(shots.size());

  std::vector<TrialSpec> specs;
  specs.reserve(static_cast<std::size_t>(n_noise) * n_shot_entries * config.n_states);
  for (int ni = 0; ni < n_noise; ++ni)
    for (int si = 0; si < n_shot_entries; ++si)
      for (int st = 0; st < config.n_states; ++st) {
        TrialSpec spec;
        spec.noise_idx = with_noise ? ni : -1;
        spec.shot_idx = si;
        spec.state_id = st;
        spec.n_shot = shots[si];
        specs.push_back(spec);
      }

  RunResult result;
  result.config = config;
  result.trials.resize(specs.size());
  parallel_for(static_cast<int>(specs.size()), resolve_worker_count(workers),
               [&](int i) { result.trials[i] = run_one_trial(config, specs[i]); });

  // Aggregates in deterministic grid order; trials are laid out
  // noise-major, then shot entry, then state.
  for (int ni = 0; ni < n_noise; ++ni) {
    for (int si = 0; si < n_shot_entries; ++si) {
      AggregatePoint point;
      point.n_shot = shots[si];
      if (with_noise) {
        point.delta_theta = config.noise_points[ni].delta_theta;
        point.delta_phi = config.noise_points[ni].delta_phi;
      }
      point.n_states = config.n_states;
      double sum = 0.0;
      for (int st = 0; st < config.n_states; ++st) {
        const std::size_t idx =
            (static_cast<std::size_t>(ni) * n_shot_entries + si) * config.n_states + st;
        sum += result.trials[idx].fidelity;
      }
      point.mean_fidelity = sum / config.n_states;
      double ss = 0.0;
      for (int st = 0; st < config.n_states; ++st) {
        const std::size_t idx =
            (static_cast<std::size_t>(ni) * n_shot_entries + si) * config.n_states + st;
        const double d = result.trials[idx].fidelity - point.mean_fidelity;
        ss += d * d;
      }
      point.std_fidelity = config.n_states > 1 ? std::sqrt(ss / (config.n_states - 1)) : 0.0;
      result.aggregates.push_back(point);
    }
  }
  return result;
}

RunResult run_fidelity_vs_shots(const ExperimentConfig& config, int workers) {
  if (config.mode == RunMode::kNoiseSweep)
    throw ConfigError("run_fidelity_vs_shots called with a noise_sweep configuration");
  return run_experiment(config, workers);
}

RunResult run_noise_sweep(const ExperimentConfig& config, int workers) {
  if (config.mode != RunMode::kNoiseSweep)
    throw ConfigError("run_noise_sweep requires mode = noise_sweep");
  return run_experiment(config, workers);
}

}  // namespace hwrec
