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

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "hwrec/dqc1.hpp"
#include "hwrec/fock.hpp"
#include "hwrec/harness.hpp"
#include "hwrec/hw.hpp"
#include "hwrec/rng.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitAssert = 3;

int cmd_run(const std::string& config_path, bool assert_thresholds) {
  hwrec::ExperimentConfig config = hwrec::load_config(config_path);
  hwrec::validate_config(config);
  if (config.output_path.empty())
    throw hwrec::ConfigError("output_path is required for 'run'");
  if (assert_thresholds && !config.assert_min_mean_fidelity)
    throw hwrec::ConfigError("--assert requires assert_min_mean_fidelity in the configuration");

  const hwrec::RunResult result = hwrec::run_experiment(config);
  hwrec::emit_report(result, config.output_path);

  std::printf("wrote %s.csv and %s.json\n", config.output_path.c_str(),
              config.output_path.c_str());
  bool ok = true;
  for (const hwrec::AggregatePoint& p : result.aggregates) {
    std::printf("N_shot=%lld noise=(%g, %g): mean fidelity %.6f (std %.6f, n=%d)\n",
                static_cast<long long>(p.n_shot), p.delta_theta, p.delta_phi,
                p.mean_fidelity, p.std_fidelity, p.n_states);
    if (assert_thresholds && p.mean_fidelity < *config.assert_min_mean_fidelity) ok = false;
  }
  if (assert_thresholds && !ok) {
    std::fprintf(stderr, "assertion failed: a mean fidelity fell below %g\n",
                 *config.assert_min_mean_fidelity);
    return kExitAssert;
  }
  return kExitOk;
}

int cmd_validate(const std::string& config_path) {
  hwrec::ExperimentConfig config = hwrec::load_config(config_path);
  hwrec::validate_config(config);
  std::printf("%s: OK\n", config_path.c_str());
  return kExitOk;
}

int cmd_oracle(int modes, int photons, std::uint64_t seed, long long shots) {
  const hwrec::FockBasis& basis = hwrec::cached_basis(modes, photons);
  hwrec::RngStream state_stream = hwrec::RngStream::derive(seed, {0x07ac1eull});
  const Eigen::VectorXcd psi = hwrec::random_pure_state(modes, photons, state_stream);
  const hwrec::ExpectationTable exact =
      hwrec::hw_expectations_exact(psi * psi.adjoint(), basis);

  hwrec::EstimateOptions opts;
  hwrec::RngStream shot_stream = hwrec::RngStream::derive(seed, {0x5407ull});
  hwrec::RngStream* rng = nullptr;
  if (shots > 0) {
    opts.exact = false;
    opts.n_shot = shots;
    rng = &shot_stream;
  }
  const hwrec::ExpectationTable est =
      hwrec::estimate_full_table(psi, modes, photons, opts, rng);

  std::printf("random pure state, M=%d N=%d seed=%llu (%s)\n", modes, photons,
              static_cast<unsigned long long>(seed),
              shots > 0 ? ("shots=" + std::to_string(shots)).c_str() : "exact parities");
  std::printf("%3s %3s  %23s  %23s  %10s\n", "k", "l", "exact <X^k Z^l>",
              "interferometer estimate", "|diff|");
  double max_diff = 0.0;
  for (int k = 0; k < modes; ++k) {
    for (int l = 0; l < modes; ++l) {
      if (k == 0 && l == 0) continue;
      const std::complex<double> a = exact.values(k, l);
      const std::complex<double> b = est.values(k, l);
      const double diff = std::abs(a - b);
      max_diff = std::max(max_diff, diff);
      std::printf("%3d %3d  %+11.8f%+11.8fi  %+11.8f%+11.8fi  %10.3e\n", k, l, a.real(),
                  a.imag(), b.real(), b.imag(), diff);
    }
  }
  std::printf("max |diff| = %.3e\n", max_diff);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reconstruction toolkit for photon-number states on cyclic interferometers"};
  app.require_subcommand(1);

  std::string config_path;
  bool assert_thresholds = false;
  CLI::App* run = app.add_subcommand("run", "run an experiment described by a config file");
  run->add_option("config", config_path, "path to the configuration file")->required();
  run->add_flag("--assert", assert_thresholds,
                "exit with code 3 when a mean fidelity misses assert_min_mean_fidelity");

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "check a config file and exit");
  validate->add_option("config", validate_path, "path to the configuration file")->required();

  int modes = 3;
  int photons = 2;
  std::uint64_t seed = 0;
  long long shots = 0;
  CLI::App* oracle = app.add_subcommand(
      "oracle", "compare exact expectation values against the interferometer estimate");
  oracle->add_option("--modes,-M", modes, "mode count (prime)");
  oracle->add_option("--photons,-N", photons, "photon number (1 <= N < M)");
  oracle->add_option("--seed", seed, "random seed for the probe state");
  oracle->add_option("--shots", shots, "shot count (0 = exact parities)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, assert_thresholds);
    if (validate->parsed()) return cmd_validate(validate_path);
    if (oracle->parsed()) return cmd_oracle(modes, photons, seed, shots);
  } catch (const hwrec::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitConfig;
}
