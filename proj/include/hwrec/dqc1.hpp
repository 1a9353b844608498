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
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hwrec/fock.hpp"
#include "hwrec/hw.hpp"
#include "hwrec/rng.hpp"

namespace hwrec {

/// Two-arm interferometer with the probe state on modes 0..M-1 and vacuum
/// ancilla modes M..2M-1:
///   T = (W^dag + I) Hb^dag (I + V) Hb (W + I)   (block direct sums),
/// where Hb is the balanced 2M-mode splitter (1/sqrt2) [[I, I], [I, -I]].
/// Photon-number parity on the lower arm then measures Re<lift(W^dag V W)>.
struct DQC1Circuit {
  int modes = 0;  // M; the circuit itself acts on 2M modes
  Eigen::MatrixXcd w;
  Eigen::MatrixXcd v;
  Eigen::MatrixXcd t;
};

/// Assembles the two-arm circuit; W and V must be M x M and unitary to 1e-8.
DQC1Circuit build_circuit(const Eigen::MatrixXcd& w, const Eigen::MatrixXcd& v);

/// Probability of detecting N_B photons on the lower arm, N_B = 0..N,
/// for the probe state fed through `circuit`. Sums to 1 within 1e-10.
std::vector<double> outcome_distribution(const Eigen::VectorXcd& psi,
                                         const DQC1Circuit& circuit);
std::vector<double> outcome_distribution(const Eigen::MatrixXcd& rho,
                                         const DQC1Circuit& circuit);

/// Exact parity expectation sum_b (-1)^b p(N_B = b); equals
/// <lift(U + U^dag)> / 2^N with U = W^dag V W.
double zeta_exact(const Eigen::VectorXcd& psi, const DQC1Circuit& circuit);
double zeta_exact(const Eigen::MatrixXcd& rho, const DQC1Circuit& circuit);

/// Counts per lower-arm photon number from a finite-shot run.
struct ShotTally {
  std::vector<std::int64_t> counts;  // index = N_B
  std::int64_t total = 0;
};

/// Draws `n_shot` outcomes from a parity distribution and returns the
/// empirical parity estimate (always in [-1, 1]) with the tally.
std::pair<double, ShotTally> sample_zeta(const std::vector<double>& distribution,
                                         std::int64_t n_shot, RngStream& rng);

/// Which M-mode preparation unitary a configuration uses.
enum class WTag { kIdentity, kFourier };

/// One interferometer setting. The probe circuit is
///   W = I (kIdentity) or the Fourier matrix (kFourier),
///   V = exp(i theta) X^k Z^l (kIdentity)  or  exp(i theta) X^l (kFourier),
/// and theta already bundles the quadrature angle -r pi / (2N) with the
/// phase-ramp term 2 pi (shift) m / M used by the cosine aggregation.
struct MeasurementConfig {
  int r = 0;  // 0: real part, 1: imaginary part
  int k = 0;
  int l = 0;
  int m = 0;  // phase-ramp step
  WTag w_tag = WTag::kIdentity;
  double theta = 0.0;
};

/// Full settings list covering every (k, l) != (0, 0), r in {0, 1} and
/// m = 0..M-1; size 2M^3 - 2M. Requires M prime and 1 <= N < M.
std::vector<MeasurementConfig> measurement_schedule(int modes, int photons);

/// Mode matrices realizing a configuration.
Eigen::MatrixXcd config_w(const MeasurementConfig& cfg, int modes);
Eigen::MatrixXcd config_v(const MeasurementConfig& cfg, int modes);

/// Optional circuit transformer (noise injection): receives the schedule
/// position, the configuration, the ideal 2M-mode matrix and a replicate
/// index (-1 when the same circuit serves every shot) and returns the
/// matrix actually executed.
using CircuitHook = std::function<Eigen::MatrixXcd(
    int config_index, const MeasurementConfig& cfg, const Eigen::MatrixXcd& t,
    std::int64_t replicate)>;

struct EstimateOptions {
  bool exact = true;
  std::int64_t n_shot = 0;      // used when exact == false
  bool per_shot_noise = false;  // re-invoke the hook for every shot
};

/// Estimates lambda_{r,k,l} = Re((-i)^r <X^k Z^l>) by the cosine-weighted
/// parity aggregate over the M phase-ramp settings:
///   lambda = (2^{N-delta} / M) sum_m cos(2 pi s m N / M) zeta_m,
/// with s = k for k >= 1 (else s = l via the Fourier branch) and delta = 1
/// iff 2 s N = 0 mod M. Valid when N <= M / gcd(2s, M); throws otherwise.
/// Shot mode derives one child stream per setting from `rng`.
double estimate_hw_expectation(const Eigen::VectorXcd& psi, int modes, int photons,
                               int k, int l, int r, const EstimateOptions& opts,
                               RngStream* rng = nullptr,
                               const CircuitHook* hook = nullptr);
double estimate_hw_expectation(const Eigen::MatrixXcd& rho, int modes, int photons,
                               int k, int l, int r, const EstimateOptions& opts,
                               RngStream* rng = nullptr,
                               const CircuitHook* hook = nullptr);

/// Runs the whole schedule and assembles the complex expectation table
/// values(k, l) = lambda_{0,k,l} + i lambda_{1,k,l}, with values(0,0) = 1.
/// Each schedule position gets the child stream rng->child(position).
ExpectationTable estimate_full_table(const Eigen::VectorXcd& psi, int modes,
                                     int photons, const EstimateOptions& opts,
                                     RngStream* rng = nullptr,
                                     const CircuitHook* hook = nullptr);
ExpectationTable estimate_full_table(const Eigen::MatrixXcd& rho, int modes,
                                     int photons, const EstimateOptions& opts,
                                     RngStream* rng = nullptr,
                                     const CircuitHook* hook = nullptr);

}  // namespace hwrec
