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

// Release gate: every shipped claim is re-measured here from scratch, one
// criterion per line. The binary exits non-zero if any criterion fails.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hwrec/clements.hpp"
#include "hwrec/dqc1.hpp"
#include "hwrec/fock.hpp"
#include "hwrec/harness.hpp"
#include "hwrec/hw.hpp"
#include "hwrec/mle.hpp"
#include "hwrec/rng.hpp"

using namespace hwrec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

Complex omega_pow(int modes, double e) {
  return std::polar(1.0, 2.0 * std::numbers::pi * e / modes);
}

double linf(const Eigen::MatrixXcd& a) { return a.cwiseAbs().maxCoeff(); }

Eigen::MatrixXcd random_sector_density(int modes, int photons, RngStream& rng) {
  return random_density(cached_basis(modes, photons).size(), rng);
}

double min_eigenvalue(const Eigen::MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(a);
  return eig.eigenvalues().minCoeff();
}

/// Standard error of a difference of two sample means.
double pooled_se(double std_a, double std_b, int n_a, int n_b) {
  return std::sqrt(std_a * std_a / n_a + std_b * std_b / n_b);
}

ExperimentConfig base_config(int n_states, std::uint64_t seed) {
  ExperimentConfig config;
  config.mode = RunMode::kFidelityVsShots;
  config.modes = 3;
  config.photons = 2;
  config.n_states = n_states;
  config.seed = seed;
  return config;
}

// A1: linear inversion of exact word expectations equals the direct
// orbit-mixing reduction on random mixed states.
Outcome a1() {
  const double tol = 1e-10;
  double worst = 0.0;
  int states = 0;
  RngStream rng(1001);
  for (auto [m, n, count] :
       {std::tuple{3, 2, 100}, {5, 2, 20}, {5, 3, 20}, {7, 2, 20}}) {
    const FockBasis& basis = cached_basis(m, n);
    for (int i = 0; i < count; ++i) {
      const Eigen::MatrixXcd rho = random_sector_density(m, n, rng);
      const Eigen::MatrixXcd direct = hw_reduce(rho, basis);
      const Eigen::MatrixXcd inverted =
          reconstruct_hw_reduced(hw_expectations_exact(rho, basis));
      worst = std::max(worst, linf(direct - inverted));
      ++states;
    }
  }
  return {worst <= tol, "reconstruction vs reduction: max deviation " +
                            fmt(worst) + " <= " + fmt(tol) + " over " +
                            std::to_string(states) + " states"};
}

// A2: the two-detector parity equals the scaled symmetrized-lift
// expectation, and reduces to Re<U> for one photon.
Outcome a2() {
  const double tol_multi = 1e-10;
  const double tol_single = 1e-12;
  double worst_multi = 0.0, worst_single = 0.0;
  RngStream rng(1002);
  for (auto [m, n, count] : {std::tuple{3, 2, 50}, {5, 2, 10}}) {
    const FockBasis& basis = cached_basis(m, n);
    for (int i = 0; i < count; ++i) {
      const Eigen::MatrixXcd w = haar_unitary(m, rng);
      const Eigen::MatrixXcd v = haar_unitary(m, rng);
      const Eigen::VectorXcd psi = haar_state(basis.size(), rng);
      const Eigen::MatrixXcd u = w.adjoint() * v * w;
      const double zeta = zeta_exact(psi, build_circuit(w, v));
      const Eigen::MatrixXcd lifted = lift_operator(u + u.adjoint(), basis);
      const double oracle =
          ((psi.adjoint() * lifted * psi).value()).real() / std::pow(2.0, n);
      worst_multi = std::max(worst_multi, std::abs(zeta - oracle));
    }
  }
  for (int i = 0; i < 20; ++i) {
    const Eigen::MatrixXcd w = haar_unitary(3, rng);
    const Eigen::MatrixXcd v = haar_unitary(3, rng);
    const Eigen::VectorXcd psi = haar_state(3, rng);
    const Eigen::MatrixXcd u = w.adjoint() * v * w;
    const double zeta = zeta_exact(psi, build_circuit(w, v));
    const double expected = (psi.adjoint() * u * psi).value().real();
    worst_single = std::max(worst_single, std::abs(zeta - expected));
  }
  const bool pass = worst_multi <= tol_multi && worst_single <= tol_single;
  return {pass, "parity identity: multiphoton deviation " + fmt(worst_multi) +
                    " <= " + fmt(tol_multi) + ", single-photon " +
                    fmt(worst_single) + " <= " + fmt(tol_single)};
}

// A3: exact-parity cosine aggregation reproduces every word expectation,
// with the documented schedule sizes.
Outcome a3() {
  const double tol = 1e-10;
  double worst = 0.0;
  RngStream rng(1003);
  bool sizes_ok = true;
  std::string sizes;
  for (auto [m, n, count] : {std::tuple{3, 2, 10}, {5, 2, 3}}) {
    const int schedule = static_cast<int>(measurement_schedule(m, n).size());
    const int expected_size = 2 * m * m * m - 2 * m;
    sizes_ok = sizes_ok && schedule == expected_size;
    sizes += (sizes.empty() ? "" : "/") + std::to_string(schedule);
    const FockBasis& basis = cached_basis(m, n);
    EstimateOptions opts;
    for (int i = 0; i < count; ++i) {
      const Eigen::MatrixXcd rho = random_sector_density(m, n, rng);
      const ExpectationTable exact = hw_expectations_exact(rho, basis);
      for (int k = 0; k < m; ++k) {
        for (int l = 0; l < m; ++l) {
          if (k == 0 && l == 0) continue;
          for (int r = 0; r < 2; ++r) {
            const double lambda =
                estimate_hw_expectation(rho, m, n, k, l, r, opts);
            worst = std::max(worst, std::abs(lambda - exact.lambda(r, k, l)));
          }
        }
      }
    }
  }
  const bool pass = worst <= tol && sizes_ok;
  return {pass, "aggregation vs direct expectations: max deviation " +
                    fmt(worst) + " <= " + fmt(tol) + ", schedule sizes " +
                    sizes + " (want 48/240)"};
}

// A4: finite-shot reconstruction fidelity at the headline shot count, and
// growth from 128 to 2048 shots beyond one pooled standard error.
Outcome a4() {
  ExperimentConfig config = base_config(50, 1004);
  config.shot_schedule = {128, 1888, 2048};
  const RunResult result = run_experiment(config);
  const AggregatePoint& low = result.aggregates[0];
  const AggregatePoint& headline = result.aggregates[1];
  const AggregatePoint& high = result.aggregates[2];
  const double se =
      pooled_se(low.std_fidelity, high.std_fidelity, low.n_states, high.n_states);
  const bool pass = headline.mean_fidelity >= 0.985 &&
                    high.mean_fidelity - low.mean_fidelity > se;
  return {pass, "mean fidelity " + fmt(headline.mean_fidelity) +
                    " >= 0.985 at 1888 shots (50 states); mean rises " +
                    fmt(low.mean_fidelity) + " -> " + fmt(high.mean_fidelity) +
                    " from 128 to 2048 shots (gap " +
                    fmt(high.mean_fidelity - low.mean_fidelity) + " > " +
                    fmt(se) + " pooled SE)"};
}

// A5: mean fidelity above 0.90 under (0.1, 0.1) rad mesh jitter at 2048 shots.
Outcome a5() {
  ExperimentConfig config = base_config(20, 1005);
  config.mode = RunMode::kNoiseSweep;
  config.shot_schedule = {2048};
  config.noise_points = {{0.1, 0.1}};
  const RunResult result = run_experiment(config);
  const double mean = result.aggregates[0].mean_fidelity;
  return {mean > 0.90, "mean fidelity " + fmt(mean) +
                           " > 0.9 at (0.1, 0.1) rad jitter, 2048 shots, " +
                           std::to_string(config.n_states) + " states"};
}

// A6: reflectivity jitter hurts more than phase jitter by more than one
// pooled standard error; escalate the state count once before failing.
Outcome a6() {
  for (int n_states : {30, 100}) {
    ExperimentConfig config = base_config(n_states, 1006);
    config.mode = RunMode::kNoiseSweep;
    config.shot_schedule = {2048};
    config.noise_points = {{0.2, 0.0}, {0.0, 0.2}};
    const RunResult result = run_experiment(config);
    const AggregatePoint& theta = result.aggregates[0];
    const AggregatePoint& phi = result.aggregates[1];
    const double se = pooled_se(theta.std_fidelity, phi.std_fidelity,
                                theta.n_states, phi.n_states);
    const double gap = phi.mean_fidelity - theta.mean_fidelity;
    if (gap > se) {
      return {true, "reflectivity jitter mean " + fmt(theta.mean_fidelity) +
                        " < phase jitter mean " + fmt(phi.mean_fidelity) +
                        " (gap " + fmt(gap) + " > " + fmt(se) +
                        " pooled SE, " + std::to_string(n_states) + " states)"};
    }
    if (n_states == 100) {
      return {false, "separation not resolved: gap " + fmt(gap) + " <= " +
                         fmt(se) + " pooled SE even at 100 states"};
    }
  }
  return {false, "unreachable"};
}

// A7: phase-conjugated averages erase off-target mode-index transfers, the
// cosine-filtered sum restores additivity of lifted words, and the bunched
// two-photon witness separates joint from split symmetrization.
Outcome a7() {
  const double tol = 1e-12;
  double worst_erase = 0.0, worst_filter = 0.0;
  RngStream rng(1007);
  for (auto [m, n] : {std::pair{3, 2}, {5, 3}}) {
    const FockBasis& basis = cached_basis(m, n);
    const Eigen::MatrixXcd z = phase_shift(m);
    const Eigen::MatrixXcd v = haar_unitary(m, rng);
    const Eigen::MatrixXcd lifted_v = lift_operator(v, basis);
    for (int k = 0; k < m; ++k) {
      for (int sign : {+1, -1}) {
        Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(basis.size(), basis.size());
        for (int mm = 0; mm < m; ++mm) {
          Eigen::MatrixXcd conj = v;
          for (int i = 0; i < mm; ++i) conj = z.adjoint() * conj * z;
          avg += omega_pow(m, sign * mm * k * n) * lift_operator(conj, basis);
        }
        avg /= m;
        for (int i = 0; i < basis.size(); ++i) {
          for (int j = 0; j < basis.size(); ++j) {
            const int diff = ((total_mode_index(basis.state(i), m) -
                               total_mode_index(basis.state(j), m)) % m + m) % m;
            const int target = ((sign * k * n) % m + m) % m;
            const Complex expected =
                diff == target ? lifted_v(i, j) : Complex(0.0, 0.0);
            worst_erase = std::max(worst_erase, std::abs(avg(i, j) - expected));
          }
        }
      }
    }
    for (int k = 1; k < m; ++k) {
      const int delta = (2 * k * n) % m == 0 ? 1 : 0;
      for (int l = 0; l < m; ++l) {
        const Eigen::MatrixXcd word = hw_matrix(k, l, m);
        const Eigen::MatrixXcd linear =
            lift_operator(word, basis) + lift_operator(word, basis).adjoint();
        Eigen::MatrixXcd filtered =
            Eigen::MatrixXcd::Zero(basis.size(), basis.size());
        for (int mm = 0; mm < m; ++mm) {
          const Complex ramp = omega_pow(m, mm * k);
          filtered += std::cos(2.0 * std::numbers::pi * k * mm * n / m) *
                      lift_operator(ramp * word + std::conj(ramp) * word.adjoint(),
                                    basis);
        }
        filtered *= std::pow(2.0, 1 - delta) / m;
        worst_filter = std::max(worst_filter, linf(filtered - linear));
      }
    }
  }
  // Bunched witness: joint symmetrization gives +1, split gives -1.
  const FockBasis& basis = cached_basis(3, 2);
  const Eigen::MatrixXcd z3 = phase_shift(3);
  const int idx = basis.index_of({0, 2, 0});
  const Complex joint = lift_operator(z3 + z3.adjoint(), basis)(idx, idx);
  const Complex split = (lift_operator(z3, basis) +
                         lift_operator(z3, basis).adjoint())(idx, idx);
  const double witness = std::max(std::abs(joint - Complex(1.0, 0.0)),
                                  std::abs(split - Complex(-1.0, 0.0)));
  const bool pass = worst_erase <= tol && worst_filter <= tol && witness <= tol;
  return {pass, "erasure off-target max " + fmt(worst_erase) +
                    ", filtered-sum max " + fmt(worst_filter) + " (<= " +
                    fmt(tol) + "); bunched witness +1/-1 deviation " +
                    fmt(witness)};
}

// A8: every fit is physical, even for unphysical tables; exact tables
// recover the truth.
Outcome a8() {
  RngStream rng(1008);
  double worst_eig = 0.0, worst_trace = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    ExpectationTable observed;
    observed.modes = 3;
    observed.photons = 2;
    observed.values = Eigen::MatrixXcd::Zero(3, 3);
    observed.values(0, 0) = Complex(1.0, 0.0);
    const double scale = 0.3 + 1.2 * rng.uniform();
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l)
        if (k != 0 || l != 0)
          observed.values(k, l) =
              Complex(rng.normal(0.0, scale), rng.normal(0.0, scale));
    const FitResult result = fit(observed);
    worst_eig = std::min(worst_eig, min_eigenvalue(result.rho));
    worst_trace = std::max(
        worst_trace, std::abs((result.rho.trace() - Complex(1.0, 0.0))));
  }
  double worst_fid = 1.0;
  for (auto [m, n, count] : {std::tuple{3, 2, 10}, {5, 2, 3}}) {
    const FockBasis& basis = cached_basis(m, n);
    for (int i = 0; i < count; ++i) {
      const Eigen::MatrixXcd rho = random_sector_density(m, n, rng);
      const FitResult result = fit(hw_expectations_exact(rho, basis));
      worst_fid = std::min(worst_fid, fidelity(hw_reduce(rho, basis), result.rho));
    }
  }
  const bool pass =
      worst_eig >= -1e-10 && worst_trace <= 1e-10 && worst_fid >= 1.0 - 1e-6;
  return {pass, "1000 fits: min eigenvalue " + fmt(worst_eig) +
                    " >= -1e-10, max |trace - 1| " + fmt(worst_trace) +
                    " <= 1e-10; exact-table fidelity " + fmt(worst_fid) +
                    " >= 1 - 1e-6"};
}

// A9: mesh decomposition round-trips Haar unitaries and zero-width jitter
// is an exact identity on plans.
Outcome a9() {
  const double tol = 1e-10;
  double worst = 0.0;
  bool identity_ok = true;
  RngStream rng(1009);
  int count = 0;
  for (int dim : {2, 3, 6, 10}) {
    for (int trial = 0; trial < 25; ++trial) {
      const Eigen::MatrixXcd u = haar_unitary(dim, rng);
      const ClementsPlan plan = decompose(u);
      worst = std::max(worst, linf(compose(plan) - u));
      ++count;
      RngStream stream(rng.next_u64());
      const ClementsPlan jittered = perturb(plan, NoiseSpec{0.0, 0.0}, stream);
      identity_ok = identity_ok && jittered.dim == plan.dim &&
                    jittered.output_phases == plan.output_phases;
      for (size_t i = 0; identity_ok && i < plan.elements.size(); ++i) {
        identity_ok = jittered.elements[i].mode_lo == plan.elements[i].mode_lo &&
                      jittered.elements[i].theta == plan.elements[i].theta &&
                      jittered.elements[i].phi == plan.elements[i].phi;
      }
    }
  }
  const bool pass = worst <= tol && identity_ok;
  return {pass, "round trip over " + std::to_string(count) +
                    " Haar unitaries (dims 2/3/6/10): max deviation " +
                    fmt(worst) + " <= " + fmt(tol) + "; zero-width jitter " +
                    (identity_ok ? "bitwise identity" : "NOT an identity")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5},
      {"A6", a6}, {"A7", a7}, {"A8", a8}, {"A9", a9},
  };
  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    Outcome outcome;
    try {
      outcome = fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s - %s\n", id, outcome.pass ? "PASS" : "FAIL",
                outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  if (failures > 0) {
    std::printf("RESULT: %d of %zu criteria failed\n", failures, criteria.size());
    return 1;
  }
  std::printf("RESULT: all %zu criteria passed\n", criteria.size());
  return 0;
}
