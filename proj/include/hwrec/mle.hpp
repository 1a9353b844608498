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
#include <vector>

#include <Eigen/Dense>

#include "hwrec/hw.hpp"

namespace hwrec {

/// Density matrix from M^2 real Cholesky parameters:
///   rho(t) = T^dag T / tr(T^dag T),
/// where T is lower triangular and read row major, each row listing its
/// off-diagonal entries as (re, im) pairs followed by one real diagonal
/// entry. The all-zero vector is rejected.
Eigen::MatrixXcd cholesky_density(const Eigen::VectorXd& t, int modes);

/// Inverse of cholesky_density up to scale: parameters whose density equals
/// `rho` (Hermitian PSD trace-1). Uses the flipped Cholesky factorization
/// with an escalating diagonal ridge for rank-deficient inputs.
Eigen::VectorXd params_from_density(const Eigen::MatrixXcd& rho);

/// Model observation for parameters t:
///   lambda(r,k,l) = Re((-i)^r tr(X^k Z^{Nl mod M} rho(t))).
/// Requires gcd(photons, modes) = 1.
double predicted_lambda(const Eigen::VectorXd& t, int modes, int photons, int r,
                        int k, int l);

/// Gaussian surrogate objective over every (k,l) != (0,0) and r in {0,1}:
///   L(t) = sum (lambda_obs - lambda(t))^2 / max(1 - lambda(t)^2, 1e-6).
double log_likelihood(const Eigen::VectorXd& t, const ExpectationTable& observed);

/// Analytic gradient of log_likelihood with respect to t.
Eigen::VectorXd log_likelihood_gradient(const Eigen::VectorXd& t,
                                        const ExpectationTable& observed);

struct FitOptions {
  int max_iter = 10000;
  double tol = 1e-10;  // stop when an accepted step improves L by less
  int restarts = 0;    // extra random starts beyond the warm start
  std::uint64_t seed = 0;
  bool record_trace = false;
};

struct FitResult {
  Eigen::MatrixXcd rho;
  double final_objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;  // accepted objective values when recorded
};

/// Maximum-likelihood physical state for an observed expectation table.
/// Warm starts from clipped linear inversion, then runs BFGS with Armijo
/// backtracking (accepted steps never increase the objective).
FitResult fit(const ExpectationTable& observed, const FitOptions& options = {});

/// Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2 for Hermitian PSD
/// trace-1 inputs (tolerance 1e-8; more negative spectra are rejected).
double fidelity(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

}  // namespace hwrec
