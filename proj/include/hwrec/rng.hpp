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
#include <initializer_list>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace hwrec {

/// SplitMix64 finalizer, used to derive well-separated seeds from tags.
std::uint64_t splitmix64(std::uint64_t z);

/// Combines a seed with a tag; repeated application walks a derivation tree.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

/// Deterministic random stream.
///
/// Wraps std::mt19937_64 (whose single-seed construction is fully specified
/// by the standard) and draws floating-point variates through hand-rolled
/// transforms only, so identical seeds give identical sequences on every
/// platform. Child streams are derived from the base seed, not from the
/// consumption state, so derivation order never depends on draw order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  /// Stream derived from (master, path...) by iterated seed mixing.
  static RngStream derive(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path);

  /// Independent child stream; deterministic function of (base seed, tag).
  RngStream child(std::uint64_t tag) const;

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Gaussian variate via Box-Muller; consumes exactly two uniforms.
  double normal(double mean = 0.0, double sigma = 1.0);

  std::uint64_t base_seed() const { return base_; }

 private:
  std::uint64_t base_;
  std::mt19937_64 eng_;
};

/// Multinomial counts for `n_draws` draws from `probs` (inverse-CDF per draw).
/// Negative probabilities below -1e-12 or a total off 1 by more than 1e-9
/// are rejected.
std::vector<std::int64_t> multinomial_sample(const std::vector<double>& probs,
                                             std::int64_t n_draws,
                                             RngStream& rng);

/// Haar-random pure state: normalized vector of iid complex Gaussians.
Eigen::VectorXcd haar_state(int dim, RngStream& rng);

/// Haar-random unitary via QR of a complex Ginibre matrix with the
/// R-diagonal phase fix.
Eigen::MatrixXcd haar_unitary(int dim, RngStream& rng);

/// Random full-rank density matrix (normalized Wishart).
Eigen::MatrixXcd random_density(int dim, RngStream& rng);

}  // namespace hwrec
