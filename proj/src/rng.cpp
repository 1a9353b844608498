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

#include "hwrec/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hwrec {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ splitmix64(tag));
}

RngStream::RngStream(std::uint64_t seed) : base_(seed), eng_(seed) {}

RngStream RngStream::derive(std::uint64_t master,
                            std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = master;
  for (std::uint64_t tag : path) s = mix_seed(s, tag);
  return RngStream(s);
}

RngStream RngStream::child(std::uint64_t tag) const {
  return RngStream(mix_seed(base_, tag));
}

std::uint64_t RngStream::next_u64() { return eng_(); }

double RngStream::uniform() {
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double RngStream::normal(double mean, double sigma) {
  // u1 in (0, 1] keeps the log finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mean + sigma * r * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::int64_t> multinomial_sample(const std::vector<double>& probs,
                                             std::int64_t n_draws,
                                             RngStream& rng) {
  if (probs.empty()) throw std::invalid_argument("multinomial_sample: empty probability vector");
  if (n_draws < 0) throw std::invalid_argument("multinomial_sample: negative draw count");
  double total = 0.0;
  std::vector<double> cdf(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    double p = probs[i];
    if (!(p > -1e-12)) throw std::invalid_argument("multinomial_sample: negative probability");
    if (p < 0.0) p = 0.0;
    total += p;
    cdf[i] = total;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("multinomial_sample: probabilities do not sum to 1");

  std::vector<std::int64_t> counts(probs.size(), 0);
  const std::size_t last = probs.size() - 1;
  for (std::int64_t d = 0; d < n_draws; ++d) {
    const double u = rng.uniform() * total;
    std::size_t j = 0;
    while (j < last && u >= cdf[j]) ++j;
    ++counts[j];
  }
  return counts;
}

Eigen::VectorXcd haar_state(int dim, RngStream& rng) {
  if (dim < 1) throw std::invalid_argument("haar_state: dim must be positive");
  Eigen::VectorXcd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = std::complex<double>(rng.normal(), rng.normal());
  const double n = v.norm();
  if (n == 0.0) return haar_state(dim, rng);
  return v / n;
}

Eigen::MatrixXcd haar_unitary(int dim, RngStream& rng) {
  if (dim < 1) throw std::invalid_argument("haar_unitary: dim must be positive");
  Eigen::MatrixXcd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = std::complex<double>(rng.normal(), rng.normal());
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fixing the R-diagonal phases makes the distribution Haar.
  for (int j = 0; j < dim; ++j) {
    std::complex<double> d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0.0) ? d / a : 1.0;
  }
  return q;
}

Eigen::MatrixXcd random_density(int dim, RngStream& rng) {
  if (dim < 1) throw std::invalid_argument("random_density: dim must be positive");
  Eigen::MatrixXcd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = std::complex<double>(rng.normal(), rng.normal());
  Eigen::MatrixXcd rho = g * g.adjoint();
  rho /= rho.trace().real();
  // Exact Hermitian symmetrization guards against rounding drift.
  return 0.5 * (rho + rho.adjoint());
}

}  // namespace hwrec
