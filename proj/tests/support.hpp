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

#include <algorithm>
#include <complex>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "hwrec/fock.hpp"
#include "hwrec/rng.hpp"

namespace hwrec::test {

/// Brute-force permanent by explicit permutation sum, O(k! k). Independent
/// of the production algorithm; intended for k <= 6.
inline Complex permanent_bruteforce(const Eigen::MatrixXcd& a) {
  const int k = static_cast<int>(a.rows());
  if (k == 0) return Complex(1.0, 0.0);
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  Complex total(0.0, 0.0);
  do {
    Complex term(1.0, 0.0);
    for (int col = 0; col < k; ++col) term *= a(perm[col], col);
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

/// Max absolute entry of a complex matrix (entrywise infinity norm).
inline double linf(const Eigen::MatrixXcd& a) {
  return a.cwiseAbs().maxCoeff();
}

inline double linf_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return linf(a - b);
}

/// Deviation from unitarity as max |A^dag A - I| entry.
inline double unitarity_defect(const Eigen::MatrixXcd& a) {
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(a.cols(), a.cols());
  return linf(a.adjoint() * a - id);
}

/// Random density matrix supported on the (modes, photons) Fock sector.
inline Eigen::MatrixXcd random_sector_density(int modes, int photons, RngStream& rng) {
  return random_density(cached_basis(modes, photons).size(), rng);
}

/// Random pure density matrix on the sector.
inline Eigen::MatrixXcd random_sector_pure(int modes, int photons, RngStream& rng) {
  const Eigen::VectorXcd psi = haar_state(cached_basis(modes, photons).size(), rng);
  return psi * psi.adjoint();
}

}  // namespace hwrec::test
