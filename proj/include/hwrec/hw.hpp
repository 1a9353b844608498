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

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "hwrec/fock.hpp"

namespace hwrec {

/// Index pair (k, l) labelling the generalized Pauli word X^k Z^l.
struct HWIndex {
  int k = 0;
  int l = 0;
};

/// Raised when a cyclic-shift orbit that carries population has no member
/// with total mode index zero, so no canonical representative exists.
class RepresentativeNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cyclic mode-shift matrix X: entry (j, k) = 1 iff j = k+1 (mod M).
Eigen::MatrixXcd mode_shift(int modes);

/// Mode-phase matrix Z = diag(1, w, ..., w^{M-1}) with w = exp(i 2 pi / M).
Eigen::MatrixXcd phase_shift(int modes);

/// Discrete Fourier matrix F with F(j,k) = w^{-jk} / sqrt(M), normalized so
/// that F Z F^dag = X.
Eigen::MatrixXcd fourier_matrix(int modes);

/// Generalized Pauli word X^k Z^l on M modes (exponents taken mod M).
Eigen::MatrixXcd hw_matrix(int k, int l, int modes);

/// Total mode index mu(n) = sum_m m * n_m mod M.
int total_mode_index(const FockVector& n, int modes);

/// Occupation vector of X|n>: every photon moves one mode up cyclically.
FockVector shifted(const FockVector& n);

/// Orbit of a Fock state under powers of the lifted mode shift.
///
/// `member_indices` holds the basis indices of X^m |rep> for m = 0..M-1
/// (with repeats when the orbit period divides M properly).
/// `rep_index` is -1 when no member has total mode index zero; otherwise it
/// is the earliest such member in canonical order and `members` start there.
struct HWOrbit {
  FockVector representative;
  int rep_index = -1;
  int size = 0;
  std::vector<int> member_indices;
};

/// Orbit containing `seed`; always succeeds (rep_index may be -1).
HWOrbit orbit_of(const FockBasis& basis, const FockVector& seed);

/// Partition of the whole sector into shift orbits, in canonical seed order.
/// Does not require representatives to exist.
std::vector<HWOrbit> orbit_partition(const FockBasis& basis);

/// Orbit partition where every orbit must have a canonical representative
/// (guaranteed when gcd(N, M) = 1); throws RepresentativeNotFound otherwise.
std::vector<HWOrbit> orbit_decomposition(const FockBasis& basis);

/// Projects an N-photon density matrix onto its M x M shift-covariant core:
/// out(m, m') = sum_orbits (d_E / M) <X^m rep| rho |X^m' rep>.
/// Orbits without a representative may only carry population below 1e-12;
/// otherwise RepresentativeNotFound is thrown.
Eigen::MatrixXcd hw_reduce(const Eigen::MatrixXcd& rho, const FockBasis& basis);

/// Dense table of generalized Pauli expectation values for one sector.
/// values(k, l) stores <X^k Z^l>; entry (0, 0) is exactly 1. Estimated
/// tables keep the raw real/imag estimates without clipping.
struct ExpectationTable {
  int modes = 0;
  int photons = 0;
  Eigen::MatrixXcd values;

  /// Real observation lambda_{r,k,l} = Re((-i)^r values(k,l)), r in {0, 1}.
  double lambda(int r, int k, int l) const;
};

/// Exact table values(k,l) = tr(lift(X^k Z^l) rho) over the given sector.
ExpectationTable hw_expectations_exact(const Eigen::MatrixXcd& rho,
                                       const FockBasis& basis);

/// Linear inversion of a complete expectation table into the M x M reduced
/// matrix: (1/M) sum_{k,l} values(k,l) * phase * (X^k Z^{Nl mod M})^dag.
///
/// `phase_convention` optionally supplies per-index angles theta(k,l) when
/// the table was measured with rephased words w^{theta} X^k Z^l; the inverse
/// then applies w^{-N theta(k,l)} per term. Requires gcd(N, M) = 1.
Eigen::MatrixXcd reconstruct_hw_reduced(const ExpectationTable& table,
                                        const Eigen::MatrixXd* phase_convention = nullptr);

}  // namespace hwrec
