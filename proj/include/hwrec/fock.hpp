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

#include <complex>
#include <map>
#include <vector>

#include <Eigen/Dense>

namespace hwrec {

using Complex = std::complex<double>;

/// Mode occupation list; entry m is the photon count in mode m.
using FockVector = std::vector<int>;

/// Fixed-photon-number sector of M modes with N photons.
///
/// States are enumerated once in canonical order: lexicographically
/// descending occupation vectors, so |N,0,...,0> is index 0 and
/// |0,...,0,N> comes last. Dimension is binomial(M+N-1, N).
class FockBasis {
 public:
  FockBasis(int modes, int photons);

  int modes() const { return modes_; }
  int photons() const { return photons_; }
  int size() const { return static_cast<int>(states_.size()); }
  const std::vector<FockVector>& states() const { return states_; }
  const FockVector& state(int i) const { return states_.at(i); }

  /// Canonical index of an occupation vector; throws if it is not a member
  /// of this sector (wrong length, negative entry, or wrong photon total).
  int index_of(const FockVector& n) const;

 private:
  int modes_;
  int photons_;
  std::vector<FockVector> states_;
  std::map<FockVector, int> index_;
};

/// Enumerates the N-photon sector of M modes in canonical order.
FockBasis enumerate_basis(int modes, int photons);

/// Shared immutable basis cache keyed by (modes, photons); thread safe.
const FockBasis& cached_basis(int modes, int photons);

/// Permanent of a square complex matrix (Ryser's formula with Gray-code
/// subset updates, O(2^k k)). The empty matrix has permanent 1.
Complex permanent(const Eigen::MatrixXcd& a);

/// Single entry <out|lift(a)|in> = Perm(a[out,in]) / sqrt(out! in!), where
/// a[out,in] repeats row m' out[m'] times and column m in[m] times.
Complex lift_entry(const Eigen::MatrixXcd& a, const FockVector& out,
                   const FockVector& in);

/// Lift of an M x M mode matrix to the N-photon sector of `basis`.
/// Multiplicative (lift(AB) = lift(A) lift(B)) and unitary-preserving.
Eigen::MatrixXcd lift_operator(const Eigen::MatrixXcd& a, const FockBasis& basis);

}  // namespace hwrec
