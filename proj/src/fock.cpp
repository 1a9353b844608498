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

#include "hwrec/fock.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace hwrec {

namespace {

void enumerate_rec(int mode, int modes, int remaining, FockVector& cur,
                   std::vector<FockVector>& out) {
  if (mode == modes - 1) {
    cur[mode] = remaining;
    out.push_back(cur);
    return;
  }
  for (int c = remaining; c >= 0; --c) {
    cur[mode] = c;
    enumerate_rec(mode + 1, modes, remaining - c, cur, out);
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

FockBasis::FockBasis(int modes, int photons) : modes_(modes), photons_(photons) {
  if (modes < 1) throw std::invalid_argument("FockBasis: modes must be >= 1");
  if (photons < 0) throw std::invalid_argument("FockBasis: photons must be >= 0");
  FockVector cur(modes, 0);
  enumerate_rec(0, modes, photons, cur, states_);
  for (int i = 0; i < static_cast<int>(states_.size()); ++i) index_[states_[i]] = i;
}

int FockBasis::index_of(const FockVector& n) const {
  if (static_cast<int>(n.size()) != modes_)
    throw std::invalid_argument("FockBasis::index_of: occupation length does not match mode count");
  int total = 0;
  for (int v : n) {
    if (v < 0) throw std::invalid_argument("FockBasis::index_of: negative occupation");
    total += v;
  }
  if (total != photons_)
    throw std::invalid_argument("FockBasis::index_of: photon total does not match sector");
  auto it = index_.find(n);
  if (it == index_.end()) throw std::logic_error("FockBasis::index_of: state missing from index");
  return it->second;
}

FockBasis enumerate_basis(int modes, int photons) { return FockBasis(modes, photons); }

const FockBasis& cached_basis(int modes, int photons) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, FockBasis> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(modes, photons);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, FockBasis(modes, photons)).first;
  return it->second;
}

Complex permanent(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("permanent: matrix must be square");
  const int k = static_cast<int>(a.rows());
  if (k == 0) return Complex(1.0, 0.0);
  if (k > 62) throw std::invalid_argument("permanent: dimension too large for subset enumeration");

  // Ryser: Perm(A) = (-1)^k sum_{S != 0} (-1)^{|S|} prod_i sum_{j in S} A_ij.
  // Gray-code order updates the row sums with one column per subset.
  Eigen::VectorXcd rowsum = Eigen::VectorXcd::Zero(k);
  Complex total(0.0, 0.0);
  std::uint64_t prev_gray = 0;
  const std::uint64_t limit = std::uint64_t{1} << k;
  for (std::uint64_t s = 1; s < limit; ++s) {
    const std::uint64_t gray = s ^ (s >> 1);
    const std::uint64_t diff = gray ^ prev_gray;
    const int j = std::countr_zero(diff);
    if (gray & diff)
      rowsum += a.col(j);
    else
      rowsum -= a.col(j);
    Complex prod(1.0, 0.0);
    for (int i = 0; i < k; ++i) prod *= rowsum(i);
    const int parity = (k - std::popcount(gray)) & 1;
    total += parity ? -prod : prod;
    prev_gray = gray;
  }
  return total;
}

Complex lift_entry(const Eigen::MatrixXcd& a, const FockVector& out,
                   const FockVector& in) {
  const int modes = static_cast<int>(a.rows());
  if (a.cols() != modes) throw std::invalid_argument("lift_entry: mode matrix must be square");
  if (static_cast<int>(out.size()) != modes || static_cast<int>(in.size()) != modes)
    throw std::invalid_argument("lift_entry: occupation length does not match mode count");
  const int n_out = std::accumulate(out.begin(), out.end(), 0);
  const int n_in = std::accumulate(in.begin(), in.end(), 0);
  if (n_out != n_in)
    throw std::invalid_argument("lift_entry: photon totals differ between sectors");
  if (n_in == 0) return Complex(1.0, 0.0);

  Eigen::MatrixXcd sub(n_out, n_in);
  int r = 0;
  for (int mo = 0; mo < modes; ++mo) {
    for (int cnt = 0; cnt < out[mo]; ++cnt, ++r) {
      int c = 0;
      for (int mi = 0; mi < modes; ++mi)
        for (int k = 0; k < in[mi]; ++k, ++c) sub(r, c) = a(mo, mi);
    }
  }
  double norm = 1.0;
  for (int m = 0; m < modes; ++m) norm *= factorial(out[m]) * factorial(in[m]);
  return permanent(sub) / std::sqrt(norm);
}

Eigen::MatrixXcd lift_operator(const Eigen::MatrixXcd& a, const FockBasis& basis) {
  if (a.rows() != basis.modes() || a.cols() != basis.modes())
    throw std::invalid_argument("lift_operator: mode matrix does not match basis mode count");
  const int d = basis.size();
  Eigen::MatrixXcd lifted(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) lifted(i, j) = lift_entry(a, basis.state(i), basis.state(j));
  return lifted;
}

}  // namespace hwrec
