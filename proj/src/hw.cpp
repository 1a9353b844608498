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

#include "hwrec/hw.hpp"

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <numeric>

namespace hwrec {

namespace {

constexpr double kPopulationFloor = 1e-12;

Complex omega_pow(int modes, double e) {
  const double a = 2.0 * std::numbers::pi * e / modes;
  return Complex(std::cos(a), std::sin(a));
}

int mod_m(int v, int modes) {
  int r = v % modes;
  return r < 0 ? r + modes : r;
}

void check_density_shape(const Eigen::MatrixXcd& rho, const FockBasis& basis,
                         const char* who) {
  const int d = basis.size();
  if (rho.rows() != d || rho.cols() != d)
    throw std::invalid_argument(std::string(who) + ": density matrix does not match basis dimension");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument(std::string(who) + ": density matrix is not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > 1e-8 || std::abs(rho.trace().imag()) > 1e-8)
    throw std::invalid_argument(std::string(who) + ": density matrix trace is not 1");
}

}  // namespace

Eigen::MatrixXcd mode_shift(int modes) {
  if (modes < 1) throw std::invalid_argument("mode_shift: modes must be >= 1");
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(modes, modes);
  for (int k = 0; k < modes; ++k) x((k + 1) % modes, k) = 1.0;
  return x;
}

Eigen::MatrixXcd phase_shift(int modes) {
  if (modes < 1) throw std::invalid_argument("phase_shift: modes must be >= 1");
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(modes, modes);
  for (int j = 0; j < modes; ++j) z(j, j) = omega_pow(modes, j);
  return z;
}

Eigen::MatrixXcd fourier_matrix(int modes) {
  if (modes < 1) throw std::invalid_argument("fourier_matrix: modes must be >= 1");
  Eigen::MatrixXcd f(modes, modes);
  const double s = 1.0 / std::sqrt(static_cast<double>(modes));
  for (int j = 0; j < modes; ++j)
    for (int k = 0; k < modes; ++k) f(j, k) = s * omega_pow(modes, -static_cast<double>(j) * k);
  return f;
}

Eigen::MatrixXcd hw_matrix(int k, int l, int modes) {
  if (modes < 1) throw std::invalid_argument("hw_matrix: modes must be >= 1");
  const int kk = mod_m(k, modes);
  const int ll = mod_m(l, modes);
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(modes, modes);
  for (int c = 0; c < modes; ++c) w((c + kk) % modes, c) = omega_pow(modes, ll * c);
  return w;
}

int total_mode_index(const FockVector& n, int modes) {
  if (static_cast<int>(n.size()) != modes)
    throw std::invalid_argument("total_mode_index: occupation length does not match mode count");
  long long mu = 0;
  for (int m = 0; m < modes; ++m) mu += static_cast<long long>(m) * n[m];
  return static_cast<int>(mu % modes);
}

FockVector shifted(const FockVector& n) {
  const int modes = static_cast<int>(n.size());
  FockVector out(modes);
  for (int m = 0; m < modes; ++m) out[(m + 1) % modes] = n[m];
  return out;
}

HWOrbit orbit_of(const FockBasis& basis, const FockVector& seed) {
  const int modes = basis.modes();
  // Walk the cycle once to find its period and the canonical seed.
  std::vector<int> cycle;
  FockVector cur = seed;
  int seed_index = basis.index_of(seed);
  int start = seed_index;
  for (int m = 0; m < modes; ++m) {
    const int idx = basis.index_of(cur);
    cycle.push_back(idx);
    if (idx < start) start = idx;
    cur = shifted(cur);
  }
  // The period is the first return to the seed; it always divides M.
  int period = modes;
  for (int p = 1; p < modes; ++p) {
    if (cycle[p] == cycle[0]) { period = p; break; }
  }

  // Representative: earliest canonical member with total mode index zero.
  int rep_index = -1;
  for (int idx : cycle) {
    if (total_mode_index(basis.state(idx), modes) != 0) continue;
    if (rep_index < 0 || idx < rep_index) rep_index = idx;
  }

  HWOrbit orbit;
  orbit.size = period;
  const int anchor = rep_index >= 0 ? rep_index : start;
  orbit.representative = basis.state(anchor);
  orbit.rep_index = rep_index;
  FockVector walk = basis.state(anchor);
  for (int m = 0; m < modes; ++m) {
    orbit.member_indices.push_back(basis.index_of(walk));
    walk = shifted(walk);
  }
  return orbit;
}

std::vector<HWOrbit> orbit_partition(const FockBasis& basis) {
  std::vector<bool> seen(basis.size(), false);
  std::vector<HWOrbit> orbits;
  for (int i = 0; i < basis.size(); ++i) {
    if (seen[i]) continue;
    HWOrbit orbit = orbit_of(basis, basis.state(i));
    for (int idx : orbit.member_indices) seen[idx] = true;
    orbits.push_back(std::move(orbit));
  }
  return orbits;
}

std::vector<HWOrbit> orbit_decomposition(const FockBasis& basis) {
  std::vector<HWOrbit> orbits = orbit_partition(basis);
  for (const HWOrbit& orbit : orbits) {
    if (orbit.rep_index < 0)
      throw RepresentativeNotFound(
          "orbit_decomposition: an orbit has no member with total mode index 0 "
          "(expected when gcd(photons, modes) != 1)");
  }
  return orbits;
}

Eigen::MatrixXcd hw_reduce(const Eigen::MatrixXcd& rho, const FockBasis& basis) {
  check_density_shape(rho, basis, "hw_reduce");
  const int modes = basis.modes();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(modes, modes);
  for (const HWOrbit& orbit : orbit_partition(basis)) {
    if (orbit.rep_index < 0) {
      double population = 0.0;
      for (int m = 0; m < orbit.size; ++m)
        population += rho(orbit.member_indices[m], orbit.member_indices[m]).real();
      if (population > kPopulationFloor)
        throw RepresentativeNotFound(
            "hw_reduce: populated orbit has no member with total mode index 0");
      continue;
    }
    const double weight = static_cast<double>(orbit.size) / modes;
    for (int m = 0; m < modes; ++m)
      for (int mp = 0; mp < modes; ++mp)
        out(m, mp) += weight * rho(orbit.member_indices[m], orbit.member_indices[mp]);
  }
  return out;
}

double ExpectationTable::lambda(int r, int k, int l) const {
  if (r != 0 && r != 1) throw std::invalid_argument("ExpectationTable::lambda: r must be 0 or 1");
  const Complex v = values(k, l);
  return r == 0 ? v.real() : v.imag();
}

namespace {

// Lifted Pauli words are state independent; share them across expectation
// calls for a given sector.
const std::vector<Eigen::MatrixXcd>& lifted_words(const FockBasis& basis) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<Eigen::MatrixXcd>> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_pair(basis.modes(), basis.photons());
  auto it = cache.find(key);
  if (it == cache.end()) {
    std::vector<Eigen::MatrixXcd> words;
    words.reserve(static_cast<std::size_t>(basis.modes()) * basis.modes());
    for (int k = 0; k < basis.modes(); ++k)
      for (int l = 0; l < basis.modes(); ++l)
        words.push_back(lift_operator(hw_matrix(k, l, basis.modes()), basis));
    it = cache.emplace(key, std::move(words)).first;
  }
  return it->second;
}

}  // namespace

ExpectationTable hw_expectations_exact(const Eigen::MatrixXcd& rho,
                                       const FockBasis& basis) {
  check_density_shape(rho, basis, "hw_expectations_exact");
  const int modes = basis.modes();
  const std::vector<Eigen::MatrixXcd>& words = lifted_words(basis);
  ExpectationTable table;
  table.modes = modes;
  table.photons = basis.photons();
  table.values.resize(modes, modes);
  for (int k = 0; k < modes; ++k)
    for (int l = 0; l < modes; ++l)
      table.values(k, l) = (words[static_cast<std::size_t>(k) * modes + l] * rho).trace();
  table.values(0, 0) = Complex(1.0, 0.0);
  return table;
}

Eigen::MatrixXcd reconstruct_hw_reduced(const ExpectationTable& table,
                                        const Eigen::MatrixXd* phase_convention) {
  const int modes = table.modes;
  const int photons = table.photons;
  if (modes < 1) throw std::invalid_argument("reconstruct_hw_reduced: invalid mode count");
  if (table.values.rows() != modes || table.values.cols() != modes)
    throw std::invalid_argument("reconstruct_hw_reduced: incomplete expectation table");
  if (!table.values.allFinite())
    throw std::invalid_argument("reconstruct_hw_reduced: table contains non-finite entries");
  if (std::gcd(photons, modes) != 1)
    throw std::domain_error("reconstruct_hw_reduced: gcd(photons, modes) must be 1");
  if (phase_convention &&
      (phase_convention->rows() != modes || phase_convention->cols() != modes))
    throw std::invalid_argument("reconstruct_hw_reduced: phase convention has wrong shape");

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(modes, modes);
  for (int k = 0; k < modes; ++k) {
    for (int l = 0; l < modes; ++l) {
      Complex v = table.values(k, l);
      if (phase_convention) v *= omega_pow(modes, -static_cast<double>(photons) * (*phase_convention)(k, l));
      out += v * hw_matrix(k, mod_m(photons * l, modes), modes).adjoint();
    }
  }
  return out / static_cast<double>(modes);
}

}  // namespace hwrec
