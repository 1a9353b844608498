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

#include "hwrec/clements.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace hwrec {

namespace {

using Cx = std::complex<double>;

Cx phase(double a) { return Cx(std::cos(a), std::sin(a)); }

// In-place column update V <- V * T^{-1}(a; theta, phi).
void apply_right_inverse(Eigen::MatrixXcd& v, int a, double theta, double phi) {
  const double c = std::cos(theta), s = std::sin(theta);
  const Cx e = phase(-phi);
  const Eigen::VectorXcd col_a = v.col(a);
  const Eigen::VectorXcd col_b = v.col(a + 1);
  v.col(a) = e * c * col_a - s * col_b;
  v.col(a + 1) = e * s * col_a + c * col_b;
}

// In-place row update V <- T(a; theta, phi) * V.
void apply_left(Eigen::MatrixXcd& v, int a, double theta, double phi) {
  const double c = std::cos(theta), s = std::sin(theta);
  const Cx e = phase(phi);
  const Eigen::RowVectorXcd row_a = v.row(a);
  const Eigen::RowVectorXcd row_b = v.row(a + 1);
  v.row(a) = e * c * row_a - s * row_b;
  v.row(a + 1) = e * s * row_a + c * row_b;
}

}  // namespace

ClementsPlan decompose(const Eigen::MatrixXcd& u) {
  const int dim = static_cast<int>(u.rows());
  if (u.cols() != dim || dim < 1) throw std::invalid_argument("decompose: matrix must be square");
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(dim, dim);
  if ((u.adjoint() * u - eye).norm() > 1e-8)
    throw std::invalid_argument("decompose: matrix is not unitary within 1e-8");

  Eigen::MatrixXcd v = u;
  std::vector<MZElement> rights;
  std::vector<MZElement> lefts;  // in application order

  for (int l = 0; l < dim - 1; ++l) {
    if (l % 2 == 0) {
      // Null V(dim-1-j, l-j) from the right with modes (l-j, l-j+1).
      for (int j = 0; j <= l; ++j) {
        const int row = dim - 1 - j;
        const int a = l - j;
        const Cx u1 = v(row, a);
        const Cx u2 = v(row, a + 1);
        double theta = std::atan2(std::abs(u1), std::abs(u2));
        double phi = 0.0;
        if (std::abs(u1) > 0.0 && std::abs(u2) > 0.0)
          phi = std::arg(u1) - std::arg(u2);
        apply_right_inverse(v, a, theta, phi);
        rights.push_back({a, theta, phi});
      }
    } else {
      // Null V(dim+j-l-1, j) from the left with modes one row above.
      for (int j = 0; j <= l; ++j) {
        const int row = dim + j - l - 1;
        const int a = row - 1;
        const Cx u1 = v(a, j);
        const Cx u2 = v(row, j);
        double theta = std::atan2(std::abs(u2), std::abs(u1));
        double phi = 0.0;
        if (std::abs(u1) > 0.0 && std::abs(u2) > 0.0)
          phi = std::arg(-u2) - std::arg(u1);
        apply_left(v, a, theta, phi);
        lefts.push_back({a, theta, phi});
      }
    }
  }

  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      if (i != j && std::abs(v(i, j)) > 1e-9)
        throw std::logic_error("decompose: elimination left a non-diagonal residue");

  // U = L1^{-1} ... Lp^{-1} D R_q ... R_1. Push each L^{-1} (innermost
  // first) through the diagonal: T^{-1}(theta, phi) D = D' T(theta, phi')
  // with phi' = arg(-d_a / d_b), d_a' = -e^{-i phi} d_b, d_b' = d_b.
  Eigen::VectorXcd d(dim);
  for (int i = 0; i < dim; ++i) d(i) = v(i, i);

  ClementsPlan plan;
  plan.dim = dim;
  plan.elements = std::move(rights);
  for (int i = static_cast<int>(lefts.size()) - 1; i >= 0; --i) {
    const MZElement& el = lefts[i];
    const Cx da = d(el.mode_lo);
    const Cx db = d(el.mode_lo + 1);
    const double phi_new = std::arg(-da / db);
    d(el.mode_lo) = -phase(-el.phi) * db;
    plan.elements.push_back({el.mode_lo, el.theta, phi_new});
  }

  plan.output_phases.resize(dim);
  for (int i = 0; i < dim; ++i) plan.output_phases[i] = std::arg(d(i));
  return plan;
}

Eigen::MatrixXcd compose(const ClementsPlan& plan) {
  if (plan.dim < 1) throw std::invalid_argument("compose: plan dimension must be >= 1");
  if (static_cast<int>(plan.output_phases.size()) != plan.dim)
    throw std::invalid_argument("compose: output phase layer has wrong size");
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(plan.dim, plan.dim);
  for (const MZElement& el : plan.elements) {
    if (el.mode_lo < 0 || el.mode_lo + 1 >= plan.dim)
      throw std::invalid_argument("compose: element acts outside the mesh");
    apply_left(a, el.mode_lo, el.theta, el.phi);
  }
  for (int i = 0; i < plan.dim; ++i) a.row(i) *= phase(plan.output_phases[i]);
  return a;
}

ClementsPlan perturb(const ClementsPlan& plan, const NoiseSpec& noise, RngStream& rng) {
  if (noise.delta_theta < 0.0 || noise.delta_phi < 0.0)
    throw std::invalid_argument("perturb: noise widths must be non-negative");
  ClementsPlan out = plan;
  for (MZElement& el : out.elements) {
    // Draws happen even at zero width so the stream position is independent
    // of the noise level; the skip keeps zero-width output bit-identical.
    const double dt = rng.normal(0.0, noise.delta_theta);
    const double dp = rng.normal(0.0, noise.delta_phi);
    if (noise.delta_theta != 0.0) el.theta += dt;
    if (noise.delta_phi != 0.0) el.phi += dp;
  }
  return out;
}

Eigen::MatrixXcd noisy_unitary(const Eigen::MatrixXcd& u, const NoiseSpec& noise,
                               RngStream& rng) {
  return compose(perturb(decompose(u), noise, rng));
}

}  // namespace hwrec
