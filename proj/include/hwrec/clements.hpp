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

#include <vector>

#include <Eigen/Dense>

#include "hwrec/rng.hpp"

namespace hwrec {

/// One Mach-Zehnder element acting on neighbouring modes (mode_lo, mode_lo+1)
/// as the block
///   [ e^{i phi} cos(theta)   -sin(theta) ]
///   [ e^{i phi} sin(theta)    cos(theta) ].
struct MZElement {
  int mode_lo = 0;
  double theta = 0.0;
  double phi = 0.0;
};

/// Rectangular mesh program: `elements` applied in order (each one
/// left-multiplies the running matrix), then a final layer of per-mode
/// output phases. A dim-mode unitary uses dim*(dim-1)/2 elements.
struct ClementsPlan {
  int dim = 0;
  std::vector<MZElement> elements;
  std::vector<double> output_phases;
};

/// Gaussian angle jitter applied to every element; standard deviations in
/// radians. The output phase layer is never perturbed.
struct NoiseSpec {
  double delta_theta = 0.0;
  double delta_phi = 0.0;
};

/// Exact mesh program for a unitary (must be unitary within 1e-8).
ClementsPlan decompose(const Eigen::MatrixXcd& u);

/// Multiplies the mesh program back into a dim x dim matrix.
Eigen::MatrixXcd compose(const ClementsPlan& plan);

/// Per-element jitter: theta += N(0, delta_theta), phi += N(0, delta_phi),
/// drawn in element order (theta first). Zero widths return the plan
/// unchanged bit for bit while consuming the same number of draws.
ClementsPlan perturb(const ClementsPlan& plan, const NoiseSpec& noise, RngStream& rng);

/// compose(perturb(decompose(u))) convenience wrapper.
Eigen::MatrixXcd noisy_unitary(const Eigen::MatrixXcd& u, const NoiseSpec& noise,
                               RngStream& rng);

}  // namespace hwrec
