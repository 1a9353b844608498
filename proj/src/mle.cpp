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

#include "hwrec/mle.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hwrec/rng.hpp"

namespace hwrec {

namespace {

constexpr double kVarianceFloor = 1e-6;

Eigen::MatrixXcd triangular_factor(const Eigen::VectorXd& t, int modes) {
  if (t.size() != static_cast<Eigen::Index>(modes) * modes)
    throw std::invalid_argument("cholesky parameters must have length modes^2");
  Eigen::MatrixXcd factor = Eigen::MatrixXcd::Zero(modes, modes);
  Eigen::Index p = 0;
  for (int r = 0; r < modes; ++r) {
    for (int c = 0; c < r; ++c) {
      factor(r, c) = Complex(t(p), t(p + 1));
      p += 2;
    }
    factor(r, r) = Complex(t(p), 0.0);
    p += 1;
  }
  return factor;
}

// One observed channel: Hermitian part of (-i)^r X^k Z^{Nl mod M}.
struct Channel {
  int r, k, l;
  Eigen::MatrixXcd h;
};

std::vector<Channel> build_channels(int modes, int photons) {
  if (std::gcd(photons, modes) != 1)
    throw std::domain_error("likelihood model requires gcd(photons, modes) = 1");
  std::vector<Channel> channels;
  const Complex minus_i(0.0, -1.0);
  for (int k = 0; k < modes; ++k) {
    for (int l = 0; l < modes; ++l) {
      if (k == 0 && l == 0) continue;
      const Eigen::MatrixXcd word = hw_matrix(k, (photons * l) % modes, modes);
      for (int r = 0; r < 2; ++r) {
        const Complex c = r == 0 ? Complex(1.0, 0.0) : minus_i;
        Channel ch;
        ch.r = r;
        ch.k = k;
        ch.l = l;
        ch.h = 0.5 * (c * word + (c * word).adjoint());
        channels.push_back(std::move(ch));
      }
    }
  }
  return channels;
}

void check_table(const ExpectationTable& observed) {
  if (observed.modes < 2)
    throw std::invalid_argument("expectation table has invalid mode count");
  if (observed.values.rows() != observed.modes || observed.values.cols() != observed.modes)
    throw std::invalid_argument("expectation table is incomplete");
  if (!observed.values.allFinite())
    throw std::invalid_argument("expectation table contains non-finite entries");
}

struct Objective {
  int modes;
  std::vector<Channel> channels;
  std::vector<double> lambda_obs;

  Objective(const ExpectationTable& observed)
      : modes(observed.modes), channels(build_channels(observed.modes, observed.photons)) {
    check_table(observed);
    lambda_obs.reserve(channels.size());
    for (const Channel& ch : channels)
      lambda_obs.push_back(observed.lambda(ch.r, ch.k, ch.l));
  }

  double value(const Eigen::VectorXd& t) const {
    const Eigen::MatrixXcd factor = triangular_factor(t, modes);
    const Eigen::MatrixXcd gram = factor.adjoint() * factor;
    const double s = gram.trace().real();
    if (!(s > 0.0)) throw std::invalid_argument("cholesky parameters must not be all zero");
    double total = 0.0;
    for (std::size_t c = 0; c < channels.size(); ++c) {
      const double lam = (channels[c].h * gram).trace().real() / s;
      const double res = lambda_obs[c] - lam;
      total += res * res / std::max(1.0 - lam * lam, kVarianceFloor);
    }
    return total;
  }

  double value_and_gradient(const Eigen::VectorXd& t, Eigen::VectorXd& grad) const {
    const Eigen::MatrixXcd factor = triangular_factor(t, modes);
    const Eigen::MatrixXcd gram = factor.adjoint() * factor;
    const double s = gram.trace().real();
    if (!(s > 0.0)) throw std::invalid_argument("cholesky parameters must not be all zero");

    double total = 0.0;
    Eigen::MatrixXcd dual = Eigen::MatrixXcd::Zero(modes, modes);
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(modes, modes);
    for (std::size_t c = 0; c < channels.size(); ++c) {
      const double lam = (channels[c].h * gram).trace().real() / s;
      const double res = lambda_obs[c] - lam;
      const double den_raw = 1.0 - lam * lam;
      double value, dvalue;  // contribution and d/d lambda
      if (den_raw > kVarianceFloor) {
        value = res * res / den_raw;
        dvalue = -2.0 * res / den_raw + res * res * 2.0 * lam / (den_raw * den_raw);
      } else {
        value = res * res / kVarianceFloor;
        dvalue = -2.0 * res / kVarianceFloor;
      }
      total += value;
      dual += dvalue * (channels[c].h - lam * eye) / s;
    }

    // d L = 2 Re tr(W dT) with W = dual * T^dag; map entries back onto the
    // row-major lower-triangular parameter layout.
    const Eigen::MatrixXcd w = dual * factor.adjoint();
    grad.resize(t.size());
    Eigen::Index p = 0;
    for (int r = 0; r < modes; ++r) {
      for (int c = 0; c < r; ++c) {
        grad(p) = 2.0 * w(c, r).real();
        grad(p + 1) = -2.0 * w(c, r).imag();
        p += 2;
      }
      grad(p) = 2.0 * w(r, r).real();
      p += 1;
    }
    return total;
  }
};

}  // namespace

Eigen::MatrixXcd cholesky_density(const Eigen::VectorXd& t, int modes) {
  if (modes < 1) throw std::invalid_argument("cholesky_density: modes must be >= 1");
  const Eigen::MatrixXcd factor = triangular_factor(t, modes);
  const Eigen::MatrixXcd gram = factor.adjoint() * factor;
  const double s = gram.trace().real();
  if (!(s > 0.0))
    throw std::invalid_argument("cholesky_density: parameter vector must not be all zero");
  return gram / s;
}

Eigen::VectorXd params_from_density(const Eigen::MatrixXcd& rho) {
  const int modes = static_cast<int>(rho.rows());
  if (rho.cols() != modes || modes < 1)
    throw std::invalid_argument("params_from_density: matrix must be square");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("params_from_density: matrix is not Hermitian");

  Eigen::MatrixXcd flip = Eigen::MatrixXcd::Zero(modes, modes);
  for (int i = 0; i < modes; ++i) flip(i, modes - 1 - i) = 1.0;

  // rho = T^dag T needs T lower triangular; factor J rho J = L L^dag and
  // take T = (J L J)^dag. A tiny ridge covers rank-deficient inputs.
  Eigen::MatrixXcd lower;
  bool ok = false;
  for (double ridge : {0.0, 1e-14, 1e-12, 1e-10, 1e-8, 1e-6}) {
    Eigen::MatrixXcd a = flip * rho * flip;
    a += ridge * Eigen::MatrixXcd::Identity(modes, modes);
    a = 0.5 * (a + a.adjoint());
    Eigen::LLT<Eigen::MatrixXcd> llt(a);
    if (llt.info() == Eigen::Success) {
      lower = llt.matrixL();
      ok = true;
      break;
    }
  }
  if (!ok) throw std::invalid_argument("params_from_density: matrix is not PSD");

  const Eigen::MatrixXcd factor = (flip * lower * flip).adjoint();
  Eigen::VectorXd t(static_cast<Eigen::Index>(modes) * modes);
  Eigen::Index p = 0;
  for (int r = 0; r < modes; ++r) {
    for (int c = 0; c < r; ++c) {
      t(p) = factor(r, c).real();
      t(p + 1) = factor(r, c).imag();
      p += 2;
    }
    t(p) = factor(r, r).real();
    p += 1;
  }
  return t;
}

double predicted_lambda(const Eigen::VectorXd& t, int modes, int photons, int r,
                        int k, int l) {
  if (r != 0 && r != 1) throw std::invalid_argument("predicted_lambda: r must be 0 or 1");
  if (std::gcd(photons, modes) != 1)
    throw std::domain_error("predicted_lambda: gcd(photons, modes) must be 1");
  const Eigen::MatrixXcd rho = cholesky_density(t, modes);
  const int kk = ((k % modes) + modes) % modes;
  const int ll = ((l % modes) + modes) % modes;
  const Complex v = (hw_matrix(kk, (photons * ll) % modes, modes) * rho).trace();
  const Complex phase = r == 0 ? Complex(1.0, 0.0) : Complex(0.0, -1.0);
  return (phase * v).real();
}

double log_likelihood(const Eigen::VectorXd& t, const ExpectationTable& observed) {
  return Objective(observed).value(t);
}

Eigen::VectorXd log_likelihood_gradient(const Eigen::VectorXd& t,
                                        const ExpectationTable& observed) {
  Eigen::VectorXd grad;
  Objective(observed).value_and_gradient(t, grad);
  return grad;
}

namespace {

struct BfgsOutcome {
  Eigen::VectorXd t;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

BfgsOutcome minimize(const Objective& objective, Eigen::VectorXd t,
                     const FitOptions& options, std::vector<double>* trace) {
  const Eigen::Index n = t.size();
  if (t.norm() == 0.0) t.setConstant(1.0);
  t /= t.norm();

  Eigen::VectorXd grad(n);
  double f = objective.value_and_gradient(t, grad);
  if (trace) trace->push_back(f);

  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  BfgsOutcome out;
  int iter = 0;
  for (; iter < options.max_iter; ++iter) {
    if (grad.lpNorm<Eigen::Infinity>() < 1e-12) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd dir = -(hinv * grad);
    double slope = grad.dot(dir);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      dir = -grad;
      slope = grad.dot(dir);
      if (!(slope < 0.0)) {
        out.converged = true;
        break;
      }
    }

    // Armijo backtracking keeps accepted objectives non-increasing.
    double alpha = 1.0;
    double f_new = f;
    Eigen::VectorXd t_new;
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      t_new = t + alpha * dir;
      if (t_new.norm() > 0.0) {
        f_new = objective.value(t_new);
        if (f_new <= f + 1e-4 * alpha * slope) {
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      out.converged = true;  // no descent representable at double precision
      break;
    }

    Eigen::VectorXd grad_new(n);
    objective.value_and_gradient(t_new, grad_new);

    const Eigen::VectorXd step = t_new - t;
    const Eigen::VectorXd dg = grad_new - grad;
    const double sy = step.dot(dg);
    if (sy > 1e-12 * step.norm() * dg.norm()) {
      const double rho_bfgs = 1.0 / sy;
      const Eigen::MatrixXd outer_sy = step * dg.transpose();
      hinv = hinv - rho_bfgs * (outer_sy * hinv + hinv * outer_sy.transpose()) +
             rho_bfgs * rho_bfgs * (dg.dot(hinv * dg)) * (step * step.transpose()) +
             rho_bfgs * (step * step.transpose());
    }

    const double improvement = f - f_new;
    t = t_new;
    f = f_new;
    grad = grad_new;
    if (trace) trace->push_back(f);

    // Rescaling does not change the objective but keeps the scale-free
    // parameters from drifting out of floating-point comfort.
    if (t.norm() > 1e3 || t.norm() < 1e-3) {
      t /= t.norm();
      hinv.setIdentity();
      objective.value_and_gradient(t, grad);
    }

    if (improvement < options.tol) {
      out.converged = true;
      ++iter;
      break;
    }
  }
  out.t = t;
  out.objective = f;
  out.iterations = iter;
  return out;
}

}  // namespace

FitResult fit(const ExpectationTable& observed, const FitOptions& options) {
  check_table(observed);
  const Objective objective(observed);
  const int modes = observed.modes;

  // Warm start: linear inversion projected back onto physical states.
  Eigen::MatrixXcd rho0 = reconstruct_hw_reduced(observed);
  rho0 = 0.5 * (rho0 + rho0.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho0);
  Eigen::VectorXd evals = es.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXcd rho_init;
  if (evals.sum() < 1e-12) {
    rho_init = Eigen::MatrixXcd::Identity(modes, modes) / modes;
  } else {
    rho_init = es.eigenvectors() * evals.asDiagonal() * es.eigenvectors().adjoint();
    rho_init /= rho_init.trace().real();
  }
  // Tiny maximally-mixed admixture keeps the Cholesky factor full rank.
  rho_init = (1.0 - 1e-6) * rho_init +
             1e-6 * Eigen::MatrixXcd::Identity(modes, modes) / modes;

  std::vector<double> trace;
  BfgsOutcome best = minimize(objective, params_from_density(rho_init), options,
                              options.record_trace ? &trace : nullptr);

  for (int restart = 0; restart < options.restarts; ++restart) {
    RngStream stream = RngStream::derive(options.seed, {0xf17u, static_cast<std::uint64_t>(restart)});
    Eigen::VectorXd t0(static_cast<Eigen::Index>(modes) * modes);
    for (Eigen::Index i = 0; i < t0.size(); ++i) t0(i) = stream.normal();
    std::vector<double> restart_trace;
    BfgsOutcome alt = minimize(objective, t0, options,
                               options.record_trace ? &restart_trace : nullptr);
    if (alt.objective < best.objective) {
      best = alt;
      trace = std::move(restart_trace);
    }
  }

  FitResult result;
  result.rho = cholesky_density(best.t, modes);
  result.final_objective = best.objective;
  result.iterations = best.iterations;
  result.converged = best.converged;
  result.trace = std::move(trace);
  return result;
}

double fidelity(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const int dim = static_cast<int>(a.rows());
  if (a.cols() != dim || b.rows() != dim || b.cols() != dim)
    throw std::invalid_argument("fidelity: matrices must be square and same size");
  auto validate = [dim](const Eigen::MatrixXcd& m, const char* name) {
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-8)
      throw std::invalid_argument(std::string("fidelity: ") + name + " is not Hermitian");
    if (std::abs(m.trace().real() - 1.0) > 1e-8)
      throw std::invalid_argument(std::string("fidelity: ") + name + " has trace != 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()));
    if (es.eigenvalues().minCoeff() < -1e-8)
      throw std::invalid_argument(std::string("fidelity: ") + name + " is not PSD within tolerance");
  };
  validate(a, "first argument");
  validate(b, "second argument");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(0.5 * (a + a.adjoint()));
  const Eigen::VectorXd cla = ea.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXcd sqrt_a =
      ea.eigenvectors() * cla.asDiagonal() * ea.eigenvectors().adjoint();
  Eigen::MatrixXcd inner = sqrt_a * b * sqrt_a;
  inner = 0.5 * (inner + inner.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ei(inner);
  const double root_sum = ei.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return root_sum * root_sum;
}

}  // namespace hwrec
