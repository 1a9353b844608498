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

#include "hwrec/dqc1.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace hwrec {

namespace {

void check_unitary(const Eigen::MatrixXcd& a, const char* who) {
  if (a.rows() != a.cols()) throw std::invalid_argument(std::string(who) + ": matrix must be square");
  const Eigen::MatrixXcd gram = a.adjoint() * a;
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
  if ((gram - eye).norm() > 1e-8)
    throw std::invalid_argument(std::string(who) + ": matrix is not unitary within 1e-8");
}

bool is_prime(int n) {
  if (n < 2) return false;
  for (int p = 2; static_cast<long long>(p) * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

// Embedding data for probes on M of 2M modes, shared across circuits.
struct SectorGeometry {
  const FockBasis* in_basis;
  const FockBasis* out_basis;
  std::vector<FockVector> embedded_in;  // probe states padded with vacuum
  std::vector<int> lower_count;         // ancilla-arm photons per out state
};

const SectorGeometry& cached_geometry(int modes, int photons) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, SectorGeometry> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_pair(modes, photons);
  auto it = cache.find(key);
  if (it == cache.end()) {
    SectorGeometry g;
    g.in_basis = &cached_basis(modes, photons);
    g.out_basis = &cached_basis(2 * modes, photons);
    for (const FockVector& n : g.in_basis->states()) {
      FockVector padded(2 * modes, 0);
      for (int m = 0; m < modes; ++m) padded[m] = n[m];
      g.embedded_in.push_back(std::move(padded));
    }
    for (const FockVector& n : g.out_basis->states()) {
      int lower = 0;
      for (int m = modes; m < 2 * modes; ++m) lower += n[m];
      g.lower_count.push_back(lower);
    }
    it = cache.emplace(key, std::move(g)).first;
  }
  return it->second;
}

int infer_photons(int modes, Eigen::Index dim) {
  for (int n = 0; n <= 256; ++n) {
    const Eigen::Index d = cached_basis(modes, n).size();
    if (d == dim) return n;
    if (d > dim) break;
  }
  throw std::invalid_argument("outcome_distribution: state dimension matches no photon sector");
}

Eigen::MatrixXcd lift_submatrix(const Eigen::MatrixXcd& t, const SectorGeometry& g) {
  const int d_out = g.out_basis->size();
  const int d_in = g.in_basis->size();
  Eigen::MatrixXcd sub(d_out, d_in);
  for (int o = 0; o < d_out; ++o)
    for (int i = 0; i < d_in; ++i)
      sub(o, i) = lift_entry(t, g.out_basis->state(o), g.embedded_in[i]);
  return sub;
}

// Pure state or density matrix in one probe sector.
struct StateRef {
  const Eigen::VectorXcd* psi = nullptr;
  const Eigen::MatrixXcd* rho = nullptr;

  Eigen::Index dim() const { return psi ? psi->size() : rho->rows(); }
};

std::vector<double> distribution_impl(const StateRef& state, const Eigen::MatrixXcd& t,
                                      int modes, int photons) {
  const SectorGeometry& g = cached_geometry(modes, photons);
  if (state.dim() != g.in_basis->size())
    throw std::invalid_argument("outcome_distribution: state dimension does not match sector");
  const Eigen::MatrixXcd sub = lift_submatrix(t, g);
  std::vector<double> probs(static_cast<std::size_t>(photons) + 1, 0.0);
  if (state.psi) {
    const Eigen::VectorXcd amp = sub * (*state.psi);
    for (int o = 0; o < g.out_basis->size(); ++o)
      probs[g.lower_count[o]] += std::norm(amp(o));
  } else {
    const Eigen::MatrixXcd half = sub * (*state.rho);
    for (int o = 0; o < g.out_basis->size(); ++o)
      probs[g.lower_count[o]] += (half.row(o) * sub.row(o).adjoint()).value().real();
  }
  return probs;
}

double zeta_from_distribution(const std::vector<double>& probs) {
  double z = 0.0;
  double sign = 1.0;
  for (double p : probs) {
    z += sign * p;
    sign = -sign;
  }
  return z;
}

void check_probe(const StateRef& state) {
  if (state.psi) {
    if (std::abs(state.psi->norm() - 1.0) > 1e-8)
      throw std::invalid_argument("probe state is not normalized");
  } else {
    if ((*state.rho - state.rho->adjoint()).cwiseAbs().maxCoeff() > 1e-8)
      throw std::invalid_argument("probe density matrix is not Hermitian");
    if (std::abs(state.rho->trace().real() - 1.0) > 1e-8)
      throw std::invalid_argument("probe density matrix trace is not 1");
  }
}

}  // namespace

DQC1Circuit build_circuit(const Eigen::MatrixXcd& w, const Eigen::MatrixXcd& v) {
  if (w.rows() != v.rows() || w.cols() != v.cols())
    throw std::invalid_argument("build_circuit: W and V must act on the same modes");
  check_unitary(w, "build_circuit (W)");
  check_unitary(v, "build_circuit (V)");
  const int m = static_cast<int>(w.rows());
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(m, m);

  Eigen::MatrixXcd splitter(2 * m, 2 * m);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  splitter << eye, eye, eye, -eye;
  splitter *= inv_sqrt2;

  Eigen::MatrixXcd pre = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
  pre.topLeftCorner(m, m) = w;
  pre.bottomRightCorner(m, m) = eye;

  Eigen::MatrixXcd mid = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
  mid.topLeftCorner(m, m) = eye;
  mid.bottomRightCorner(m, m) = v;

  Eigen::MatrixXcd post = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
  post.topLeftCorner(m, m) = w.adjoint();
  post.bottomRightCorner(m, m) = eye;

  DQC1Circuit circuit;
  circuit.modes = m;
  circuit.w = w;
  circuit.v = v;
  circuit.t = post * splitter.adjoint() * mid * splitter * pre;
  return circuit;
}

std::vector<double> outcome_distribution(const Eigen::VectorXcd& psi,
                                         const DQC1Circuit& circuit) {
  StateRef state;
  state.psi = &psi;
  check_probe(state);
  return distribution_impl(state, circuit.t, circuit.modes,
                           infer_photons(circuit.modes, psi.size()));
}

std::vector<double> outcome_distribution(const Eigen::MatrixXcd& rho,
                                         const DQC1Circuit& circuit) {
  StateRef state;
  state.rho = &rho;
  check_probe(state);
  return distribution_impl(state, circuit.t, circuit.modes,
                           infer_photons(circuit.modes, rho.rows()));
}

double zeta_exact(const Eigen::VectorXcd& psi, const DQC1Circuit& circuit) {
  return zeta_from_distribution(outcome_distribution(psi, circuit));
}

double zeta_exact(const Eigen::MatrixXcd& rho, const DQC1Circuit& circuit) {
  return zeta_from_distribution(outcome_distribution(rho, circuit));
}

std::pair<double, ShotTally> sample_zeta(const std::vector<double>& distribution,
                                         std::int64_t n_shot, RngStream& rng) {
  if (n_shot < 1) throw std::invalid_argument("sample_zeta: n_shot must be >= 1");
  ShotTally tally;
  tally.counts = multinomial_sample(distribution, n_shot, rng);
  tally.total = n_shot;
  double acc = 0.0;
  double sign = 1.0;
  for (std::int64_t c : tally.counts) {
    acc += sign * static_cast<double>(c);
    sign = -sign;
  }
  return {acc / static_cast<double>(n_shot), std::move(tally)};
}

std::vector<MeasurementConfig> measurement_schedule(int modes, int photons) {
  if (!is_prime(modes))
    throw std::domain_error("measurement_schedule: mode count must be prime");
  if (photons < 1 || photons >= modes)
    throw std::domain_error("measurement_schedule: photon number must satisfy 1 <= N < M");

  std::vector<MeasurementConfig> schedule;
  schedule.reserve(static_cast<std::size_t>(2 * modes) * (modes * modes - 1));
  auto push_group = [&](int k, int l) {
    const int shift = k >= 1 ? k : l;
    for (int r = 0; r < 2; ++r) {
      for (int m = 0; m < modes; ++m) {
        MeasurementConfig cfg;
        cfg.r = r;
        cfg.k = k;
        cfg.l = l;
        cfg.m = m;
        cfg.w_tag = k >= 1 ? WTag::kIdentity : WTag::kFourier;
        cfg.theta = -r * std::numbers::pi / (2.0 * photons) +
                    2.0 * std::numbers::pi * shift * m / modes;
        schedule.push_back(cfg);
      }
    }
  };
  for (int k = 1; k < modes; ++k)
    for (int l = 0; l < modes; ++l) push_group(k, l);
  for (int l = 1; l < modes; ++l) push_group(0, l);
  return schedule;
}

Eigen::MatrixXcd config_w(const MeasurementConfig& cfg, int modes) {
  return cfg.w_tag == WTag::kIdentity ? Eigen::MatrixXcd::Identity(modes, modes).eval()
                                      : fourier_matrix(modes);
}

Eigen::MatrixXcd config_v(const MeasurementConfig& cfg, int modes) {
  const Eigen::MatrixXcd word = cfg.w_tag == WTag::kIdentity
                                    ? hw_matrix(cfg.k, cfg.l, modes)
                                    : hw_matrix(cfg.l, 0, modes);
  return Complex(std::cos(cfg.theta), std::sin(cfg.theta)) * word;
}

namespace {

// Parity of one configuration, exact or sampled, with optional noise hook.
double config_zeta(const StateRef& state, int modes, int photons,
                   const MeasurementConfig& cfg, int config_index,
                   const EstimateOptions& opts, RngStream* rng,
                   const CircuitHook* hook) {
  const DQC1Circuit circuit = build_circuit(config_w(cfg, modes), config_v(cfg, modes));
  if (opts.per_shot_noise) {
    if (opts.exact) throw std::invalid_argument("per-shot noise requires shot sampling");
    if (!hook || !*hook) throw std::invalid_argument("per-shot noise requires a circuit hook");
    RngStream stream = rng->child(static_cast<std::uint64_t>(config_index));
    double acc = 0.0;
    for (std::int64_t s = 0; s < opts.n_shot; ++s) {
      const Eigen::MatrixXcd t = (*hook)(config_index, cfg, circuit.t, s);
      const std::vector<double> probs = distribution_impl(state, t, modes, photons);
      const std::vector<std::int64_t> one = multinomial_sample(probs, 1, stream);
      for (std::size_t b = 0; b < one.size(); ++b)
        if (one[b]) acc += (b % 2 == 0) ? 1.0 : -1.0;
    }
    return acc / static_cast<double>(opts.n_shot);
  }

  Eigen::MatrixXcd t = circuit.t;
  if (hook && *hook) t = (*hook)(config_index, cfg, t, -1);
  const std::vector<double> probs = distribution_impl(state, t, modes, photons);
  if (opts.exact) return zeta_from_distribution(probs);
  if (!rng) throw std::invalid_argument("shot sampling requires an RNG stream");
  RngStream stream = rng->child(static_cast<std::uint64_t>(config_index));
  return sample_zeta(probs, opts.n_shot, stream).first;
}

void check_estimate_args(const StateRef& state, int modes, int photons,
                         const EstimateOptions& opts, RngStream* rng) {
  if (photons < 1) throw std::invalid_argument("photon number must be >= 1");
  if (modes < 2) throw std::invalid_argument("mode count must be >= 2");
  if (state.dim() != cached_basis(modes, photons).size())
    throw std::invalid_argument("state dimension does not match (modes, photons) sector");
  check_probe(state);
  if (!opts.exact) {
    if (opts.n_shot < 1) throw std::invalid_argument("shot count must be >= 1");
    if (!rng) throw std::invalid_argument("shot sampling requires an RNG stream");
  }
}

// Cosine-weighted parity aggregation for one (r, k, l) group. `tags` are the
// schedule positions used both for stream derivation and as hook indices.
double group_lambda(const StateRef& state, int modes, int photons, int k, int l,
                    int r, const std::vector<int>& tags,
                    const EstimateOptions& opts, RngStream* rng,
                    const CircuitHook* hook) {
  const int kk = ((k % modes) + modes) % modes;
  const int ll = ((l % modes) + modes) % modes;
  if (kk == 0 && ll == 0)
    throw std::invalid_argument("estimate_hw_expectation: (k, l) = (0, 0) is the trivial word");
  if (r != 0 && r != 1) throw std::invalid_argument("estimate_hw_expectation: r must be 0 or 1");
  const int shift = kk >= 1 ? kk : ll;
  if (photons > modes / std::gcd(2 * shift, modes))
    throw std::domain_error(
        "estimate_hw_expectation: aggregation requires N <= M / gcd(2k, M)");

  const int delta = (2 * shift * photons) % modes == 0 ? 1 : 0;
  const double prefactor = std::pow(2.0, photons - delta) / modes;
  double acc = 0.0;
  for (int m = 0; m < modes; ++m) {
    MeasurementConfig cfg;
    cfg.r = r;
    cfg.k = kk;
    cfg.l = ll;
    cfg.m = m;
    cfg.w_tag = kk >= 1 ? WTag::kIdentity : WTag::kFourier;
    cfg.theta = -r * std::numbers::pi / (2.0 * photons) +
                2.0 * std::numbers::pi * shift * m / modes;
    const double zeta = config_zeta(state, modes, photons, cfg, tags[m], opts, rng, hook);
    acc += std::cos(2.0 * std::numbers::pi * shift * m * photons / modes) * zeta;
  }
  return prefactor * acc;
}

double estimate_impl(const StateRef& state, int modes, int photons, int k, int l,
                     int r, const EstimateOptions& opts, RngStream* rng,
                     const CircuitHook* hook) {
  check_estimate_args(state, modes, photons, opts, rng);
  std::vector<int> tags(modes);
  for (int m = 0; m < modes; ++m) tags[m] = m;
  return group_lambda(state, modes, photons, k, l, r, tags, opts, rng, hook);
}

ExpectationTable table_impl(const StateRef& state, int modes, int photons,
                            const EstimateOptions& opts, RngStream* rng,
                            const CircuitHook* hook) {
  check_estimate_args(state, modes, photons, opts, rng);
  const std::vector<MeasurementConfig> schedule = measurement_schedule(modes, photons);

  ExpectationTable table;
  table.modes = modes;
  table.photons = photons;
  table.values = Eigen::MatrixXcd::Zero(modes, modes);
  table.values(0, 0) = Complex(1.0, 0.0);

  // The schedule is contiguous runs of M settings per (k, l, r).
  std::size_t pos = 0;
  while (pos < schedule.size()) {
    const MeasurementConfig& head = schedule[pos];
    double lam[2] = {0.0, 0.0};
    for (int r = 0; r < 2; ++r) {
      std::vector<int> tags(modes);
      for (int m = 0; m < modes; ++m) tags[m] = static_cast<int>(pos) + m;
      lam[r] = group_lambda(state, modes, photons, head.k, head.l, r, tags, opts,
                            rng, hook);
      pos += modes;
    }
    table.values(head.k, head.l) = Complex(lam[0], lam[1]);
  }
  return table;
}

}  // namespace

double estimate_hw_expectation(const Eigen::VectorXcd& psi, int modes, int photons,
                               int k, int l, int r, const EstimateOptions& opts,
                               RngStream* rng, const CircuitHook* hook) {
  StateRef state;
  state.psi = &psi;
  return estimate_impl(state, modes, photons, k, l, r, opts, rng, hook);
}

double estimate_hw_expectation(const Eigen::MatrixXcd& rho, int modes, int photons,
                               int k, int l, int r, const EstimateOptions& opts,
                               RngStream* rng, const CircuitHook* hook) {
  StateRef state;
  state.rho = &rho;
  return estimate_impl(state, modes, photons, k, l, r, opts, rng, hook);
}

ExpectationTable estimate_full_table(const Eigen::VectorXcd& psi, int modes,
                                     int photons, const EstimateOptions& opts,
                                     RngStream* rng, const CircuitHook* hook) {
  StateRef state;
  state.psi = &psi;
  return table_impl(state, modes, photons, opts, rng, hook);
}

ExpectationTable estimate_full_table(const Eigen::MatrixXcd& rho, int modes,
                                     int photons, const EstimateOptions& opts,
                                     RngStream* rng, const CircuitHook* hook) {
  StateRef state;
  state.rho = &rho;
  return table_impl(state, modes, photons, opts, rng, hook);
}

}  // namespace hwrec
