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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "hwrec/harness.hpp"

namespace hwrec {

namespace {

// Fixed shortest-exact formatting keeps CSV output byte-stable.
std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::kFidelityVsShots: return "fidelity_vs_shots";
    case RunMode::kNoiseSweep: return "noise_sweep";
    case RunMode::kSingleState: return "single_state";
  }
  return "unknown";
}

const char* resample_name(NoiseResample r) {
  switch (r) {
    case NoiseResample::kPerRun: return "per_run";
    case NoiseResample::kPerState: return "per_state";
    case NoiseResample::kPerConfiguration: return "per_configuration";
    case NoiseResample::kPerShot: return "per_shot";
  }
  return "unknown";
}

nlohmann::ordered_json matrix_to_json(const Eigen::MatrixXcd& m) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out.push_back({m(r, c).real(), m(r, c).imag()});
  return out;
}

}  // namespace

void emit_report(const RunResult& result, const std::string& path_stem) {
  if (path_stem.empty()) throw ConfigError("emit_report: output path is empty");
  const std::filesystem::path stem(path_stem);
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());

  // CSV: one row per aggregate grid point.
  {
    std::ofstream csv(path_stem + ".csv", std::ios::binary);
    if (!csv) throw std::runtime_error("emit_report: cannot write " + path_stem + ".csv");
    csv << "M,N,N_shot,delta_theta,delta_phi,mean_fidelity,std_fidelity,n_states,seed\n";
    for (const AggregatePoint& p : result.aggregates) {
      csv << result.config.modes << ',' << result.config.photons << ',' << p.n_shot << ','
          << fmt_double(p.delta_theta) << ',' << fmt_double(p.delta_phi) << ','
          << fmt_double(p.mean_fidelity) << ',' << fmt_double(p.std_fidelity) << ','
          << p.n_states << ',' << result.config.seed << '\n';
    }
  }

  nlohmann::ordered_json doc;
  doc["schema"] = "hwrec-report-1";

  nlohmann::ordered_json cfg;
  cfg["mode"] = mode_name(result.config.mode);
  cfg["M"] = result.config.modes;
  cfg["N"] = result.config.photons;
  cfg["n_states"] = result.config.n_states;
  if (result.config.exact) {
    cfg["shot_schedule"] = "exact";
  } else {
    cfg["shot_schedule"] = result.config.shot_schedule;
  }
  nlohmann::ordered_json pts = nlohmann::ordered_json::array();
  for (const NoiseSpec& p : result.config.noise_points)
    pts.push_back({p.delta_theta, p.delta_phi});
  cfg["noise_points"] = pts;
  cfg["noise_resample"] = resample_name(result.config.resample);
  cfg["seed"] = result.config.seed;
  cfg["output_path"] = result.config.output_path;
  doc["config"] = cfg;

  nlohmann::ordered_json aggs = nlohmann::ordered_json::array();
  for (const AggregatePoint& p : result.aggregates) {
    nlohmann::ordered_json a;
    a["n_shot"] = p.n_shot;
    a["delta_theta"] = p.delta_theta;
    a["delta_phi"] = p.delta_phi;
    a["mean_fidelity"] = p.mean_fidelity;
    a["std_fidelity"] = p.std_fidelity;
    a["n_states"] = p.n_states;
    aggs.push_back(a);
  }
  doc["aggregates"] = aggs;

  nlohmann::ordered_json trials = nlohmann::ordered_json::array();
  for (const TrialRecord& t : result.trials) {
    nlohmann::ordered_json r;
    r["state_id"] = t.state_id;
    r["n_shot"] = t.n_shot;
    r["delta_theta"] = t.delta_theta;
    r["delta_phi"] = t.delta_phi;
    r["fidelity"] = t.fidelity;
    r["wall_seconds"] = t.wall_seconds;
    r["seed_used"] = t.seed_used;
    r["rho_mle"] = matrix_to_json(t.rho_mle);
    r["rho_truth"] = matrix_to_json(t.rho_truth);
    trials.push_back(r);
  }
  doc["trials"] = trials;

  std::ofstream json_out(path_stem + ".json", std::ios::binary);
  if (!json_out) throw std::runtime_error("emit_report: cannot write " + path_stem + ".json");
  json_out << doc.dump(2) << '\n';
}

}  // namespace hwrec
