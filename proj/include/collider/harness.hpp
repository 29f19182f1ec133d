// Copyright 2026 The Collider Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COLLIDER_HARNESS_HPP_
#define COLLIDER_HARNESS_HPP_

#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "collider/bounds.hpp"
#include "collider/estimator.hpp"
#include "collider/pmf.hpp"

namespace collider {

/// 95% Wilson score interval for k successes out of n trials.
struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};
WilsonInterval wilson95(std::uint64_t successes, std::uint64_t trials);

/// Declarative distribution description, as written in experiment configs:
/// {"family": "uniform"|"zipf"|"planted_bias"|"explicit", ...parameters}.
struct DistributionSpec {
  enum class Family { kUniform, kZipf, kPlantedBias, kExplicit };

  Family family = Family::kUniform;
  std::uint64_t m = 1;
  double s = 1.0;          // zipf exponent
  double alpha = 0.0;      // planted bias
  std::vector<double> weights;  // explicit family

  DiscretePmf realize() const;
  std::string label() const;

  static DistributionSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

enum class ExperimentKind { kTail, kTester, kEntropy, kNegCorr, kCalibrate, kBoosting };

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

/// One (distribution, n) cell of a calibration run.
struct CalibrationCellSpec {
  DistributionSpec distribution;
  std::uint64_t n = 0;
};

/// Declarative experiment description.  Parsed from JSON; every field that
/// the selected kind requires is validated before the run starts.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kTail;
  DistributionSpec distribution;
  std::uint64_t n = 0;               // sample size / total budget (boosting)
  std::vector<double> epsilons;      // tail, calibrate: deviation grid
  double epsilon = 0.0;              // tester, entropy, boosting
  double delta = 0.1;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;            // master seed
  unsigned workers = 1;              // 0 = hardware concurrency
  TailEnvelope envelope;
  double tester_c = kDefaultTesterC;
  double entropy_c = kDefaultEntropyC;
  std::uint64_t m = 0;               // tester domain size
  std::uint64_t k = 1;               // boosting: number of medianed runs
  std::vector<CalibrationCellSpec> cells;  // calibrate
  std::string out;                   // CSV path ("" = do not write)

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// FNV-1a hash of the canonical JSON serialization, as 16 hex digits.
  std::string hash() const;
  void validate() const;
};

/// One aggregated row of an experiment: a (case, epsilon) cell with its
/// empirical frequency, Wilson interval and reference value (envelope or
/// delta, depending on the experiment kind).
struct ReportRow {
  std::string label;
  double epsilon = 0.0;
  std::uint64_t n = 0;
  std::uint64_t trials = 0;
  std::uint64_t exceed = 0;  // trials where the monitored event occurred
  double frequency = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  double reference = 0.0;
  bool pass = true;
};

/// Result of one experiment run.  CSV output contains only deterministic
/// fields; wall-clock time lives in the JSON summary alone, so reruns with
/// the same config and seed produce byte-identical CSV.
struct TrialReport {
  std::string kind;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string library_version;
  bool passed = true;
  std::vector<ReportRow> rows;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;

  // Kind-specific payloads.
  std::vector<std::vector<double>> covariance;      // negcorr
  std::optional<TailEnvelope> fitted_envelope;      // calibrate

  std::string to_csv() const;
  nlohmann::json to_json() const;
};

/// Tail experiment: empirical frequency of |q_hat - Q| > epsilon for each
/// epsilon in the grid, against the tail envelope.
TrialReport run_tail_experiment(const ExperimentConfig& cfg);

/// Tester experiment: error rates of the threshold test on the uniform
/// case and the planted case with alpha = min(2 epsilon, 1), with n from
/// tester_sample_size.
TrialReport run_tester_experiment(const ExperimentConfig& cfg);

/// Relative-error experiment: frequency of |q_hat - Q| > epsilon * Q with
/// n from entropy_sample_size.
TrialReport run_entropy_experiment(const ExperimentConfig& cfg);

/// Exact pairwise covariances Cov(S_x^2 - S_x, S_y^2 - S_y) by full
/// enumeration of the m^n sample space (m^n <= 1e6).  All off-diagonal
/// entries of a valid run are <= 1e-12.
std::vector<std::vector<double>> negcorr_covariances(const DiscretePmf& pmf, std::uint64_t n);
TrialReport run_negcorr_check(const ExperimentConfig& cfg);

/// One calibration cell reduced to the quantities the fit needs.
struct CalibrationCell {
  std::string label;
  double exp_sq = 0.0;     // epsilon^2 / v^2
  double exp_lin = 0.0;    // epsilon / b
  double exp_heavy = 0.0;  // n * sqrt(epsilon)
  double wilson_hi = 0.0;  // upper Wilson bound of the observed tail
};

/// Fits the largest branch constants (and smallest c_out) whose envelope
/// dominates every cell's upper Wilson bound; 10% grid resolution.
TailEnvelope fit_envelope(std::span<const CalibrationCell> cells);
TrialReport run_calibrate(const ExperimentConfig& cfg);

/// Equal-budget comparison of the single estimator on n samples against
/// the median of k estimators on n/k samples each.
TrialReport run_boosting_comparison(const ExperimentConfig& cfg);

/// Dispatch on cfg.kind; writes CSV (and a JSON summary next to it) when
/// cfg.out is set.
TrialReport run_experiment(const ExperimentConfig& cfg);

}  // namespace collider

#endif  // COLLIDER_HARNESS_HPP_
