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

#include <cmath>
#include <doctest.h>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <vector>

#include "collider/errors.hpp"
#include "collider/harness.hpp"
#include "collider/rng.hpp"
#include "collider/version.hpp"

using collider::CalibrationCell;
using collider::DiscretePmf;
using collider::DistributionSpec;
using collider::EnumerationError;
using collider::ExperimentConfig;
using collider::ExperimentKind;
using collider::TrialReport;
using collider::ValidationError;
using nlohmann::json;

namespace {

ExperimentConfig tail_config() {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kTail;
  cfg.distribution.family = DistributionSpec::Family::kUniform;
  cfg.distribution.m = 50;
  cfg.n = 200;
  cfg.epsilons = {0.001, 0.005, 0.02, 0.1, 2.0};
  cfg.trials = 400;
  cfg.seed = 12;
  return cfg;
}

}  // namespace

TEST_CASE("wilson interval basics") {
  const auto all = collider::wilson95(10, 10);
  CHECK(all.hi == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(all.lo < 1.0);
  const auto none = collider::wilson95(0, 100);
  CHECK(none.lo <= 1e-15);
  CHECK(none.hi > 0.0);
  CHECK(none.hi < 0.05);
  const auto mid = collider::wilson95(50, 100);
  CHECK(mid.lo < 0.5);
  CHECK(mid.hi > 0.5);
  CHECK_THROWS_AS(collider::wilson95(1, 0), ValidationError);
  CHECK_THROWS_AS(collider::wilson95(5, 4), ValidationError);
}

TEST_CASE("wilson intervals achieve nominal coverage on Bernoulli data") {
  collider::Xoshiro256pp rng(collider::SampleSeed{2718, 0});
  for (const double p : {0.05, 0.3, 0.7}) {
    int covered = 0;
    const int repetitions = 2000;
    const int trials = 60;
    for (int r = 0; r < repetitions; ++r) {
      std::uint64_t hits = 0;
      for (int t = 0; t < trials; ++t) {
        if (rng.next_double() < p) ++hits;
      }
      const auto ci = collider::wilson95(hits, trials);
      if (ci.lo <= p && p <= ci.hi) ++covered;
    }
    const double coverage = static_cast<double>(covered) / repetitions;
    CHECK(coverage >= 0.92);  // nominal 0.95 with discreteness slack
  }
}

TEST_CASE("config json round trip") {
  json j = {
      {"kind", "tail"},
      {"distribution", {{"family", "zipf"}, {"m", 100}, {"s", 1.25}}},
      {"n", 500},
      {"epsilons", {0.01, 0.02, 0.04}},
      {"trials", 64},
      {"seed", 99},
      {"workers", 2},
      {"envelope", {{"c_out", 1.5}, {"c_sq", 0.3}, {"c_lin", 0.2}, {"c_heavy", 0.1}}},
      {"out", ""},
  };
  const auto cfg = ExperimentConfig::from_json(j);
  CHECK(cfg.kind == ExperimentKind::kTail);
  CHECK(cfg.distribution.family == DistributionSpec::Family::kZipf);
  CHECK(cfg.distribution.m == 100);
  CHECK(cfg.distribution.s == 1.25);
  CHECK(cfg.n == 500);
  CHECK(cfg.epsilons.size() == 3);
  CHECK(cfg.envelope.c_sq == 0.3);

  const auto restored = ExperimentConfig::from_json(cfg.to_json());
  CHECK(restored.to_json() == cfg.to_json());
  CHECK(restored.hash() == cfg.hash());

  // Any semantic change moves the hash.
  json j2 = j;
  j2["seed"] = 100;
  CHECK(ExperimentConfig::from_json(j2).hash() != cfg.hash());
}

TEST_CASE("config validation failures") {
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"kind", "nonsense"}}), ValidationError);
  {
    auto cfg = tail_config();
    cfg.epsilons = {0.1, 0.1};
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
  }
  {
    auto cfg = tail_config();
    cfg.epsilons = {-0.1, 0.2};
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
  }
  {
    auto cfg = tail_config();
    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
  }
  {
    auto cfg = tail_config();
    cfg.n = 1;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
  }
  {
    auto cfg = tail_config();
    cfg.kind = ExperimentKind::kBoosting;
    cfg.epsilon = 0.5;
    cfg.k = 150;  // above budget/2 = 100
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
  }
}

TEST_CASE("tail experiment basics") {
  auto cfg = tail_config();
  const auto report = collider::run_tail_experiment(cfg);
  REQUIRE(report.rows.size() == cfg.epsilons.size());
  CHECK(report.kind == "tail");
  CHECK(report.config_hash == cfg.hash());
  CHECK(report.library_version == collider::version());
  for (const auto& row : report.rows) {
    CHECK(row.trials == cfg.trials);
    CHECK(row.frequency >= row.wilson_lo - 1e-12);
    CHECK(row.frequency <= row.wilson_hi + 1e-12);
  }
  // Deviations never exceed 1, so the eps = 2 row is empty.
  CHECK(report.rows.back().exceed == 0);

  // trials = 1 gives a 0/1 frequency.
  cfg.trials = 1;
  const auto single = collider::run_tail_experiment(cfg);
  for (const auto& row : single.rows) {
    CHECK((row.frequency == 0.0 || row.frequency == 1.0));
  }
}

TEST_CASE("tail experiment is reproducible across worker counts") {
  auto cfg = tail_config();
  cfg.workers = 1;
  const std::string csv1 = collider::run_tail_experiment(cfg).to_csv();
  cfg.workers = 8;
  const std::string csv8 = collider::run_tail_experiment(cfg).to_csv();
  cfg.workers = 3;
  const std::string csv3 = collider::run_tail_experiment(cfg).to_csv();
  CHECK(csv1 == csv8);
  CHECK(csv1 == csv3);
}

TEST_CASE("tester experiment separates uniform from planted") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kTester;
  cfg.m = 400;
  cfg.epsilon = 0.5;
  cfg.delta = 0.1;
  cfg.trials = 200;
  cfg.seed = 7;
  const auto report = collider::run_tester_experiment(cfg);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].label == "uniform");
  CHECK(report.rows[0].frequency <= 0.1);
  CHECK(report.rows[1].frequency <= 0.1);
  CHECK(report.passed);
}

TEST_CASE("tester warns outside the stated epsilon regime") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kTester;
  cfg.m = 400;
  cfg.epsilon = 0.04;  // below 1/sqrt(400) = 0.05
  cfg.delta = 0.2;
  cfg.trials = 10;
  const auto report = collider::run_tester_experiment(cfg);
  REQUIRE(!report.warnings.empty());
}

TEST_CASE("entropy experiment on a skewed pmf") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kEntropy;
  cfg.distribution.family = DistributionSpec::Family::kZipf;
  cfg.distribution.m = 100;
  cfg.distribution.s = 1.5;
  cfg.epsilon = 0.25;
  cfg.delta = 0.1;
  cfg.trials = 200;
  cfg.seed = 3;
  const auto report = collider::run_entropy_experiment(cfg);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].pass);
  CHECK(report.passed);
}

TEST_CASE("doubling n cannot worsen the entropy tail beyond noise") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kEntropy;
  cfg.distribution.family = DistributionSpec::Family::kUniform;
  cfg.distribution.m = 64;
  cfg.epsilon = 0.3;
  cfg.delta = 0.3;
  cfg.trials = 300;
  cfg.seed = 17;
  cfg.entropy_c = 1.0;
  const auto base = collider::run_entropy_experiment(cfg);
  cfg.entropy_c = 2.0;  // doubles n through the sample-size formula
  const auto doubled = collider::run_entropy_experiment(cfg);
  CHECK(doubled.rows[0].frequency <=
        base.rows[0].frequency + (base.rows[0].wilson_hi - base.rows[0].wilson_lo));
}

TEST_CASE("negative correlation of bin contributions, exact enumeration") {
  const auto cov = collider::negcorr_covariances(DiscretePmf::uniform(2), 2);
  CHECK(cov[0][1] == doctest::Approx(-0.25).epsilon(1e-13));
  CHECK(cov[1][0] == doctest::Approx(-0.25).epsilon(1e-13));

  const auto point = collider::negcorr_covariances(
      DiscretePmf::from_weights(std::vector<double>{1.0, 0.0}), 3);
  CHECK(point[0][1] == doctest::Approx(0.0).epsilon(1e-15));

  const auto three = collider::negcorr_covariances(DiscretePmf::uniform(3), 4);
  for (std::size_t x = 0; x < 3; ++x) {
    for (std::size_t y = 0; y < 3; ++y) {
      if (x != y) CHECK(three[x][y] <= 1e-12);
    }
  }

  CHECK_THROWS_AS(collider::negcorr_covariances(DiscretePmf::uniform(100), 6),
                  EnumerationError);
}

TEST_CASE("negcorr experiment report") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kNegCorr;
  cfg.distribution.family = DistributionSpec::Family::kExplicit;
  cfg.distribution.weights = {0.5, 0.3, 0.2};
  cfg.distribution.m = 3;
  cfg.n = 5;
  const auto report = collider::run_negcorr_check(cfg);
  CHECK(report.passed);
  CHECK(report.covariance.size() == 3);
  const std::string csv = report.to_csv();
  CHECK(csv.find("x,y,covariance,pass") == 0);
}

TEST_CASE("envelope fit inverts synthetic data") {
  // Cells lying exactly on exp(-eps^2/v^2), with the other branches far
  // away, force c_out ~ 1 and c_sq ~ 1.
  std::vector<CalibrationCell> cells;
  for (const double e : {0.5, 1.0, 2.0, 4.0}) {
    CalibrationCell cell;
    cell.label = "synthetic";
    cell.exp_sq = e;
    cell.exp_lin = 1e9;
    cell.exp_heavy = 1e9;
    cell.wilson_hi = std::exp(-e);
    cells.push_back(cell);
  }
  const auto fitted = collider::fit_envelope(cells);
  CHECK(fitted.c_sq == doctest::Approx(1.0).epsilon(0.11));
  CHECK(fitted.c_sq <= 1.0 + 1e-12);
  CHECK(fitted.c_out <= 1.2);

  // Adding a tighter cell can only lower the fitted c_sq.
  CalibrationCell tight;
  tight.label = "tight";
  tight.exp_sq = 3.0;
  tight.exp_lin = 1e9;
  tight.exp_heavy = 1e9;
  tight.wilson_hi = std::exp(-1.5);  // only c_sq <= 0.5 + ln(c_out)/3 fits
  cells.push_back(tight);
  const auto refitted = collider::fit_envelope(cells);
  CHECK(refitted.c_sq <= fitted.c_sq + 1e-12);

  CHECK_THROWS_AS(collider::fit_envelope(std::vector<CalibrationCell>{}), ValidationError);
}

TEST_CASE("calibrate experiment produces a dominating envelope") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kCalibrate;
  cfg.distribution.family = DistributionSpec::Family::kUniform;
  cfg.distribution.m = 50;
  cfg.n = 300;
  cfg.epsilons = {0.002, 0.005, 0.01, 0.02};
  cfg.trials = 500;
  cfg.seed = 5;
  const auto report = collider::run_calibrate(cfg);
  REQUIRE(report.fitted_envelope.has_value());
  CHECK(report.passed);
  for (const auto& row : report.rows) CHECK(row.wilson_hi <= row.reference * (1 + 1e-12));
}

TEST_CASE("boosting comparison") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kBoosting;
  cfg.distribution.family = DistributionSpec::Family::kPlantedBias;
  cfg.distribution.m = 100;
  cfg.distribution.alpha = 1.0;
  cfg.epsilon = 0.5;
  cfg.n = 180;
  cfg.k = 9;
  cfg.trials = 300;
  cfg.seed = 21;
  const auto report = collider::run_boosting_comparison(cfg);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].label == "single");
  CHECK(report.rows[0].n == 180);
  CHECK(report.rows[1].n == 20);
  // Equal budget: the single run should not lose to the median of nine.
  CHECK(report.passed);

  // k = 1 is the degenerate comparison: identical decisions per trial.
  cfg.k = 1;
  const auto degenerate = collider::run_boosting_comparison(cfg);
  CHECK(degenerate.rows[0].exceed == degenerate.rows[1].exceed);

  // Budget rounding warning.
  cfg.k = 7;
  const auto rounded = collider::run_boosting_comparison(cfg);
  CHECK(!rounded.warnings.empty());
  CHECK(rounded.rows[1].n == 180 / 7);
}

TEST_CASE("run_experiment writes byte-identical CSV for reruns") {
  auto cfg = tail_config();
  cfg.out = "/tmp/collider_test_tail.csv";
  cfg.workers = 1;
  collider::run_experiment(cfg);
  std::ifstream first(cfg.out);
  const std::string csv1((std::istreambuf_iterator<char>(first)),
                         std::istreambuf_iterator<char>());
  cfg.workers = 8;
  collider::run_experiment(cfg);
  std::ifstream second(cfg.out);
  const std::string csv8((std::istreambuf_iterator<char>(second)),
                         std::istreambuf_iterator<char>());
  CHECK(csv1 == csv8);
  CHECK(csv1.find("label,epsilon,n,trials,exceed,frequency,wilson_lo,wilson_hi,reference,pass") ==
        0);
}

TEST_CASE("trial report json carries provenance") {
  const auto cfg = tail_config();
  const auto report = collider::run_tail_experiment(cfg);
  const json j = report.to_json();
  CHECK(j.at("config_hash").get<std::string>() == cfg.hash());
  CHECK(j.at("seed").get<std::uint64_t>() == cfg.seed);
  CHECK(j.at("library_version").get<std::string>() == collider::version());
  CHECK(j.at("rows").size() == cfg.epsilons.size());
}
