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

#include "collider/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>
#include <tuple>

#include "collider/errors.hpp"
#include "collider/estimator.hpp"
#include "collider/sampling.hpp"
#include "collider/version.hpp"

namespace collider {

using nlohmann::json;

namespace {

// Streams are laid out as case_index * 2^32 + trial_index, so trials of
// different cases never share a stream.
constexpr std::uint64_t kCaseStride = std::uint64_t{1} << 32;

unsigned resolve_workers(unsigned configured) {
  if (configured != 0) return configured;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs body(worker, trial) for every trial index.  Worker w owns the
// arithmetic progression {w, w + workers, ...}; the body must touch only
// worker-local state, and callers merge per-worker results in worker
// order, which makes every aggregate independent of scheduling.
void parallel_trials(std::uint64_t trials, unsigned workers,
                     const std::function<void(unsigned, std::uint64_t)>& body) {
  if (workers <= 1) {
    for (std::uint64_t t = 0; t < trials; ++t) body(0, t);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr failure;
  std::mutex failure_mu;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::uint64_t t = w; t < trials; t += workers) body(w, t);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// Serialize a double exactly as it will appear in the JSON summary, so the
// CSV and JSON never disagree on a digit.
std::string fmt(double v) { return json(v).dump(); }

double q_hat_from_pairs(std::uint64_t pairs, std::uint64_t n) {
  return static_cast<double>(pairs) /
         (static_cast<double>(n) * (static_cast<double>(n) - 1.0));
}

TrialReport base_report(const ExperimentConfig& cfg) {
  TrialReport report;
  report.kind = to_string(cfg.kind);
  report.config_hash = cfg.hash();
  report.seed = cfg.seed;
  report.library_version = COLLIDER_VERSION_STRING;
  return report;
}

ReportRow make_rate_row(std::string label, double epsilon, std::uint64_t n,
                        std::uint64_t trials, std::uint64_t exceed, double reference) {
  ReportRow row;
  row.label = std::move(label);
  row.epsilon = epsilon;
  row.n = n;
  row.trials = trials;
  row.exceed = exceed;
  row.frequency = static_cast<double>(exceed) / static_cast<double>(trials);
  const WilsonInterval ci = wilson95(exceed, trials);
  row.wilson_lo = ci.lo;
  row.wilson_hi = ci.hi;
  row.reference = reference;
  row.pass = row.wilson_hi <= reference;
  return row;
}

void require_kind(const ExperimentConfig& cfg, ExperimentKind kind) {
  if (cfg.kind != kind) {
    throw ValidationError(std::string("experiment config has kind '") + to_string(cfg.kind) +
                          "', expected '" + to_string(kind) + "'");
  }
  cfg.validate();
}

}  // namespace

WilsonInterval wilson95(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) throw ValidationError("Wilson interval needs at least one trial");
  if (successes > trials) throw ValidationError("successes exceed trials");
  constexpr double z = 1.959963984540054;  // 97.5% normal quantile
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return WilsonInterval{std::max(0.0, center - half), std::min(1.0, center + half)};
}

DiscretePmf DistributionSpec::realize() const {
  switch (family) {
    case Family::kUniform:
      return DiscretePmf::uniform(m);
    case Family::kZipf:
      return DiscretePmf::zipf(m, s);
    case Family::kPlantedBias:
      return DiscretePmf::planted_bias(m, alpha);
    case Family::kExplicit:
      return DiscretePmf::from_weights(weights);
  }
  throw ValidationError("unknown distribution family");
}

std::string DistributionSpec::label() const {
  switch (family) {
    case Family::kUniform:
      return "uniform_m" + std::to_string(m);
    case Family::kZipf:
      return "zipf_m" + std::to_string(m) + "_s" + fmt(s);
    case Family::kPlantedBias:
      return "planted_m" + std::to_string(m) + "_a" + fmt(alpha);
    case Family::kExplicit:
      return "explicit_m" + std::to_string(weights.size());
  }
  return "unknown";
}

DistributionSpec DistributionSpec::from_json(const json& j) {
  DistributionSpec spec;
  try {
    const std::string family = j.at("family").get<std::string>();
    if (family == "uniform") {
      spec.family = Family::kUniform;
      spec.m = j.at("m").get<std::uint64_t>();
    } else if (family == "zipf") {
      spec.family = Family::kZipf;
      spec.m = j.at("m").get<std::uint64_t>();
      spec.s = j.value("s", 1.0);
    } else if (family == "planted_bias") {
      spec.family = Family::kPlantedBias;
      spec.m = j.at("m").get<std::uint64_t>();
      spec.alpha = j.at("alpha").get<double>();
    } else if (family == "explicit") {
      spec.family = Family::kExplicit;
      spec.weights = j.at("probs").get<std::vector<double>>();
      spec.m = spec.weights.size();
    } else {
      throw ValidationError("unknown distribution family '" + family + "'");
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid distribution spec: ") + e.what());
  }
  return spec;
}

json DistributionSpec::to_json() const {
  json j;
  switch (family) {
    case Family::kUniform:
      j["family"] = "uniform";
      j["m"] = m;
      break;
    case Family::kZipf:
      j["family"] = "zipf";
      j["m"] = m;
      j["s"] = s;
      break;
    case Family::kPlantedBias:
      j["family"] = "planted_bias";
      j["m"] = m;
      j["alpha"] = alpha;
      break;
    case Family::kExplicit:
      j["family"] = "explicit";
      j["probs"] = weights;
      break;
  }
  return j;
}

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kTail:
      return "tail";
    case ExperimentKind::kTester:
      return "tester";
    case ExperimentKind::kEntropy:
      return "entropy";
    case ExperimentKind::kNegCorr:
      return "negcorr";
    case ExperimentKind::kCalibrate:
      return "calibrate";
    case ExperimentKind::kBoosting:
      return "boosting";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  if (name == "tail") return ExperimentKind::kTail;
  if (name == "tester") return ExperimentKind::kTester;
  if (name == "entropy") return ExperimentKind::kEntropy;
  if (name == "negcorr") return ExperimentKind::kNegCorr;
  if (name == "calibrate") return ExperimentKind::kCalibrate;
  if (name == "boosting") return ExperimentKind::kBoosting;
  throw ValidationError("unknown experiment kind '" + name + "'");
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig cfg;
  try {
    cfg.kind = experiment_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("distribution")) {
      cfg.distribution = DistributionSpec::from_json(j.at("distribution"));
    }
    cfg.n = j.value("n", std::uint64_t{0});
    cfg.epsilons = j.value("epsilons", std::vector<double>{});
    cfg.epsilon = j.value("epsilon", 0.0);
    cfg.delta = j.value("delta", 0.1);
    cfg.trials = j.value("trials", std::uint64_t{1000});
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.workers = j.value("workers", 1u);
    if (j.contains("envelope")) {
      const json& env = j.at("envelope");
      cfg.envelope.c_out = env.value("c_out", cfg.envelope.c_out);
      cfg.envelope.c_sq = env.value("c_sq", cfg.envelope.c_sq);
      cfg.envelope.c_lin = env.value("c_lin", cfg.envelope.c_lin);
      cfg.envelope.c_heavy = env.value("c_heavy", cfg.envelope.c_heavy);
    }
    cfg.tester_c = j.value("tester_c", kDefaultTesterC);
    cfg.entropy_c = j.value("entropy_c", kDefaultEntropyC);
    cfg.m = j.value("m", std::uint64_t{0});
    cfg.k = j.value("k", std::uint64_t{1});
    if (j.contains("cells")) {
      for (const json& cell : j.at("cells")) {
        CalibrationCellSpec spec;
        spec.distribution = DistributionSpec::from_json(cell.at("distribution"));
        spec.n = cell.at("n").get<std::uint64_t>();
        cfg.cells.push_back(std::move(spec));
      }
    }
    cfg.out = j.value("out", std::string{});
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid experiment config: ") + e.what());
  }
  return cfg;
}

json ExperimentConfig::to_json() const {
  json j;
  j["kind"] = to_string(kind);
  j["distribution"] = distribution.to_json();
  j["n"] = n;
  j["epsilons"] = epsilons;
  j["epsilon"] = epsilon;
  j["delta"] = delta;
  j["trials"] = trials;
  j["seed"] = seed;
  j["workers"] = workers;
  j["envelope"] = {{"c_out", envelope.c_out},
                   {"c_sq", envelope.c_sq},
                   {"c_lin", envelope.c_lin},
                   {"c_heavy", envelope.c_heavy}};
  j["tester_c"] = tester_c;
  j["entropy_c"] = entropy_c;
  j["m"] = m;
  j["k"] = k;
  json cells_json = json::array();
  for (const CalibrationCellSpec& cell : cells) {
    cells_json.push_back({{"distribution", cell.distribution.to_json()}, {"n", cell.n}});
  }
  j["cells"] = cells_json;
  j["out"] = out;
  return j;
}

std::string ExperimentConfig::hash() const {
  const std::string dump = to_json().dump();
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (const unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ValidationError("trials must be at least 1");
  if (trials >= kCaseStride) throw ValidationError("trials limited to 2^32 - 1");
  if (envelope.c_out <= 0.0 || envelope.c_sq <= 0.0 || envelope.c_lin <= 0.0 ||
      envelope.c_heavy <= 0.0) {
    throw ValidationError("envelope constants must be strictly positive");
  }
  const auto require_epsilon_grid = [&] {
    if (epsilons.empty()) throw ValidationError("epsilon grid must be nonempty");
    double last = 0.0;
    for (const double e : epsilons) {
      if (!(e > 0.0) || !std::isfinite(e)) {
        throw ValidationError("epsilon grid entries must be positive and finite");
      }
      if (e <= last) throw ValidationError("epsilon grid must be strictly increasing");
      last = e;
    }
  };
  switch (kind) {
    case ExperimentKind::kTail:
      if (n < 2) throw ValidationError("tail experiment needs n >= 2");
      require_epsilon_grid();
      break;
    case ExperimentKind::kTester:
      if (m < 2 || m % 2 != 0) {
        throw ValidationError("tester experiment needs even m >= 2 (planted case)");
      }
      if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw ValidationError("tester experiment needs epsilon in (0, 1]");
      }
      if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
      if (!(tester_c > 0.0)) throw ValidationError("tester_c must be positive");
      break;
    case ExperimentKind::kEntropy:
      if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw ValidationError("entropy experiment needs epsilon in (0, 1)");
      }
      if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
      if (!(entropy_c > 0.0)) throw ValidationError("entropy_c must be positive");
      break;
    case ExperimentKind::kNegCorr:
      if (n < 2) throw ValidationError("negcorr check needs n >= 2");
      break;
    case ExperimentKind::kCalibrate:
      require_epsilon_grid();
      if (cells.empty() && n < 2) {
        throw ValidationError("calibrate needs cells or a (distribution, n) pair");
      }
      break;
    case ExperimentKind::kBoosting:
      if (n < 2) throw ValidationError("boosting needs a total budget n >= 2");
      if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw ValidationError("boosting needs epsilon in (0, 1]");
      }
      if (k < 1) throw ValidationError("boosting needs k >= 1");
      if (k > n / 2) throw ValidationError("k must not exceed budget/2 (per-run n >= 2)");
      if (k >= (std::uint64_t{1} << 20)) throw ValidationError("k limited to 2^20 - 1");
      break;
  }
}

std::string TrialReport::to_csv() const {
  std::ostringstream csv;
  if (kind == "negcorr") {
    csv << "x,y,covariance,pass\n";
    for (std::size_t x = 0; x < covariance.size(); ++x) {
      for (std::size_t y = x + 1; y < covariance.size(); ++y) {
        const double cov = covariance[x][y];
        csv << x << ',' << y << ',' << fmt(cov) << ',' << (cov <= 1e-12 ? 1 : 0) << '\n';
      }
    }
    return csv.str();
  }
  csv << "label,epsilon,n,trials,exceed,frequency,wilson_lo,wilson_hi,reference,pass\n";
  for (const ReportRow& row : rows) {
    csv << row.label << ',' << fmt(row.epsilon) << ',' << row.n << ',' << row.trials << ','
        << row.exceed << ',' << fmt(row.frequency) << ',' << fmt(row.wilson_lo) << ','
        << fmt(row.wilson_hi) << ',' << fmt(row.reference) << ',' << (row.pass ? 1 : 0) << '\n';
  }
  return csv.str();
}

json TrialReport::to_json() const {
  json rows_json = json::array();
  for (const ReportRow& row : rows) {
    rows_json.push_back({{"label", row.label},
                         {"epsilon", row.epsilon},
                         {"n", row.n},
                         {"trials", row.trials},
                         {"exceed", row.exceed},
                         {"frequency", row.frequency},
                         {"wilson_lo", row.wilson_lo},
                         {"wilson_hi", row.wilson_hi},
                         {"reference", row.reference},
                         {"pass", row.pass}});
  }
  json j;
  j["kind"] = kind;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["library_version"] = library_version;
  j["passed"] = passed;
  j["rows"] = rows_json;
  j["warnings"] = warnings;
  j["wall_seconds"] = wall_seconds;
  if (!covariance.empty()) j["covariance"] = covariance;
  if (fitted_envelope) {
    j["fitted_envelope"] = {{"c_out", fitted_envelope->c_out},
                            {"c_sq", fitted_envelope->c_sq},
                            {"c_lin", fitted_envelope->c_lin},
                            {"c_heavy", fitted_envelope->c_heavy}};
  }
  return j;
}

TrialReport run_tail_experiment(const ExperimentConfig& cfg) {
  require_kind(cfg, ExperimentKind::kTail);
  TrialReport report = base_report(cfg);
  const DiscretePmf pmf = cfg.distribution.realize();
  const double q = collision_probability(pmf);
  const unsigned workers = resolve_workers(cfg.workers);

  std::vector<std::vector<std::uint64_t>> exceed(workers,
                                                 std::vector<std::uint64_t>(cfg.epsilons.size(), 0));
  std::vector<std::unique_ptr<CollisionSampler>> samplers;
  samplers.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) samplers.push_back(std::make_unique<CollisionSampler>(pmf));

  parallel_trials(cfg.trials, workers, [&](unsigned w, std::uint64_t t) {
    const std::uint64_t pairs = samplers[w]->sample_collision_pairs(cfg.n, SampleSeed{cfg.seed, t});
    const double deviation = std::abs(q_hat_from_pairs(pairs, cfg.n) - q);
    for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
      if (deviation > cfg.epsilons[i]) ++exceed[w][i];
    }
  });

  const std::string label = cfg.distribution.label();
  for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
    std::uint64_t total = 0;
    for (unsigned w = 0; w < workers; ++w) total += exceed[w][i];
    const double envelope = tail_envelope(cfg.epsilons[i], pmf, cfg.n, cfg.envelope);
    report.rows.push_back(make_rate_row(label, cfg.epsilons[i], cfg.n, cfg.trials, total, envelope));
  }
  report.passed = std::all_of(report.rows.begin(), report.rows.end(),
                              [](const ReportRow& r) { return r.pass; });
  return report;
}

TrialReport run_tester_experiment(const ExperimentConfig& cfg) {
  require_kind(cfg, ExperimentKind::kTester);
  TrialReport report = base_report(cfg);
  const std::uint64_t n = tester_sample_size(cfg.m, cfg.epsilon, cfg.delta, cfg.tester_c);
  const double threshold = (1.0 + cfg.epsilon) / static_cast<double>(cfg.m);
  if (cfg.epsilon < 1.0 / std::sqrt(static_cast<double>(cfg.m)) || cfg.epsilon > 1.0) {
    report.warnings.push_back("epsilon outside the tester regime [1/sqrt(m), 1]");
  }
  const double alpha = std::min(2.0 * cfg.epsilon, 1.0);

  struct Case {
    DiscretePmf pmf;
    std::string label;
    bool truth_non_uniform;
  };
  std::vector<Case> cases;
  cases.push_back({DiscretePmf::uniform(cfg.m), "uniform", false});
  cases.push_back({DiscretePmf::planted_bias(cfg.m, alpha), "planted_a" + fmt(alpha), true});

  const unsigned workers = resolve_workers(cfg.workers);
  for (std::size_t c = 0; c < cases.size(); ++c) {
    std::vector<std::uint64_t> errors(workers, 0);
    std::vector<std::unique_ptr<CollisionSampler>> samplers;
    samplers.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      samplers.push_back(std::make_unique<CollisionSampler>(cases[c].pmf));
    }
    parallel_trials(cfg.trials, workers, [&](unsigned w, std::uint64_t t) {
      const std::uint64_t pairs =
          samplers[w]->sample_collision_pairs(n, SampleSeed{cfg.seed, c * kCaseStride + t});
      const bool decide_non_uniform = q_hat_from_pairs(pairs, n) > threshold;
      if (decide_non_uniform != cases[c].truth_non_uniform) ++errors[w];
    });
    std::uint64_t total = 0;
    for (unsigned w = 0; w < workers; ++w) total += errors[w];
    report.rows.push_back(
        make_rate_row(cases[c].label, cfg.epsilon, n, cfg.trials, total, cfg.delta));
  }
  report.passed = std::all_of(report.rows.begin(), report.rows.end(),
                              [](const ReportRow& r) { return r.pass; });
  return report;
}

TrialReport run_entropy_experiment(const ExperimentConfig& cfg) {
  require_kind(cfg, ExperimentKind::kEntropy);
  TrialReport report = base_report(cfg);
  const DiscretePmf pmf = cfg.distribution.realize();
  const double q = collision_probability(pmf);
  const std::uint64_t n = entropy_sample_size(q, cfg.epsilon, cfg.delta, cfg.entropy_c);
  const double tolerance = cfg.epsilon * q;
  const unsigned workers = resolve_workers(cfg.workers);

  std::vector<std::uint64_t> errors(workers, 0);
  std::vector<std::unique_ptr<CollisionSampler>> samplers;
  samplers.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) samplers.push_back(std::make_unique<CollisionSampler>(pmf));
  parallel_trials(cfg.trials, workers, [&](unsigned w, std::uint64_t t) {
    const std::uint64_t pairs = samplers[w]->sample_collision_pairs(n, SampleSeed{cfg.seed, t});
    if (std::abs(q_hat_from_pairs(pairs, n) - q) > tolerance) ++errors[w];
  });
  std::uint64_t total = 0;
  for (unsigned w = 0; w < workers; ++w) total += errors[w];
  report.rows.push_back(
      make_rate_row(cfg.distribution.label(), cfg.epsilon, n, cfg.trials, total, cfg.delta));
  report.passed = report.rows.front().pass;
  return report;
}

std::vector<std::vector<double>> negcorr_covariances(const DiscretePmf& pmf, std::uint64_t n) {
  if (n < 2) throw ValidationError("negcorr enumeration needs n >= 2");
  const std::size_t m = pmf.size();
  double states = 1.0;
  for (std::uint64_t i = 0; i < n; ++i) states *= static_cast<double>(m);
  if (states > 1e6) throw EnumerationError("sample space m^n exceeds 1e6 outcomes");
  const auto total = static_cast<std::uint64_t>(states);

  std::vector<long double> mean(m, 0.0L);
  std::vector<std::vector<long double>> cross(m, std::vector<long double>(m, 0.0L));
  std::vector<std::uint64_t> counts(m, 0);
  std::vector<std::uint64_t> contrib(m, 0);

  for (std::uint64_t index = 0; index < total; ++index) {
    std::fill(counts.begin(), counts.end(), 0);
    long double weight = 1.0L;
    std::uint64_t rest = index;
    for (std::uint64_t pos = 0; pos < n; ++pos) {
      const std::uint64_t symbol = rest % m;
      rest /= m;
      weight *= static_cast<long double>(pmf.prob(symbol));
      ++counts[symbol];
    }
    if (weight == 0.0L) continue;
    for (std::size_t x = 0; x < m; ++x) contrib[x] = counts[x] * (counts[x] - 1);
    for (std::size_t x = 0; x < m; ++x) {
      if (contrib[x] == 0) continue;
      mean[x] += weight * static_cast<long double>(contrib[x]);
      for (std::size_t y = 0; y < m; ++y) {
        if (contrib[y] != 0) {
          cross[x][y] += weight * static_cast<long double>(contrib[x]) *
                         static_cast<long double>(contrib[y]);
        }
      }
    }
  }

  std::vector<std::vector<double>> cov(m, std::vector<double>(m, 0.0));
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t y = 0; y < m; ++y) {
      cov[x][y] = static_cast<double>(cross[x][y] - mean[x] * mean[y]);
    }
  }
  return cov;
}

TrialReport run_negcorr_check(const ExperimentConfig& cfg) {
  require_kind(cfg, ExperimentKind::kNegCorr);
  TrialReport report = base_report(cfg);
  const DiscretePmf pmf = cfg.distribution.realize();
  report.covariance = negcorr_covariances(pmf, cfg.n);
  report.passed = true;
  for (std::size_t x = 0; x < report.covariance.size(); ++x) {
    for (std::size_t y = 0; y < report.covariance.size(); ++y) {
      if (x != y && report.covariance[x][y] > 1e-12) report.passed = false;
    }
  }
  return report;
}

TailEnvelope fit_envelope(std::span<const CalibrationCell> cells) {
  if (cells.empty()) throw ValidationError("calibration needs at least one cell");
  for (const CalibrationCell& cell : cells) {
    if (!(cell.wilson_hi > 0.0) || cell.wilson_hi > 1.0) {
      throw ValidationError("calibration cell has an invalid Wilson bound");
    }
  }

  // 10% resolution grids anchored at 1.0.  c_out never drops below 1: the
  // envelope is a probability bound and its outer constant is O(1) >= 1.
  std::vector<double> branch_grid;
  for (int j = -48; j <= 32; ++j) branch_grid.push_back(std::pow(1.1, j));
  std::vector<double> out_grid;
  for (int j = 0; j <= 32; ++j) out_grid.push_back(std::pow(1.1, j));

  // A cell is satisfied when at least one branch exponent stays below
  // R = ln(c_out / wilson_hi); it suffices to check branch-by-branch.
  const auto feasible = [&](double c_out, double c_sq, double c_lin, double c_heavy) {
    for (const CalibrationCell& cell : cells) {
      const double r = std::log(c_out) - std::log(cell.wilson_hi);
      if (!(c_sq * cell.exp_sq <= r || c_lin * cell.exp_lin <= r ||
            c_heavy * cell.exp_heavy <= r)) {
        return false;
      }
    }
    return true;
  };

  const double branch_min = branch_grid.front();
  double chosen_out = 0.0;
  for (const double c_out : out_grid) {
    if (feasible(c_out, branch_min, branch_min, branch_min)) {
      chosen_out = c_out;
      break;
    }
  }
  if (chosen_out == 0.0) {
    // Identify a witness cell for the failure message.
    const CalibrationCell* worst = &cells[0];
    for (const CalibrationCell& cell : cells) {
      if (cell.wilson_hi > worst->wilson_hi) worst = &cell;
    }
    throw CalibrationError("no feasible envelope constants; violating cell '" + worst->label +
                           "' with Wilson bound " + fmt(worst->wilson_hi));
  }

  // Precompute per-cell slack at the chosen c_out.
  std::vector<double> slack(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    slack[i] = std::log(chosen_out) - std::log(cells[i].wilson_hi);
  }
  double best_sum = -1.0;
  TailEnvelope best;
  best.c_out = chosen_out;
  for (const double c_sq : branch_grid) {
    for (const double c_lin : branch_grid) {
      for (const double c_heavy : branch_grid) {
        bool ok = true;
        for (std::size_t i = 0; i < cells.size(); ++i) {
          if (!(c_sq * cells[i].exp_sq <= slack[i] || c_lin * cells[i].exp_lin <= slack[i] ||
                c_heavy * cells[i].exp_heavy <= slack[i])) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        const double sum = c_sq + c_lin + c_heavy;
        if (sum > best_sum ||
            (sum == best_sum && std::tie(c_sq, c_lin, c_heavy) >
                                    std::tie(best.c_sq, best.c_lin, best.c_heavy))) {
          best_sum = sum;
          best.c_sq = c_sq;
          best.c_lin = c_lin;
          best.c_heavy = c_heavy;
        }
      }
    }
  }
  return best;
}

TrialReport run_calibrate(const ExperimentConfig& cfg) {
  require_kind(cfg, ExperimentKind::kCalibrate);
  TrialReport report = base_report(cfg);

  std::vector<CalibrationCellSpec> cell_specs = cfg.cells;
  if (cell_specs.empty()) cell_specs.push_back(CalibrationCellSpec{cfg.distribution, cfg.n});

  const unsigned workers = resolve_workers(cfg.workers);
  std::vector<CalibrationCell> cells;
  struct RowSeed {
    std::string label;
    double epsilon;
    std::uint64_t n;
    std::uint64_t exceed;
  };
  std::vector<RowSeed> row_seeds;

  for (std::size_t c = 0; c < cell_specs.size(); ++c) {
    const DiscretePmf pmf = cell_specs[c].distribution.realize();
    const std::uint64_t n = cell_specs[c].n;
    if (n < 2) throw ValidationError("calibration cell needs n >= 2");
    const double q = collision_probability(pmf);
    const double v2 = variance_proxy(pmf, n);
    const double b = scale_param(pmf, n);

    std::vector<std::vector<std::uint64_t>> exceed(
        workers, std::vector<std::uint64_t>(cfg.epsilons.size(), 0));
    std::vector<std::unique_ptr<CollisionSampler>> samplers;
    samplers.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      samplers.push_back(std::make_unique<CollisionSampler>(pmf));
    }
    parallel_trials(cfg.trials, workers, [&](unsigned w, std::uint64_t t) {
      const std::uint64_t pairs =
          samplers[w]->sample_collision_pairs(n, SampleSeed{cfg.seed, c * kCaseStride + t});
      const double deviation = std::abs(q_hat_from_pairs(pairs, n) - q);
      for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
        if (deviation > cfg.epsilons[i]) ++exceed[w][i];
      }
    });

    const std::string label = cell_specs[c].distribution.label() + "_n" + std::to_string(n);
    for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
      std::uint64_t total = 0;
      for (unsigned w = 0; w < workers; ++w) total += exceed[w][i];
      const double eps = cfg.epsilons[i];
      CalibrationCell cell;
      cell.label = label;
      cell.exp_sq = eps * eps / v2;
      cell.exp_lin = eps / b;
      cell.exp_heavy = static_cast<double>(n) * std::sqrt(eps);
      cell.wilson_hi = wilson95(total, cfg.trials).hi;
      cells.push_back(cell);
      row_seeds.push_back(RowSeed{label, eps, n, total});
    }
  }

  const TailEnvelope fitted = fit_envelope(cells);
  report.fitted_envelope = fitted;
  for (std::size_t i = 0; i < row_seeds.size(); ++i) {
    const double envelope_value =
        std::min(fitted.c_out * std::exp(-std::min({fitted.c_sq * cells[i].exp_sq,
                                                    fitted.c_lin * cells[i].exp_lin,
                                                    fitted.c_heavy * cells[i].exp_heavy})),
                 1.0);
    report.rows.push_back(make_rate_row(row_seeds[i].label, row_seeds[i].epsilon, row_seeds[i].n,
                                        cfg.trials, row_seeds[i].exceed, envelope_value));
  }
  report.passed = std::all_of(report.rows.begin(), report.rows.end(),
                              [](const ReportRow& r) { return r.pass; });
  return report;
}

TrialReport run_boosting_comparison(const ExperimentConfig& cfg) {
  require_kind(cfg, ExperimentKind::kBoosting);
  TrialReport report = base_report(cfg);
  const DiscretePmf pmf = cfg.distribution.realize();
  const std::uint64_t m = pmf.size();
  const double threshold = (1.0 + cfg.epsilon) / static_cast<double>(m);
  const bool truth_non_uniform = collision_probability(pmf) > threshold;
  const std::uint64_t budget = cfg.n;
  const std::uint64_t k = cfg.k;
  const std::uint64_t per_run = budget / k;
  if (budget % k != 0) {
    report.warnings.push_back("budget not divisible by k; per-run n rounded down to " +
                              std::to_string(per_run));
  }

  const unsigned workers = resolve_workers(cfg.workers);
  std::vector<std::uint64_t> errors_single(workers, 0);
  std::vector<std::uint64_t> errors_median(workers, 0);
  std::vector<std::unique_ptr<CollisionSampler>> samplers;
  samplers.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) samplers.push_back(std::make_unique<CollisionSampler>(pmf));
  std::vector<std::vector<double>> scratch(workers, std::vector<double>(k, 0.0));

  constexpr std::uint64_t kRunStride = std::uint64_t{1} << 20;
  parallel_trials(cfg.trials, workers, [&](unsigned w, std::uint64_t t) {
    // Run j of trial t draws from stream t * 2^20 + j; the single full-
    // budget estimate shares stream j = 0, so k = 1 degenerates to an
    // exact copy of the single-run experiment.
    const std::uint64_t base = t * kRunStride;
    const std::uint64_t pairs_single =
        samplers[w]->sample_collision_pairs(budget, SampleSeed{cfg.seed, base});
    const bool single_decision = q_hat_from_pairs(pairs_single, budget) > threshold;
    if (single_decision != truth_non_uniform) ++errors_single[w];

    std::vector<double>& estimates = scratch[w];
    for (std::uint64_t j = 0; j < k; ++j) {
      const std::uint64_t pairs =
          samplers[w]->sample_collision_pairs(per_run, SampleSeed{cfg.seed, base + j});
      estimates[j] = q_hat_from_pairs(pairs, per_run);
    }
    std::sort(estimates.begin(), estimates.end());
    const double median = (k % 2 == 1)
                              ? estimates[k / 2]
                              : 0.5 * (estimates[k / 2 - 1] + estimates[k / 2]);
    const bool median_decision = median > threshold;
    if (median_decision != truth_non_uniform) ++errors_median[w];
  });

  std::uint64_t total_single = 0;
  std::uint64_t total_median = 0;
  for (unsigned w = 0; w < workers; ++w) {
    total_single += errors_single[w];
    total_median += errors_median[w];
  }
  report.rows.push_back(
      make_rate_row("single", cfg.epsilon, budget, cfg.trials, total_single, cfg.delta));
  report.rows.push_back(make_rate_row("median_k" + std::to_string(k), cfg.epsilon, per_run,
                                      cfg.trials, total_median, cfg.delta));
  // The comparison itself: the full-budget run should not lose to the
  // medianed split by more than the split's Wilson width.
  const ReportRow& single_row = report.rows[0];
  const ReportRow& median_row = report.rows[1];
  report.passed = single_row.frequency <=
                  median_row.frequency + (median_row.wilson_hi - median_row.wilson_lo);
  return report;
}

TrialReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  TrialReport report;
  switch (cfg.kind) {
    case ExperimentKind::kTail:
      report = run_tail_experiment(cfg);
      break;
    case ExperimentKind::kTester:
      report = run_tester_experiment(cfg);
      break;
    case ExperimentKind::kEntropy:
      report = run_entropy_experiment(cfg);
      break;
    case ExperimentKind::kNegCorr:
      report = run_negcorr_check(cfg);
      break;
    case ExperimentKind::kCalibrate:
      report = run_calibrate(cfg);
      break;
    case ExperimentKind::kBoosting:
      report = run_boosting_comparison(cfg);
      break;
  }
  const auto end = std::chrono::steady_clock::now();
  report.wall_seconds = std::chrono::duration<double>(end - start).count();

  if (!cfg.out.empty()) {
    std::ofstream csv(cfg.out);
    if (!csv) throw std::runtime_error("cannot open output file '" + cfg.out + "'");
    csv << report.to_csv();
    csv.close();
    std::ofstream summary(cfg.out + ".json");
    if (!summary) throw std::runtime_error("cannot open output file '" + cfg.out + ".json'");
    summary << report.to_json().dump(2) << '\n';
  }
  return report;
}

}  // namespace collider
