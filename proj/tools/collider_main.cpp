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

// Command-line front end.  Talks to the library exclusively through the
// extern-C API in collider.h.
//
// Exit codes: 0 success/accept, 1 reject (non-uniform decision or failed
// experiment checks), 2 usage or input error, 3 internal failure.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "collider.h"

namespace {

using nlohmann::json;

constexpr int kExitAccept = 0;
constexpr int kExitReject = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

// Formats a double exactly as nlohmann serializes it, so every number in
// the human-readable output matches the --json output digit for digit.
std::string fmt(double v) { return json(v).dump(); }

int status_exit(clr_status status) {
  if (status == CLR_OK) return kExitAccept;
  return status == CLR_ERR_INVALID_ARGUMENT ? kExitUsage : kExitInternal;
}

int fail(clr_status status, const std::string& context) {
  std::cerr << "error: " << context << ": " << clr_status_name(status) << ": " << clr_last_error()
            << "\n";
  return status_exit(status);
}

struct PmfHandle {
  clr_pmf* ptr = nullptr;
  ~PmfHandle() { clr_pmf_free(ptr); }
};

struct HistHandle {
  clr_histogram* ptr = nullptr;
  ~HistHandle() { clr_histogram_free(ptr); }
};

// Shared distribution flags: exactly one of --uniform, --zipf,
// --planted-bias, --pmf-file selects the family.
struct DistributionFlags {
  std::uint64_t uniform_m = 0;
  std::vector<double> zipf;          // m, s
  std::vector<double> planted_bias;  // m, alpha
  std::string pmf_file;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--uniform", uniform_m, "uniform distribution over M symbols");
    cmd.add_option("--zipf", zipf, "zipf distribution: M S")->expected(2);
    cmd.add_option("--planted-bias", planted_bias, "planted-bias distribution: M ALPHA")
        ->expected(2);
    cmd.add_option("--pmf-file", pmf_file, "file of whitespace-separated weights");
  }

  int selected() const {
    return (uniform_m > 0) + !zipf.empty() + !planted_bias.empty() + !pmf_file.empty();
  }

  // Creates the pmf; returns nonzero exit code on failure.
  int create(PmfHandle& out) const {
    clr_status status = CLR_OK;
    if (uniform_m > 0) {
      status = clr_pmf_create_uniform(uniform_m, &out.ptr);
    } else if (!zipf.empty()) {
      status = clr_pmf_create_zipf(static_cast<std::uint64_t>(zipf[0]), zipf[1], &out.ptr);
    } else if (!planted_bias.empty()) {
      status = clr_pmf_create_planted_bias(static_cast<std::uint64_t>(planted_bias[0]),
                                           planted_bias[1], &out.ptr);
    } else if (!pmf_file.empty()) {
      std::ifstream in(pmf_file);
      if (!in) {
        std::cerr << "error: cannot open pmf file '" << pmf_file << "'\n";
        return kExitUsage;
      }
      std::vector<double> weights;
      double w = 0.0;
      while (in >> w) weights.push_back(w);
      if (!in.eof()) {
        std::cerr << "error: pmf file '" << pmf_file << "' contains non-numeric data\n";
        return kExitUsage;
      }
      status = clr_pmf_create(weights.data(), weights.size(), &out.ptr);
    } else {
      std::cerr << "error: no distribution given (use --uniform/--zipf/--planted-bias/--pmf-file)\n";
      return kExitUsage;
    }
    if (status != CLR_OK) return fail(status, "creating distribution");
    return 0;
  }
};

struct EnvelopeFlags {
  clr_envelope env = clr_default_envelope();

  void add_to(CLI::App& cmd) {
    cmd.add_option("--c-out", env.c_out, "envelope outer constant");
    cmd.add_option("--c-sq", env.c_sq, "envelope constant on eps^2/v^2");
    cmd.add_option("--c-lin", env.c_lin, "envelope constant on eps/b");
    cmd.add_option("--c-heavy", env.c_heavy, "envelope constant on n*sqrt(eps)");
  }
};

// Reads a sample file (one UTF-8 symbol token per line; symbols interned
// by first appearance) into counts.  Returns false on malformed input.
bool read_sample_file(const std::string& path, std::vector<std::uint64_t>& counts,
                      std::uint64_t& n, std::string& error) {
  std::ifstream in(path);
  if (!in) {
    error = "cannot open sample file '" + path + "'";
    return false;
  }
  std::unordered_map<std::string, std::size_t> symbol_ids;
  counts.clear();
  n = 0;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.pop_back();
    }
    std::size_t start = 0;
    while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
    const std::string token = line.substr(start);
    if (token.empty()) continue;
    if (token.find_first_of(" \t") != std::string::npos) {
      error = "line " + std::to_string(line_number) + " holds more than one token";
      return false;
    }
    const auto [it, inserted] = symbol_ids.try_emplace(token, counts.size());
    if (inserted) counts.push_back(0);
    ++counts[it->second];
    ++n;
  }
  if (n < 2) {
    error = "sample file must hold at least 2 symbols";
    return false;
  }
  return true;
}

int run_estimate(const std::string& file, double base, bool as_json) {
  std::vector<std::uint64_t> counts;
  std::uint64_t n = 0;
  std::string error;
  if (!read_sample_file(file, counts, n, error)) {
    std::cerr << "error: " << error << "\n";
    return kExitUsage;
  }
  HistHandle hist;
  if (const clr_status s = clr_histogram_create(counts.data(), counts.size(), &hist.ptr);
      s != CLR_OK) {
    return fail(s, "building histogram");
  }
  double q_hat = 0.0;
  std::uint64_t pairs = 0;
  if (const clr_status s = clr_estimate_from_histogram(hist.ptr, &q_hat, &pairs); s != CLR_OK) {
    return fail(s, "estimating");
  }
  double entropy = 0.0;
  bool entropy_defined = true;
  const clr_status entropy_status = clr_entropy_estimate(hist.ptr, base, &entropy);
  if (entropy_status == CLR_ERR_UNDEFINED) {
    entropy_defined = false;
  } else if (entropy_status != CLR_OK) {
    return fail(entropy_status, "estimating entropy");
  }

  json out;
  out["n"] = n;
  out["distinct_symbols"] = counts.size();
  out["collision_pairs"] = pairs;
  out["q_hat"] = q_hat;
  out["base"] = base;
  out["entropy"] = entropy_defined ? json(entropy) : json(nullptr);
  if (as_json) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "n: " << n << "\n"
              << "distinct symbols: " << counts.size() << "\n"
              << "collision pairs: " << pairs << "\n"
              << "q_hat: " << fmt(q_hat) << "\n";
    if (entropy_defined) {
      std::cout << "entropy (log base " << fmt(base) << "): " << fmt(entropy) << "\n";
    } else {
      std::cout << "entropy: undefined (no collisions observed; increase n)\n";
    }
  }
  return kExitAccept;
}

int run_test_uniformity(const DistributionFlags& dist, const std::string& file, std::uint64_t m,
                        std::uint64_t n, double epsilon, std::uint64_t seed, std::uint64_t stream,
                        bool as_json) {
  HistHandle hist;
  if (!file.empty()) {
    if (m == 0) {
      std::cerr << "error: --m is required with --file (the sample may miss symbols)\n";
      return kExitUsage;
    }
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;
    std::string error;
    if (!read_sample_file(file, counts, total, error)) {
      std::cerr << "error: " << error << "\n";
      return kExitUsage;
    }
    if (counts.size() > m) {
      std::cerr << "error: sample holds " << counts.size() << " distinct symbols, more than m = "
                << m << "\n";
      return kExitUsage;
    }
    counts.resize(m, 0);
    if (const clr_status s = clr_histogram_create(counts.data(), counts.size(), &hist.ptr);
        s != CLR_OK) {
      return fail(s, "building histogram");
    }
  } else {
    if (dist.selected() != 1) {
      std::cerr << "error: give a sample --file or exactly one distribution\n";
      return kExitUsage;
    }
    if (n < 2) {
      std::cerr << "error: --n (number of draws) is required with a distribution\n";
      return kExitUsage;
    }
    PmfHandle pmf;
    if (const int rc = dist.create(pmf); rc != 0) return rc;
    if (m == 0) m = clr_pmf_size(pmf.ptr);
    if (const clr_status s = clr_sample_histogram(pmf.ptr, n, seed, stream, &hist.ptr);
        s != CLR_OK) {
      return fail(s, "sampling");
    }
  }

  int non_uniform = 0;
  int eps_in_range = 1;
  double q_hat = 0.0;
  double threshold = 0.0;
  if (const clr_status s = clr_uniformity_test(hist.ptr, m, epsilon, &non_uniform, &q_hat,
                                               &threshold, &eps_in_range);
      s != CLR_OK) {
    return fail(s, "testing uniformity");
  }
  if (!eps_in_range) {
    std::cerr << "warning: epsilon outside the tester regime [1/sqrt(m), 1]\n";
  }

  json out;
  out["decision"] = non_uniform ? "non_uniform" : "uniform";
  out["q_hat"] = q_hat;
  out["threshold"] = threshold;
  out["m"] = m;
  out["epsilon"] = epsilon;
  out["epsilon_in_range"] = eps_in_range != 0;
  if (as_json) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "decision: " << (non_uniform ? "non_uniform" : "uniform") << "\n"
              << "q_hat: " << fmt(q_hat) << "\n"
              << "threshold: " << fmt(threshold) << "\n";
  }
  return non_uniform ? kExitReject : kExitAccept;
}

int run_bounds(const DistributionFlags& dist, std::uint64_t n, std::vector<double> epsilons,
               const EnvelopeFlags& envelope, bool as_json) {
  if (dist.selected() != 1) {
    std::cerr << "error: give exactly one distribution\n";
    return kExitUsage;
  }
  PmfHandle pmf;
  if (const int rc = dist.create(pmf); rc != 0) return rc;
  double v2 = 0.0;
  double b = 0.0;
  if (const clr_status s = clr_variance_proxy(pmf.ptr, n, &v2); s != CLR_OK) {
    return fail(s, "variance proxy");
  }
  if (const clr_status s = clr_scale_param(pmf.ptr, n, &b); s != CLR_OK) {
    return fail(s, "scale parameter");
  }
  double q = 0.0;
  clr_pmf_collision_probability(pmf.ptr, &q);
  if (epsilons.empty()) {
    for (int k = -4; k <= 0; ++k) epsilons.push_back(std::pow(10.0, k));
  }

  json rows = json::array();
  for (const double eps : epsilons) {
    double value = 0.0;
    if (const clr_status s = clr_tail_envelope(eps, pmf.ptr, n, &envelope.env, &value);
        s != CLR_OK) {
      return fail(s, "tail envelope");
    }
    rows.push_back({{"epsilon", eps}, {"envelope", value}});
  }
  json out;
  out["m"] = clr_pmf_size(pmf.ptr);
  out["n"] = n;
  out["collision_probability"] = q;
  out["variance_proxy"] = v2;
  out["scale"] = b;
  out["envelope_constants"] = {{"c_out", envelope.env.c_out},
                               {"c_sq", envelope.env.c_sq},
                               {"c_lin", envelope.env.c_lin},
                               {"c_heavy", envelope.env.c_heavy}};
  out["envelope"] = rows;
  if (as_json) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "m: " << clr_pmf_size(pmf.ptr) << "\n"
              << "n: " << n << "\n"
              << "collision probability Q: " << fmt(q) << "\n"
              << "variance proxy v^2: " << fmt(v2) << "\n"
              << "scale b: " << fmt(b) << "\n"
              << "tail envelope:\n";
    for (const json& row : rows) {
      std::cout << "  epsilon " << fmt(row["epsilon"].get<double>()) << " -> "
                << fmt(row["envelope"].get<double>()) << "\n";
    }
  }
  return kExitAccept;
}

int run_moment_table(const std::string& kind, const std::vector<std::uint64_t>& n_values,
                     const std::vector<double>& p_values, const std::vector<unsigned>& d_values,
                     double c, double c1, double c2, const std::string& out_path) {
  std::ostringstream csv;
  csv << "n,p,d,exact,bound,ratio\n";
  for (const std::uint64_t n : n_values) {
    for (const double p : p_values) {
      for (const unsigned d : d_values) {
        double exact = 0.0;
        double bound = 0.0;
        clr_status s;
        if (kind == "bin") {
          s = clr_bin_moment_exact(n, p, d, &exact);
          if (s == CLR_OK) s = clr_bin_moment_bound(n, p, d, c1, c2, &bound);
        } else {
          s = clr_symm_diff_moment_exact(n, p, d, &exact);
          if (s == CLR_OK) s = clr_symm_diff_moment_bound(n, p, d, c, &bound);
        }
        if (s != CLR_OK) return fail(s, "moment table");
        const double ratio = bound > 0.0 ? exact / bound : 0.0;
        csv << n << ',' << fmt(p) << ',' << d << ',' << fmt(exact) << ',' << fmt(bound) << ','
            << fmt(ratio) << '\n';
      }
    }
  }
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "error: cannot open output file '" << out_path << "'\n";
      return kExitUsage;
    }
    out << csv.str();
  }
  return kExitAccept;
}

int run_experiment_cmd(const std::string& config_path, std::optional<std::uint64_t> seed,
                       std::optional<std::uint64_t> trials, std::optional<unsigned> workers,
                       const std::string& out_override, bool as_json, bool require_calibrate) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot open config file '" << config_path << "'\n";
    return kExitUsage;
  }
  json config;
  try {
    in >> config;
  } catch (const json::exception& e) {
    std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
    return kExitUsage;
  }
  if (require_calibrate) config["kind"] = "calibrate";
  if (seed) config["seed"] = *seed;
  if (trials) config["trials"] = *trials;
  if (workers) config["workers"] = *workers;
  if (!out_override.empty()) config["out"] = out_override;

  char* report_cstr = nullptr;
  const clr_status s = clr_run_experiment_json(config.dump().c_str(), &report_cstr);
  if (s != CLR_OK) return fail(s, "running experiment");
  json report = json::parse(report_cstr);
  clr_string_free(report_cstr);

  if (as_json) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << "kind: " << report["kind"].get<std::string>() << "\n"
              << "config hash: " << report["config_hash"].get<std::string>() << "\n"
              << "seed: " << report["seed"].get<std::uint64_t>() << "\n";
    for (const json& w : report["warnings"]) {
      std::cerr << "warning: " << w.get<std::string>() << "\n";
    }
    for (const json& row : report["rows"]) {
      std::cout << "  " << row["label"].get<std::string>() << " eps="
                << fmt(row["epsilon"].get<double>()) << " n=" << row["n"].get<std::uint64_t>()
                << " freq=" << fmt(row["frequency"].get<double>()) << " wilson=["
                << fmt(row["wilson_lo"].get<double>()) << ", "
                << fmt(row["wilson_hi"].get<double>()) << "] ref="
                << fmt(row["reference"].get<double>())
                << (row["pass"].get<bool>() ? " PASS" : " FAIL") << "\n";
    }
    if (report.contains("fitted_envelope")) {
      const json& env = report["fitted_envelope"];
      std::cout << "fitted envelope: c_out=" << fmt(env["c_out"].get<double>())
                << " c_sq=" << fmt(env["c_sq"].get<double>())
                << " c_lin=" << fmt(env["c_lin"].get<double>())
                << " c_heavy=" << fmt(env["c_heavy"].get<double>()) << "\n";
    }
    if (report.contains("covariance")) {
      std::cout << "max off-diagonal covariance: ";
      double worst = -1e300;
      const auto& cov = report["covariance"];
      for (std::size_t x = 0; x < cov.size(); ++x) {
        for (std::size_t y = 0; y < cov.size(); ++y) {
          if (x != y) worst = std::max(worst, cov[x][y].get<double>());
        }
      }
      std::cout << fmt(worst) << "\n";
    }
    std::cout << (report["passed"].get<bool>() ? "PASSED" : "FAILED") << "\n";
  }
  return report["passed"].get<bool>() ? kExitAccept : kExitReject;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"collision statistics: estimation, uniformity testing, bounds and experiments"};
  app.require_subcommand(1);
  app.fallthrough();  // allow global flags after the subcommand name
  bool as_json = false;
  app.add_flag("--json", as_json, "emit machine-readable JSON on stdout");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "collision and entropy estimates from a sample file");
  std::string estimate_file;
  double estimate_base = 2.0;
  estimate->add_option("--file", estimate_file, "sample file, one symbol per line")->required();
  estimate->add_option("--base", estimate_base, "entropy logarithm base (default 2)");

  // test-uniformity
  auto* test = app.add_subcommand("test-uniformity", "threshold collision test against uniformity");
  DistributionFlags test_dist;
  test_dist.add_to(*test);
  std::string test_file;
  std::uint64_t test_m = 0;
  std::uint64_t test_n = 0;
  double test_epsilon = 0.0;
  std::uint64_t test_seed = 0;
  std::uint64_t test_stream = 0;
  test->add_option("--file", test_file, "sample file, one symbol per line");
  test->add_option("--m", test_m, "domain size");
  test->add_option("--n", test_n, "number of draws when sampling a distribution");
  test->add_option("--epsilon", test_epsilon, "closeness parameter")->required();
  test->add_option("--seed", test_seed, "master seed");
  test->add_option("--stream", test_stream, "stream id");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "variance proxy, scale and tail envelope");
  DistributionFlags bounds_dist;
  bounds_dist.add_to(*bounds);
  EnvelopeFlags bounds_env;
  bounds_env.add_to(*bounds);
  std::uint64_t bounds_n = 0;
  std::vector<double> bounds_epsilons;
  bounds->add_option("--n", bounds_n, "sample size")->required();
  bounds->add_option("--epsilons", bounds_epsilons, "deviations to tabulate")->delimiter(',');

  // moment-table
  auto* table = app.add_subcommand("moment-table", "CSV table of exact moments vs bounds");
  std::string table_kind = "bin";
  std::vector<std::uint64_t> table_n{2, 5, 10, 20, 50};
  std::vector<double> table_p{0.01, 0.1, 0.5};
  std::vector<unsigned> table_d{2, 4, 6, 8};
  double table_c = 1.0;
  double table_c1 = clr_default_bin_moment_c1();
  double table_c2 = clr_default_bin_moment_c2();
  std::string table_out;
  table->add_option("--kind", table_kind, "bin or symm-diff")
      ->check(CLI::IsMember({"bin", "symm-diff"}));
  table->add_option("--n-values", table_n, "sample sizes")->delimiter(',');
  table->add_option("--p-values", table_p, "probabilities")->delimiter(',');
  table->add_option("--d-values", table_d, "even moment orders")->delimiter(',');
  table->add_option("--c", table_c, "constant for symm-diff bound");
  table->add_option("--c1", table_c1, "first constant for bin bound");
  table->add_option("--c2", table_c2, "second constant for bin bound");
  table->add_option("--out", table_out, "output CSV path (default stdout)");

  // experiment / calibrate
  auto* experiment = app.add_subcommand("experiment", "run a JSON-configured experiment");
  auto* calibrate = app.add_subcommand("calibrate", "fit envelope constants from Monte Carlo data");
  std::string config_path;
  std::string calib_config_path;
  std::optional<std::uint64_t> override_seed;
  std::optional<std::uint64_t> override_trials;
  std::optional<unsigned> override_workers;
  std::string override_out;
  experiment->add_option("--config", config_path, "experiment config JSON")->required();
  experiment->add_option("--seed", override_seed, "override the master seed");
  experiment->add_option("--trials", override_trials, "override the trial count");
  experiment->add_option("--workers", override_workers, "override the worker count");
  experiment->add_option("--out", override_out, "override the CSV output path");
  calibrate->add_option("--config", calib_config_path, "calibration config JSON")->required();
  calibrate->add_option("--seed", override_seed, "override the master seed");
  calibrate->add_option("--trials", override_trials, "override the trial count");
  calibrate->add_option("--workers", override_workers, "override the worker count");
  calibrate->add_option("--out", override_out, "override the CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (estimate->parsed()) return run_estimate(estimate_file, estimate_base, as_json);
    if (test->parsed()) {
      return run_test_uniformity(test_dist, test_file, test_m, test_n, test_epsilon, test_seed,
                                 test_stream, as_json);
    }
    if (bounds->parsed()) {
      return run_bounds(bounds_dist, bounds_n, bounds_epsilons, bounds_env, as_json);
    }
    if (table->parsed()) {
      return run_moment_table(table_kind, table_n, table_p, table_d, table_c, table_c1, table_c2,
                              table_out);
    }
    if (experiment->parsed()) {
      return run_experiment_cmd(config_path, override_seed, override_trials, override_workers,
                                override_out, as_json, false);
    }
    if (calibrate->parsed()) {
      return run_experiment_cmd(calib_config_path, override_seed, override_trials,
                                override_workers, override_out, as_json, true);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
