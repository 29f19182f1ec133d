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

#include "collider.h"

#include <algorithm>
#include <cstring>
#include <nlohmann/json.hpp>
#include <string>

#include "collider/bounds.hpp"
#include "collider/errors.hpp"
#include "collider/estimator.hpp"
#include "collider/harness.hpp"
#include "collider/moments.hpp"
#include "collider/pmf.hpp"
#include "collider/sampling.hpp"
#include "collider/version.hpp"

struct clr_pmf {
  collider::DiscretePmf impl;
};

struct clr_histogram {
  collider::SampleHistogram impl;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

// Maps core exceptions onto status codes; every C entry point funnels
// through here so the handle layer stays exception-free.
template <typename Fn>
clr_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return CLR_OK;
  } catch (const collider::EnumerationError& e) {
    set_error(e.what());
    return CLR_ERR_ENUMERATION;
  } catch (const collider::ValidationError& e) {
    set_error(e.what());
    return CLR_ERR_INVALID_ARGUMENT;
  } catch (const collider::DomainError& e) {
    set_error(e.what());
    return CLR_ERR_DOMAIN;
  } catch (const collider::EstimateUndefinedError& e) {
    set_error(e.what());
    return CLR_ERR_UNDEFINED;
  } catch (const collider::BracketError& e) {
    set_error(e.what());
    return CLR_ERR_BRACKET;
  } catch (const collider::CalibrationError& e) {
    set_error(e.what());
    return CLR_ERR_CALIBRATION;
  } catch (const std::exception& e) {
    set_error(e.what());
    return CLR_ERR_INTERNAL;
  } catch (...) {
    set_error("unknown failure");
    return CLR_ERR_INTERNAL;
  }
}

clr_status require(bool ok, const char* message) {
  if (ok) return CLR_OK;
  set_error(message);
  return CLR_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* clr_version(void) { return COLLIDER_VERSION_STRING; }

const char* clr_status_name(clr_status status) {
  switch (status) {
    case CLR_OK:
      return "ok";
    case CLR_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
    case CLR_ERR_DOMAIN:
      return "domain_error";
    case CLR_ERR_UNDEFINED:
      return "estimate_undefined";
    case CLR_ERR_ENUMERATION:
      return "enumeration_too_large";
    case CLR_ERR_CALIBRATION:
      return "calibration_failed";
    case CLR_ERR_BRACKET:
      return "bracket_failed";
    case CLR_ERR_IO:
      return "io_error";
    case CLR_ERR_INTERNAL:
      return "internal_error";
  }
  return "unknown";
}

const char* clr_last_error(void) { return g_last_error.c_str(); }

clr_status clr_pmf_create(const double* weights, size_t m, clr_pmf** out) {
  if (const clr_status s = require(weights != nullptr && out != nullptr, "null pointer argument");
      s != CLR_OK) {
    return s;
  }
  return guarded([&] {
    *out = new clr_pmf{collider::DiscretePmf::from_weights(std::span<const double>(weights, m))};
  });
}

clr_status clr_pmf_create_uniform(uint64_t m, clr_pmf** out) {
  if (const clr_status s = require(out != nullptr, "null pointer argument"); s != CLR_OK) return s;
  return guarded([&] { *out = new clr_pmf{collider::DiscretePmf::uniform(m)}; });
}

clr_status clr_pmf_create_zipf(uint64_t m, double s, clr_pmf** out) {
  if (const clr_status st = require(out != nullptr, "null pointer argument"); st != CLR_OK) {
    return st;
  }
  return guarded([&] { *out = new clr_pmf{collider::DiscretePmf::zipf(m, s)}; });
}

clr_status clr_pmf_create_planted_bias(uint64_t m, double alpha, clr_pmf** out) {
  if (const clr_status s = require(out != nullptr, "null pointer argument"); s != CLR_OK) return s;
  return guarded([&] { *out = new clr_pmf{collider::DiscretePmf::planted_bias(m, alpha)}; });
}

void clr_pmf_free(clr_pmf* pmf) { delete pmf; }

size_t clr_pmf_size(const clr_pmf* pmf) { return pmf ? pmf->impl.size() : 0; }

clr_status clr_pmf_probs(const clr_pmf* pmf, double* buf, size_t len) {
  if (const clr_status s = require(pmf != nullptr && buf != nullptr, "null pointer argument");
      s != CLR_OK) {
    return s;
  }
  return guarded([&] {
    const std::span<const double> probs = pmf->impl.probs();
    std::copy_n(probs.begin(), std::min(len, probs.size()), buf);
  });
}

clr_status clr_pmf_collision_probability(const clr_pmf* pmf, double* out) {
  if (const clr_status s = require(pmf != nullptr && out != nullptr, "null pointer argument");
      s != CLR_OK) {
    return s;
  }
  return guarded([&] { *out = collider::collision_probability(pmf->impl); });
}

clr_status clr_pmf_power_sum(const clr_pmf* pmf, unsigned k, double* out) {
  if (const clr_status s = require(pmf != nullptr && out != nullptr, "null pointer argument");
      s != CLR_OK) {
    return s;
  }
  return guarded([&] { *out = collider::power_sum(pmf->impl, k); });
}

clr_status clr_pmf_max_prob(const clr_pmf* pmf, double* out) {
  if (const clr_status s = require(pmf != nullptr && out != nullptr, "null pointer argument");
      s != CLR_OK) {
    return s;
  }
  return guarded([&] { *out = pmf->impl.max_prob(); });
}

clr_status clr_sample_histogram(const clr_pmf* pmf, uint64_t n, uint64_t master_seed,
                                uint64_t stream_id, clr_histogram** out) {
  if (const clr_status s = require(pmf != nullptr && out != nullptr, "null pointer argument");
      s != CLR_OK) {
    return s;
  }
  return guarded([&] {
    *out = new clr_histogram{
        collider::sample_histogram(pmf->impl, n, collider::SampleSeed{master_seed, stream_id})};
  });
}

clr_status clr_histogram_create(const uint64_t* counts, size_t m, clr_histogram** out) {
  if (const clr_status s = require(counts != nullptr && out != nullptr, "null pointer argument");
      s != CLR_OK) {
    return s;
  }
  return guarded([&] {
    *out = new clr_histogram{
        collider::SampleHistogram(std::vector<std::uint64_t>(counts, counts + m))};
  });
}

void clr_histogram_free(clr_histogram* hist) { delete hist; }

size_t clr_histogram_size(const clr_histogram* hist) { return hist ? hist->impl.size() : 0; }

uint64_t clr_histogram_total(const clr_histogram* hist) { return hist ? hist->impl.total() : 0; }

clr_status clr_histogram_counts(const clr_histogram* hist, uint64_t* buf, size_t len) {
  if (const clr_status s = require(hist != nullptr && buf != nullptr, "null pointer argument");
      s != CLR_OK) {
    return s;
  }
  return guarded([&] {
    const std::span<const std::uint64_t> counts = hist->impl.counts();
    std::copy_n(counts.begin(), std::min(len, counts.size()), buf);
  });
}

clr_status clr_estimate_from_histogram(const clr_histogram* hist, double* q_hat,
                                       uint64_t* collision_pairs) {
  if (const clr_status s = require(hist != nullptr && q_hat != nullptr, "null pointer argument");
      s != CLR_OK) {
    return s;
  }
  return guarded([&] {
    const collider::CollisionEstimate est = collider::estimate_from_histogram(hist->impl);
    *q_hat = est.q_hat;
    if (collision_pairs != nullptr) *collision_pairs = est.collision_pairs;
  });
}

clr_status clr_uniformity_test(const clr_histogram* hist, uint64_t m, double epsilon,
                               int* non_uniform, double* q_hat, double* threshold,
                               int* epsilon_in_range) {
  if (const clr_status s =
          require(hist != nullptr && non_uniform != nullptr, "null pointer argument");
      s != CLR_OK) {
    return s;
  }
  return guarded([&] {
    const collider::UniformityResult result = collider::uniformity_test(hist->impl, m, epsilon);
    *non_uniform = result.non_uniform ? 1 : 0;
    if (q_hat != nullptr) *q_hat = result.q_hat;
    if (threshold != nullptr) *threshold = result.threshold;
    if (epsilon_in_range != nullptr) *epsilon_in_range = result.epsilon_in_range ? 1 : 0;
  });
}

clr_status clr_entropy_estimate(const clr_histogram* hist, double base, double* out) {
  if (const clr_status s = require(hist != nullptr && out != nullptr, "null pointer argument");
      s != CLR_OK) {
    return s;
  }
  return guarded([&] { *out = collider::entropy_estimate(hist->impl, base); });
}

clr_status clr_tester_sample_size(uint64_t m, double epsilon, double delta, double c,
                                  uint64_t* out) {
  if (const clr_status s = require(out != nullptr, "null pointer argument"); s != CLR_OK) return s;
  return guarded([&] { *out = collider::tester_sample_size(m, epsilon, delta, c); });
}

clr_status clr_entropy_sample_size(double q_lower, double epsilon, double delta, double c,
                                   uint64_t* out) {
  if (const clr_status s = require(out != nullptr, "null pointer argument"); s != CLR_OK) return s;
  return guarded([&] { *out = collider::entropy_sample_size(q_lower, epsilon, delta, c); });
}

double clr_default_tester_c(void) { return collider::kDefaultTesterC; }

double clr_default_entropy_c(void) { return collider::kDefaultEntropyC; }

clr_status clr_variance_proxy(const clr_pmf* pmf, uint64_t n, double* out) {
  if (const clr_status s = require(pmf != nullptr && out != nullptr, "null pointer argument");
      s != CLR_OK) {
    return s;
  }
  return guarded([&] { *out = collider::variance_proxy(pmf->impl, n); });
}

clr_status clr_scale_param(const clr_pmf* pmf, uint64_t n, double* out) {
  if (const clr_status s = require(pmf != nullptr && out != nullptr, "null pointer argument");
      s != CLR_OK) {
    return s;
  }
  return guarded([&] { *out = collider::scale_param(pmf->impl, n); });
}

clr_status clr_subgamma_tail(double t, double v2, double b, double* out) {
  if (const clr_status s = require(out != nullptr, "null pointer argument"); s != CLR_OK) return s;
  return guarded([&] { *out = collider::subgamma_tail(t, collider::SubGammaParams{v2, b}); });
}

clr_status clr_tail_envelope(double epsilon, const clr_pmf* pmf, uint64_t n,
                             const clr_envelope* env, double* out) {
  if (const clr_status s = require(pmf != nullptr && out != nullptr, "null pointer argument");
      s != CLR_OK) {
    return s;
  }
  return guarded([&] {
    collider::TailEnvelope envelope;
    if (env != nullptr) {
      envelope = collider::TailEnvelope{env->c_out, env->c_sq, env->c_lin, env->c_heavy};
    }
    *out = collider::tail_envelope(epsilon, pmf->impl, n, envelope);
  });
}

clr_envelope clr_default_envelope(void) {
  const collider::TailEnvelope env;
  return clr_envelope{env.c_out, env.c_sq, env.c_lin, env.c_heavy};
}

clr_status clr_lambert_w(double x, double* out) {
  if (const clr_status s = require(out != nullptr, "null pointer argument"); s != CLR_OK) return s;
  return guarded([&] { *out = collider::lambert_w(x); });
}

clr_status clr_symm_diff_moment_exact(uint64_t n, double p, unsigned d, double* out) {
  if (const clr_status s = require(out != nullptr, "null pointer argument"); s != CLR_OK) return s;
  return guarded([&] { *out = collider::symm_diff_moment_exact(n, p, d); });
}

clr_status clr_symm_diff_moment_bound(uint64_t n, double p, unsigned d, double c, double* out) {
  if (const clr_status s = require(out != nullptr, "null pointer argument"); s != CLR_OK) return s;
  return guarded([&] { *out = collider::symm_diff_moment_bound(n, p, d, c); });
}

clr_status clr_bin_moment_exact(uint64_t n, double p, unsigned d, double* out) {
  if (const clr_status s = require(out != nullptr, "null pointer argument"); s != CLR_OK) return s;
  return guarded([&] { *out = collider::bin_moment_exact(n, p, d); });
}

clr_status clr_bin_moment_bound(uint64_t n, double p, unsigned d, double c1, double c2,
                                double* out) {
  if (const clr_status s = require(out != nullptr, "null pointer argument"); s != CLR_OK) return s;
  return guarded([&] { *out = collider::bin_moment_bound(n, p, d, c1, c2); });
}

double clr_default_bin_moment_c1(void) { return collider::kDefaultBinMomentC1; }

double clr_default_bin_moment_c2(void) { return collider::kDefaultBinMomentC2; }

clr_status clr_run_experiment_json(const char* config_json, char** report_json) {
  if (const clr_status s =
          require(config_json != nullptr && report_json != nullptr, "null pointer argument");
      s != CLR_OK) {
    return s;
  }
  return guarded([&] {
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
      throw collider::ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    const collider::ExperimentConfig cfg = collider::ExperimentConfig::from_json(parsed);
    const collider::TrialReport report = collider::run_experiment(cfg);
    const std::string serialized = report.to_json().dump();
    char* buffer = new char[serialized.size() + 1];
    std::memcpy(buffer, serialized.c_str(), serialized.size() + 1);
    *report_json = buffer;
  });
}

void clr_string_free(char* str) { delete[] str; }

}  // extern "C"
