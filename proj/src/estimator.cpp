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

#include "collider/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "collider/errors.hpp"

namespace collider {
namespace {

double pairs_to_q(unsigned __int128 pairs, std::uint64_t n) {
  const unsigned __int128 total =
      static_cast<unsigned __int128>(n) * static_cast<unsigned __int128>(n - 1);
  return static_cast<double>(pairs) / static_cast<double>(total);
}

}  // namespace

SampleHistogram::SampleHistogram(std::vector<std::uint64_t> counts)
    : counts_(std::move(counts)) {
  if (counts_.empty()) throw ValidationError("histogram must have at least one bin");
  unsigned __int128 total = 0;
  for (const std::uint64_t c : counts_) total += c;
  if (total < 2) throw ValidationError("histogram must hold at least 2 samples");
  if (total > static_cast<unsigned __int128>(std::uint64_t{1} << 32)) {
    throw ValidationError("histogram limited to 2^32 samples");
  }
  total_ = static_cast<std::uint64_t>(total);
}

CollisionEstimate estimate_pairwise(std::span<const std::uint32_t> sample) {
  const std::uint64_t n = sample.size();
  if (n < 2) throw ValidationError("collision estimate needs at least 2 samples");
  unsigned __int128 pairs = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    for (std::size_t j = 0; j < sample.size(); ++j) {
      if (i != j && sample[i] == sample[j]) ++pairs;
    }
  }
  return CollisionEstimate{pairs_to_q(pairs, n), n, static_cast<std::uint64_t>(pairs)};
}

CollisionEstimate estimate_from_histogram(const SampleHistogram& hist) {
  const std::uint64_t n = hist.total();
  unsigned __int128 pairs = 0;
  for (const std::uint64_t c : hist.counts()) {
    if (c > 1) pairs += static_cast<unsigned __int128>(c) * (c - 1);
  }
  return CollisionEstimate{pairs_to_q(pairs, n), n, static_cast<std::uint64_t>(pairs)};
}

std::vector<BinContribution> bin_contributions(const SampleHistogram& hist) {
  std::vector<BinContribution> out;
  for (std::size_t x = 0; x < hist.size(); ++x) {
    const std::uint64_t c = hist.count(x);
    if (c > 0) out.push_back(BinContribution{x, c * (c - 1)});
  }
  return out;
}

CenteredDecomposition centered_decomposition(std::uint64_t s, std::uint64_t n, double p) {
  if (s > n) throw ValidationError("bin count exceeds sample size");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p must lie in [0, 1]");
  const double nd = static_cast<double>(n);
  const double sd = static_cast<double>(s);
  const double u1 = sd - nd * p;
  // U2 = U1^2 - sum xi_i^2, where the realized indicator vector has s ones.
  const double sum_sq = sd * (1.0 - p) * (1.0 - p) + (nd - sd) * p * p;
  const double u2 = u1 * u1 - sum_sq;
  const double lhs = sd * sd - sd - nd * (nd - 1.0) * p * p;
  return CenteredDecomposition{lhs, u1, u2};
}

UniformityResult uniformity_test(const SampleHistogram& hist, std::uint64_t m, double epsilon) {
  if (m == 0) throw ValidationError("domain size m must be at least 1");
  if (!std::isfinite(epsilon) || epsilon <= 0.0) {
    throw ValidationError("epsilon must be positive and finite");
  }
  const double threshold = (1.0 + epsilon) / static_cast<double>(m);
  const CollisionEstimate est = estimate_from_histogram(hist);
  UniformityResult result;
  result.q_hat = est.q_hat;
  result.threshold = threshold;
  result.non_uniform = est.q_hat > threshold;  // ties count as uniform
  result.epsilon_in_range =
      epsilon >= 1.0 / std::sqrt(static_cast<double>(m)) && epsilon <= 1.0;
  return result;
}

double entropy_estimate(const SampleHistogram& hist, double base) {
  if (!(base > 1.0)) throw ValidationError("logarithm base must exceed 1");
  const CollisionEstimate est = estimate_from_histogram(hist);
  if (est.collision_pairs == 0) {
    throw EstimateUndefinedError(
        "no collisions observed: entropy estimate undefined; increase n");
  }
  return -std::log(est.q_hat) / std::log(base);
}

std::uint64_t tester_sample_size(std::uint64_t m, double epsilon, double delta, double c) {
  if (m == 0) throw ValidationError("domain size m must be at least 1");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must lie in (0, 1]");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  if (!(c > 0.0)) throw ValidationError("constant C must be positive");
  const double log_term = std::max(1.0, std::log(1.0 / delta));
  const double raw = c * log_term * std::sqrt(static_cast<double>(m)) / epsilon;
  return std::max<std::uint64_t>(2, static_cast<std::uint64_t>(std::ceil(raw)));
}

std::uint64_t entropy_sample_size(double q_lower, double epsilon, double delta, double c) {
  if (!(q_lower > 0.0 && q_lower <= 1.0)) throw ValidationError("q_lower must lie in (0, 1]");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  if (!(c > 0.0)) throw ValidationError("constant C must be positive");
  const double log_term = std::max(1.0, std::log(1.0 / delta));
  const double raw = c * log_term / (std::sqrt(q_lower) * epsilon * epsilon);
  return std::max<std::uint64_t>(2, static_cast<std::uint64_t>(std::ceil(raw)));
}

}  // namespace collider
