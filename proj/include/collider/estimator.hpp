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

#ifndef COLLIDER_ESTIMATOR_HPP_
#define COLLIDER_ESTIMATOR_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "collider/histogram.hpp"

namespace collider {

/// The collision estimate: the fraction of ordered sample pairs (i, j),
/// i != j, that landed on the same symbol.
struct CollisionEstimate {
  double q_hat = 0.0;                  // collision_pairs / (n(n-1)), in [0, 1]
  std::uint64_t n = 0;                 // sample size
  std::uint64_t collision_pairs = 0;   // ordered colliding pairs
};

/// Per-symbol share of the collision count: S_x^2 - S_x ordered pairs land
/// on symbol x when its bin holds S_x draws.
struct BinContribution {
  std::size_t symbol = 0;
  std::uint64_t value = 0;  // S_x (S_x - 1)
};

/// The centered bin contribution split into its linear and quadratic parts:
/// lhs = S^2 - S - n(n-1)p^2 equals u2 + 2(n-1)p * u1 exactly, where
/// u1 sums the centered indicators and u2 their off-diagonal products.
struct CenteredDecomposition {
  double lhs = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;
};

/// Outcome of the uniformity test.  epsilon_in_range flags whether epsilon
/// satisfied the tester's stated regime 1/sqrt(m) <= epsilon <= 1; outside
/// of it the test still runs and the caller may warn.
struct UniformityResult {
  bool non_uniform = false;
  double q_hat = 0.0;
  double threshold = 0.0;  // (1 + epsilon) / m
  bool epsilon_in_range = true;
};

/// Default calibrated constants for the O(.) sample-size formulas; fitted
/// once by the Monte Carlo harness and committed here.
inline constexpr double kDefaultTesterC = 2.0;
inline constexpr double kDefaultEntropyC = 4.0;

/// Reference O(n^2) estimator: counts ordered pairs i != j with equal
/// symbols directly.  Exists as an oracle for the histogram path.
CollisionEstimate estimate_pairwise(std::span<const std::uint32_t> sample);

/// Histogram estimator: sum_x S_x(S_x - 1) / (n(n-1)).  The numerator is
/// accumulated in 128-bit integers, so it matches estimate_pairwise
/// exactly on the same sample.  O(support size).
CollisionEstimate estimate_from_histogram(const SampleHistogram& hist);

/// One entry per symbol with a nonzero count; values sum to the ordered
/// collision-pair count.
std::vector<BinContribution> bin_contributions(const SampleHistogram& hist);

/// Evaluates the centering identity for one bin at the realized count.
/// Requires s <= n and 0 <= p <= 1.
CenteredDecomposition centered_decomposition(std::uint64_t s, std::uint64_t n, double p);

/// Threshold test: non-uniform iff q_hat > (1+epsilon)/m.  Exact ties are
/// declared uniform (the threshold comparison is strict).
UniformityResult uniformity_test(const SampleHistogram& hist, std::uint64_t m, double epsilon);

/// Collision entropy estimate -log_base(q_hat).  Throws
/// EstimateUndefinedError when the sample has no collisions (q_hat = 0):
/// the estimate is undefined and the caller should increase n.
double entropy_estimate(const SampleHistogram& hist, double base = 2.0);

/// Sample size for the uniformity tester:
/// ceil(C * max(1, ln(1/delta)) * sqrt(m) / epsilon), floored at 2.
std::uint64_t tester_sample_size(std::uint64_t m, double epsilon, double delta,
                                 double c = kDefaultTesterC);

/// Sample size for relative-error collision estimation:
/// ceil(C * max(1, ln(1/delta)) / (sqrt(q_lower) * epsilon^2)), floored at 2.
std::uint64_t entropy_sample_size(double q_lower, double epsilon, double delta,
                                  double c = kDefaultEntropyC);

}  // namespace collider

#endif  // COLLIDER_ESTIMATOR_HPP_
