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

#ifndef COLLIDER_PMF_HPP_
#define COLLIDER_PMF_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace collider {

/// A finite probability mass function over the indexed alphabet
/// {0, 1, ..., m-1}.  Immutable after construction; entries are
/// non-negative and sum to 1 within 1e-12.  Source of truth for the
/// collision probability, power sums and the largest entry.
class DiscretePmf {
 public:
  /// Normalizes a weight vector into a pmf.  Requires at least one
  /// strictly positive weight; all weights finite and >= 0.  Entry order
  /// is preserved.
  static DiscretePmf from_weights(std::span<const double> weights);

  /// The uniform distribution over m >= 1 symbols.
  static DiscretePmf uniform(std::uint64_t m);

  /// Half-up/half-down perturbation of the uniform distribution: the first
  /// m/2 entries are (1+beta)/m and the last m/2 are (1-beta)/m with
  /// beta = sqrt(alpha).  Realizes collision probability (1+alpha)/m and
  /// squared L2 distance alpha/m from uniform, both in closed form.
  /// Requires m even and 0 <= alpha <= 1.
  static DiscretePmf planted_bias(std::uint64_t m, double alpha);

  /// Power-law pmf with entries proportional to k^(-s), k = 1..m.
  /// s = 0 gives the uniform distribution.
  static DiscretePmf zipf(std::uint64_t m, double s);

  std::size_t size() const { return probs_.size(); }
  std::span<const double> probs() const { return probs_; }
  double prob(std::size_t index) const { return probs_[index]; }
  double max_prob() const { return max_prob_; }

 private:
  explicit DiscretePmf(std::vector<double> probs);

  std::vector<double> probs_;
  double max_prob_ = 0.0;
};

/// Collision probability Q = sum of squared entries.  Always in [1/m, 1],
/// with the minimum attained exactly by the uniform distribution.
double collision_probability(const DiscretePmf& pmf);

/// k-th power sum of the entries, k >= 1, with compensated summation
/// (alphabets can exceed 1e7 entries and cubed probabilities are tiny).
double power_sum(const DiscretePmf& pmf, unsigned k);

namespace detail {

/// Neumaier-compensated sum of arbitrary terms.
class CompensatedSum {
 public:
  void add(double term) {
    const double t = sum_ + term;
    if (std::abs(sum_) >= std::abs(term)) {
      compensation_ += (sum_ - t) + term;
    } else {
      compensation_ += (term - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace detail
}  // namespace collider

#endif  // COLLIDER_PMF_HPP_
