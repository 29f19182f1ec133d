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

#ifndef COLLIDER_TESTS_TEST_SUPPORT_HPP_
#define COLLIDER_TESTS_TEST_SUPPORT_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "collider/pmf.hpp"
#include "collider/rng.hpp"

namespace collider::testing {

// Fixed grid of small pmfs (m <= 3) used by the enumeration checks.
inline std::vector<DiscretePmf> small_pmf_grid() {
  std::vector<DiscretePmf> grid;
  const std::vector<std::vector<double>> weights = {
      {1.0},
      {0.5, 0.5},
      {0.9, 0.1},
      {0.99, 0.01},
      {2.0, 1.0},
      {0.75, 0.25},
      {1.0, 0.0},
      {1.0, 1.0, 1.0},
      {0.5, 0.3, 0.2},
      {0.8, 0.1, 0.1},
      {0.6, 0.3, 0.1},
      {0.45, 0.45, 0.1},
      {0.98, 0.01, 0.01},
      {0.4, 0.35, 0.25},
      {0.7, 0.2, 0.1},
      {0.55, 0.25, 0.2},
      {2.0, 1.0, 1.0},
      {0.34, 0.33, 0.33},
      {0.9, 0.05, 0.05},
      {0.5, 0.5, 0.0},
  };
  grid.reserve(weights.size());
  for (const auto& w : weights) grid.push_back(DiscretePmf::from_weights(w));
  return grid;
}

// Visits every length-n sequence over {0..m-1} together with its
// probability under the pmf.  Probabilities are long double products so
// the enumeration oracles keep full precision.
inline void for_each_sequence(const DiscretePmf& pmf, unsigned n,
                              const std::function<void(const std::vector<unsigned>&, long double)>& fn) {
  const std::size_t m = pmf.size();
  std::vector<unsigned> seq(n, 0);
  for (;;) {
    long double weight = 1.0L;
    for (const unsigned symbol : seq) weight *= static_cast<long double>(pmf.prob(symbol));
    fn(seq, weight);
    std::size_t pos = 0;
    while (pos < n) {
      if (++seq[pos] < m) break;
      seq[pos] = 0;
      ++pos;
    }
    if (pos == n) break;
  }
}

// q_hat of a sequence by direct ordered-pair counting; the independent
// oracle for the enumeration-based expectations.
inline long double pairwise_q_hat(const std::vector<unsigned>& seq) {
  const std::size_t n = seq.size();
  std::uint64_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && seq[i] == seq[j]) ++pairs;
    }
  }
  return static_cast<long double>(pairs) /
         (static_cast<long double>(n) * static_cast<long double>(n - 1));
}

}  // namespace collider::testing

#endif  // COLLIDER_TESTS_TEST_SUPPORT_HPP_
