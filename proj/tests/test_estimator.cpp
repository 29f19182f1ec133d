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

#include <algorithm>
#include <cmath>
#include <doctest.h>
#include <numeric>
#include <vector>

#include "collider/errors.hpp"
#include "collider/estimator.hpp"
#include "collider/rng.hpp"
#include "test_support.hpp"

using collider::estimate_from_histogram;
using collider::estimate_pairwise;
using collider::EstimateUndefinedError;
using collider::SampleHistogram;
using collider::ValidationError;

namespace {

SampleHistogram histogram_of(std::vector<std::uint64_t> counts) {
  return SampleHistogram(std::move(counts));
}

std::vector<std::uint32_t> sample_to_symbols(const SampleHistogram& hist) {
  std::vector<std::uint32_t> out;
  for (std::size_t x = 0; x < hist.size(); ++x) {
    out.insert(out.end(), hist.count(x), static_cast<std::uint32_t>(x));
  }
  return out;
}

}  // namespace

TEST_CASE("pairwise estimator on tiny samples") {
  CHECK(estimate_pairwise(std::vector<std::uint32_t>{0, 0, 1}).q_hat ==
        doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(estimate_pairwise(std::vector<std::uint32_t>{0, 1, 2, 3}).q_hat == 0.0);
  CHECK(estimate_pairwise(std::vector<std::uint32_t>{5, 5, 5}).q_hat == 1.0);
  CHECK_THROWS_AS(estimate_pairwise(std::vector<std::uint32_t>{0}), ValidationError);
}

TEST_CASE("histogram estimator matches the printed examples") {
  CHECK(estimate_from_histogram(histogram_of({2, 1})).q_hat ==
        doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(estimate_from_histogram(histogram_of({5})).q_hat == 1.0);
  CHECK(estimate_from_histogram(histogram_of(std::vector<std::uint64_t>(100, 1))).q_hat == 0.0);
  CHECK_THROWS_AS(histogram_of({1}), ValidationError);
  CHECK_THROWS_AS(histogram_of({}), ValidationError);
}

TEST_CASE("pairwise and histogram estimators agree exactly on random data") {
  collider::Xoshiro256pp rng(collider::SampleSeed{31337, 0});
  for (int round = 0; round < 200; ++round) {
    const std::uint64_t m = 1 + rng.next_below(40);
    const std::uint64_t n = 2 + rng.next_below(200);
    std::vector<std::uint64_t> counts(m, 0);
    std::vector<std::uint32_t> sample(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto symbol = static_cast<std::uint32_t>(rng.next_below(m));
      sample[i] = symbol;
      ++counts[symbol];
    }
    const auto by_hist = estimate_from_histogram(histogram_of(std::move(counts)));
    const auto by_pairs = estimate_pairwise(sample);
    CHECK(by_hist.collision_pairs == by_pairs.collision_pairs);
    CHECK(by_hist.q_hat == by_pairs.q_hat);
    CHECK(by_hist.q_hat >= 0.0);
    CHECK(by_hist.q_hat <= 1.0);
  }
}

TEST_CASE("q_hat extremes characterize constant and all-distinct samples") {
  CHECK(estimate_from_histogram(histogram_of({7, 0, 0})).q_hat == 1.0);
  CHECK(estimate_from_histogram(histogram_of({1, 1, 1, 1})).q_hat == 0.0);
}

TEST_CASE("unbiasedness by full enumeration on small alphabets") {
  for (const auto& pmf : collider::testing::small_pmf_grid()) {
    const double q = collision_probability(pmf);
    for (unsigned n = 2; n <= 4; ++n) {
      long double expectation = 0.0L;
      collider::testing::for_each_sequence(pmf, n, [&](const auto& seq, long double w) {
        expectation += w * collider::testing::pairwise_q_hat(seq);
      });
      CHECK(std::abs(static_cast<double>(expectation) - q) <= 1e-12);
    }
  }
}

TEST_CASE("bin contributions cover nonzero bins and sum to the pair count") {
  const auto hist = histogram_of({2, 1, 0, 3});
  const auto contributions = collider::bin_contributions(hist);
  REQUIRE(contributions.size() == 3);
  CHECK(contributions[0].symbol == 0);
  CHECK(contributions[0].value == 2);
  CHECK(contributions[1].symbol == 1);
  CHECK(contributions[1].value == 0);
  CHECK(contributions[2].symbol == 3);
  CHECK(contributions[2].value == 6);
  const std::uint64_t total = std::accumulate(
      contributions.begin(), contributions.end(), std::uint64_t{0},
      [](std::uint64_t acc, const collider::BinContribution& c) { return acc + c.value; });
  CHECK(total == estimate_from_histogram(hist).collision_pairs);
}

TEST_CASE("centered decomposition identity") {
  const auto d = collider::centered_decomposition(2, 3, 0.5);
  CHECK(d.lhs == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(d.u1 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(d.u2 == doctest::Approx(-0.5).epsilon(1e-15));

  const auto centered = collider::centered_decomposition(1, 2, 0.5);
  CHECK(centered.u1 == 0.0);
  CHECK(centered.lhs == doctest::Approx(centered.u2).epsilon(1e-15));

  const auto zero = collider::centered_decomposition(0, 5, 0.0);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.u1 == 0.0);
  CHECK(zero.u2 == 0.0);

  CHECK_THROWS_AS(collider::centered_decomposition(6, 5, 0.5), ValidationError);
  CHECK_THROWS_AS(collider::centered_decomposition(1, 5, 1.5), ValidationError);

  // lhs = u2 + 2(n-1) p u1 exactly over the whole grid.
  for (std::uint64_t n = 2; n <= 20; ++n) {
    for (std::uint64_t s = 0; s <= n; ++s) {
      for (int pi = 0; pi <= 10; ++pi) {
        const double p = pi / 10.0;
        const auto dec = collider::centered_decomposition(s, n, p);
        const double rhs = dec.u2 + 2.0 * static_cast<double>(n - 1) * p * dec.u1;
        CHECK(std::abs(dec.lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(dec.lhs)));
      }
    }
  }
}

TEST_CASE("uniformity test thresholds and ties") {
  // q_hat = 48/90 above the threshold (1 + 0.2)/4 = 0.3 -> non_uniform.
  const auto reject = collider::uniformity_test(histogram_of({7, 3, 0, 0}), 4, 0.2);
  CHECK(reject.threshold == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(reject.q_hat == doctest::Approx(48.0 / 90.0).epsilon(1e-15));
  CHECK(reject.non_uniform);

  // Exact tie: counts {2,1,1} give q_hat = 2/12 = 1/6; threshold 1/6 at
  // m = 12, epsilon = 1.
  const auto tie = collider::uniformity_test(histogram_of({2, 1, 1}), 12, 1.0);
  CHECK(tie.q_hat == doctest::Approx(tie.threshold).epsilon(1e-15));
  CHECK_FALSE(tie.non_uniform);

  // Clean accept and reject around the threshold.
  const auto accept = collider::uniformity_test(histogram_of({1, 1, 1, 1}), 4, 0.2);
  CHECK_FALSE(accept.non_uniform);
  const auto strong_reject = collider::uniformity_test(histogram_of({10, 0, 0, 0}), 4, 0.2);
  CHECK(strong_reject.non_uniform);

  CHECK_THROWS_AS(collider::uniformity_test(histogram_of({2, 1}), 0, 0.2), ValidationError);
}

TEST_CASE("uniformity test flags epsilon outside the stated regime") {
  const auto hist = histogram_of({1, 1, 1, 1});
  CHECK(collider::uniformity_test(hist, 4, 0.2).epsilon_in_range == false);  // 0.2 < 1/sqrt(4)
  CHECK(collider::uniformity_test(hist, 4, 0.5).epsilon_in_range == true);
  CHECK(collider::uniformity_test(hist, 4, 1.0).epsilon_in_range == true);
  CHECK(collider::uniformity_test(hist, 4, 1.5).epsilon_in_range == false);
}

TEST_CASE("decision depends on the sample only through q_hat") {
  collider::Xoshiro256pp rng(collider::SampleSeed{777, 0});
  std::vector<std::uint32_t> sample(60);
  for (auto& s : sample) s = static_cast<std::uint32_t>(rng.next_below(6));
  const auto count_of = [&](const std::vector<std::uint32_t>& seq) {
    std::vector<std::uint64_t> counts(6, 0);
    for (const auto s : seq) ++counts[s];
    return histogram_of(std::move(counts));
  };
  const auto base = collider::uniformity_test(count_of(sample), 6, 0.5);
  for (int shuffle = 0; shuffle < 16; ++shuffle) {
    for (std::size_t i = sample.size(); i > 1; --i) {
      std::swap(sample[i - 1], sample[rng.next_below(i)]);
    }
    const auto permuted = collider::uniformity_test(count_of(sample), 6, 0.5);
    CHECK(permuted.non_uniform == base.non_uniform);
    CHECK(permuted.q_hat == base.q_hat);
  }
}

TEST_CASE("entropy estimate") {
  CHECK(collider::entropy_estimate(histogram_of({4}), 2.0) == 0.0);  // q_hat = 1
  const auto hist = histogram_of({2, 2});                            // q_hat = 4/12
  const double q = estimate_from_histogram(hist).q_hat;
  CHECK(collider::entropy_estimate(hist, 2.0) == doctest::Approx(-std::log2(q)).epsilon(1e-15));
  CHECK(collider::entropy_estimate(hist, 10.0) ==
        doctest::Approx(-std::log10(q)).epsilon(1e-15));
  // q_hat = 6/12 = 0.5 -> exactly 1 bit.
  CHECK(collider::entropy_estimate(histogram_of({3, 1}), 2.0) ==
        doctest::Approx(1.0).epsilon(1e-15));
  // q_hat = 18/72 = 0.25 -> exactly 2 bits.
  CHECK(collider::entropy_estimate(histogram_of({4, 3, 1, 1}), 2.0) ==
        doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(collider::entropy_estimate(histogram_of({1, 1, 1}), 2.0),
                  EstimateUndefinedError);
  CHECK_THROWS_AS(collider::entropy_estimate(histogram_of({2, 2}), 1.0), ValidationError);
}

TEST_CASE("tester sample size formula") {
  CHECK(collider::tester_sample_size(10000, 0.5, std::exp(-1.0), 1.0) == 200);
  CHECK(collider::tester_sample_size(1, 1.0, 0.5, 1.0) == 2);
  // Doubling log(1/delta) doubles n (above the clamp).
  CHECK(collider::tester_sample_size(10000, 0.5, std::exp(-2.0), 1.0) == 400);
  CHECK_THROWS_AS(collider::tester_sample_size(0, 0.5, 0.1, 1.0), ValidationError);
  CHECK_THROWS_AS(collider::tester_sample_size(100, 0.0, 0.1, 1.0), ValidationError);
  CHECK_THROWS_AS(collider::tester_sample_size(100, 1.5, 0.1, 1.0), ValidationError);
  CHECK_THROWS_AS(collider::tester_sample_size(100, 0.5, 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(collider::tester_sample_size(100, 0.5, 0.1, 0.0), ValidationError);
}

TEST_CASE("entropy sample size formula") {
  CHECK(collider::entropy_sample_size(0.01, 0.5, std::exp(-1.0), 1.0) == 40);
  // Halving epsilon quadruples n.
  CHECK(collider::entropy_sample_size(0.01, 0.25, std::exp(-1.0), 1.0) == 160);
  CHECK(collider::entropy_sample_size(1.0, 0.999, std::exp(-1.0), 1.0) == 2);
  CHECK_THROWS_AS(collider::entropy_sample_size(0.0, 0.5, 0.1, 1.0), ValidationError);
  CHECK_THROWS_AS(collider::entropy_sample_size(0.5, 1.0, 0.1, 1.0), ValidationError);
  CHECK_THROWS_AS(collider::entropy_sample_size(0.5, 0.5, 0.0, 1.0), ValidationError);
}
