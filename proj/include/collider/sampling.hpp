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

#ifndef COLLIDER_SAMPLING_HPP_
#define COLLIDER_SAMPLING_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "collider/histogram.hpp"
#include "collider/pmf.hpp"
#include "collider/rng.hpp"

namespace collider {

/// Walker/Vose alias table: O(m) setup, O(1) per draw.  The tester regime
/// has huge alphabets and n ~ sqrt(m) draws, so per-draw cost dominates.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> probs);

  std::uint64_t draw(Xoshiro256pp& rng) const {
    const std::uint64_t slot = rng.next_below(size_);
    return rng.next_double() < accept_[slot] ? slot : alias_[slot];
  }

  std::uint64_t size() const { return size_; }

 private:
  std::uint64_t size_ = 0;
  std::vector<double> accept_;
  std::vector<std::uint32_t> alias_;
};

/// Repeated-sampling workhorse: owns the alias table plus scratch buffers
/// so that one experiment pays the O(m) setup once and each trial costs
/// O(n).  Draw sequences depend only on the seed, never on the entry point.
class CollisionSampler {
 public:
  explicit CollisionSampler(const DiscretePmf& pmf);

  /// Full histogram of n draws.  n >= 2.
  SampleHistogram sample_histogram(std::uint64_t n, SampleSeed seed);

  /// Number of ordered colliding pairs, sum_x S_x(S_x - 1), of n draws.
  /// Identical to summing the histogram of the same seed; avoids
  /// materializing the counts vector.
  std::uint64_t sample_collision_pairs(std::uint64_t n, SampleSeed seed);

  std::uint64_t alphabet_size() const { return table_.size(); }

 private:
  void draw_counts(std::uint64_t n, SampleSeed seed);
  void reset_counts();

  AliasTable table_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint32_t> touched_;
};

/// One-shot convenience: builds the alias table, draws n times, returns the
/// histogram.  Deterministic given the seed; concurrent calls with distinct
/// stream ids are independent.
SampleHistogram sample_histogram(const DiscretePmf& pmf, std::uint64_t n, SampleSeed seed);

}  // namespace collider

#endif  // COLLIDER_SAMPLING_HPP_
