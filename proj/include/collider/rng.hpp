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

#ifndef COLLIDER_RNG_HPP_
#define COLLIDER_RNG_HPP_

#include <array>
#include <cstdint>

namespace collider {

/// Identifies one reproducible random stream.  Identical (master_seed,
/// stream_id) pairs always produce identical draw sequences, so parallel
/// trials seeded as (master, trial_index) are reproducible independent of
/// how they are scheduled.
struct SampleSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

namespace detail {

// SplitMix64 finalizer (Stafford mix13).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// SplitMix64 stream; used to derive and expand seed material.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return detail::mix64(state_);
  }

 private:
  std::uint64_t state_;
};

/// xoshiro256++ with splittable seeding: the (master_seed, stream_id) pair
/// is hashed into the initial state, so distinct stream ids give
/// statistically independent streams of the same master seed.  All draw
/// paths (uniform doubles, bounded integers) are implemented here rather
/// than via <random> distributions, which keeps sequences bit-stable
/// across standard libraries.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(SampleSeed seed) {
    SplitMix64 master(seed.master_seed);
    const std::uint64_t lane =
        master.next() ^ detail::mix64(seed.stream_id + 0x9E3779B97F4A7C15ULL);
    SplitMix64 expand(lane);
    for (auto& word : state_) word = expand.next();
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) {
      state_[0] = 0x9E3779B97F4A7C15ULL;  // xoshiro state must not be all zero
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = detail::rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Unbiased uniform integer in [0, bound) (Lemire's method).
  std::uint64_t next_below(std::uint64_t bound) {
    for (;;) {
      const std::uint64_t x = next();
      const unsigned __int128 wide = static_cast<unsigned __int128>(x) * bound;
      const std::uint64_t low = static_cast<std::uint64_t>(wide);
      if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        if (low < threshold) continue;
      }
      return static_cast<std::uint64_t>(wide >> 64);
    }
  }

 private:
  std::array<std::uint64_t, 4> state_;
};

}  // namespace collider

#endif  // COLLIDER_RNG_HPP_
