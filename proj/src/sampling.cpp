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

#include "collider/sampling.hpp"

#include <limits>
#include <vector>

#include "collider/errors.hpp"

namespace collider {

AliasTable::AliasTable(std::span<const double> probs) : size_(probs.size()) {
  if (size_ == 0) throw ValidationError("alias table needs a nonempty pmf");
  if (size_ > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("alias table limited to 2^32 - 1 symbols");
  }
  accept_.resize(size_);
  alias_.resize(size_);

  // Vose's construction.  Work queues are filled in index order so the
  // table, and therefore every draw sequence, is deterministic.
  std::vector<double> scaled(size_);
  std::vector<std::uint32_t> small, large;
  small.reserve(size_);
  large.reserve(size_);
  const double md = static_cast<double>(size_);
  for (std::uint32_t i = 0; i < size_; ++i) {
    scaled[i] = probs[i] * md;
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    small.pop_back();
    const std::uint32_t l = large.back();
    accept_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are within rounding of 1; they accept unconditionally.
  for (const std::uint32_t i : large) {
    accept_[i] = 1.0;
    alias_[i] = i;
  }
  for (const std::uint32_t i : small) {
    accept_[i] = 1.0;
    alias_[i] = i;
  }
}

CollisionSampler::CollisionSampler(const DiscretePmf& pmf)
    : table_(pmf.probs()), counts_(pmf.size(), 0) {}

void CollisionSampler::draw_counts(std::uint64_t n, SampleSeed seed) {
  if (n < 2) throw ValidationError("sample size must be at least 2");
  if (n >= (std::uint64_t{1} << 32)) {
    throw ValidationError("sample size limited to 2^32 - 1 draws");
  }
  Xoshiro256pp rng(seed);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t x = table_.draw(rng);
    if (counts_[x]++ == 0) touched_.push_back(static_cast<std::uint32_t>(x));
  }
}

void CollisionSampler::reset_counts() {
  for (const std::uint32_t x : touched_) counts_[x] = 0;
  touched_.clear();
}

SampleHistogram CollisionSampler::sample_histogram(std::uint64_t n, SampleSeed seed) {
  draw_counts(n, seed);
  SampleHistogram hist{std::vector<std::uint64_t>(counts_.begin(), counts_.end())};
  reset_counts();
  return hist;
}

std::uint64_t CollisionSampler::sample_collision_pairs(std::uint64_t n, SampleSeed seed) {
  draw_counts(n, seed);
  std::uint64_t pairs = 0;
  for (const std::uint32_t x : touched_) pairs += counts_[x] * (counts_[x] - 1);
  reset_counts();
  return pairs;
}

SampleHistogram sample_histogram(const DiscretePmf& pmf, std::uint64_t n, SampleSeed seed) {
  CollisionSampler sampler(pmf);
  return sampler.sample_histogram(n, seed);
}

}  // namespace collider
