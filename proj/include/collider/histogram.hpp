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

#ifndef COLLIDER_HISTOGRAM_HPP_
#define COLLIDER_HISTOGRAM_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace collider {

/// Bin counts of an i.i.d. sample: counts[x] is the number of draws equal
/// to symbol x.  Immutable; the total must be at least 2 (the collision
/// estimator divides by n(n-1)).
class SampleHistogram {
 public:
  explicit SampleHistogram(std::vector<std::uint64_t> counts);

  std::span<const std::uint64_t> counts() const { return counts_; }
  std::uint64_t count(std::size_t symbol) const { return counts_[symbol]; }
  std::size_t size() const { return counts_.size(); }
  std::uint64_t total() const { return total_; }

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

}  // namespace collider

#endif  // COLLIDER_HISTOGRAM_HPP_
