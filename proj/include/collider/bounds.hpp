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

#ifndef COLLIDER_BOUNDS_HPP_
#define COLLIDER_BOUNDS_HPP_

#include <cstdint>
#include <span>

#include "collider/moments.hpp"
#include "collider/pmf.hpp"

namespace collider {

/// Sub-gamma parameters: variance factor v^2 and scale b.  The currency of
/// every tail bound in this library.
struct SubGammaParams {
  double v2 = 0.0;
  double b = 0.0;
};

/// Explicit constants of the collision-estimator tail envelope
/// min(c_out * exp(-min(c_sq e^2/v^2, c_lin e/b, c_heavy n sqrt(e))), 1).
/// The theory proves the existence of constants, not their values; defaults
/// are calibrated against Monte Carlo data (see the harness).
struct TailEnvelope {
  double c_out = 2.0;
  double c_sq = 0.25;
  double c_lin = 0.25;
  double c_heavy = 0.25;
};

/// Variance factor of the collision estimator: Q/n^2 + P3/n where Q and P3
/// are the second and third power sums of the pmf.
double variance_proxy(const DiscretePmf& pmf, std::uint64_t n);

/// Scale parameter of the collision estimator: max_x p_x / n.
double scale_param(const DiscretePmf& pmf, std::uint64_t n);

/// Sub-gamma tail bound 2 exp(-t^2 / (2(v^2 + b t))), clamped to [0, 2].
/// Requires v^2 + b t > 0 when t > 0.
double subgamma_tail(double t, SubGammaParams params);

/// Sum of independent sub-gamma variables: v^2 adds, b takes the max.
SubGammaParams aggregate_subgamma(std::span<const SubGammaParams> components);

/// Tail envelope of the collision estimator at deviation epsilon, with v^2
/// and b derived from the pmf and sample size.  Clamped to at most 1.
double tail_envelope(double epsilon, const DiscretePmf& pmf, std::uint64_t n,
                     const TailEnvelope& env = {});

/// Moment characterization of the sub-gamma property: true iff
/// (E|Z|^d)^(1/d) <= C (sqrt(d) v + d b) for every even d in the table.
/// Odd d entries are a validation error; an empty table passes vacuously.
bool moment_subgamma_check(const MomentTable& moments, double v, double b, double c);

}  // namespace collider

#endif  // COLLIDER_BOUNDS_HPP_
