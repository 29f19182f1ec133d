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

#include "collider/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "collider/errors.hpp"

namespace collider {

double variance_proxy(const DiscretePmf& pmf, std::uint64_t n) {
  if (n < 2) throw ValidationError("variance proxy needs n >= 2");
  const double nd = static_cast<double>(n);
  return collision_probability(pmf) / (nd * nd) + power_sum(pmf, 3) / nd;
}

double scale_param(const DiscretePmf& pmf, std::uint64_t n) {
  if (n < 2) throw ValidationError("scale parameter needs n >= 2");
  return pmf.max_prob() / static_cast<double>(n);
}

double subgamma_tail(double t, SubGammaParams params) {
  if (!(t >= 0.0)) throw ValidationError("tail bound needs t >= 0");
  if (params.v2 < 0.0 || params.b < 0.0) throw ValidationError("sub-gamma parameters must be >= 0");
  if (t == 0.0) return 2.0;
  const double denom = 2.0 * (params.v2 + params.b * t);
  if (denom <= 0.0) {
    throw DomainError("degenerate sub-gamma parameters: v^2 = b = 0 with t > 0");
  }
  return std::clamp(2.0 * std::exp(-(t * t) / denom), 0.0, 2.0);
}

SubGammaParams aggregate_subgamma(std::span<const SubGammaParams> components) {
  if (components.empty()) throw ValidationError("cannot aggregate an empty sequence");
  SubGammaParams out;
  for (const SubGammaParams& c : components) {
    if (c.v2 < 0.0 || c.b < 0.0) throw ValidationError("sub-gamma parameters must be >= 0");
    out.v2 += c.v2;
    out.b = std::max(out.b, c.b);
  }
  return out;
}

double tail_envelope(double epsilon, const DiscretePmf& pmf, std::uint64_t n,
                     const TailEnvelope& env) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (env.c_out <= 0.0 || env.c_sq <= 0.0 || env.c_lin <= 0.0 || env.c_heavy <= 0.0) {
    throw ValidationError("envelope constants must be strictly positive");
  }
  const double v2 = variance_proxy(pmf, n);
  const double b = scale_param(pmf, n);
  // A valid pmf always has v2, b > 0; IEEE division still yields +inf in
  // the degenerate limit, which drives the bound to 0 (the estimator is
  // then deterministic).
  const double branch_sq = env.c_sq * epsilon * epsilon / v2;
  const double branch_lin = env.c_lin * epsilon / b;
  const double branch_heavy = env.c_heavy * static_cast<double>(n) * std::sqrt(epsilon);
  const double exponent = std::min({branch_sq, branch_lin, branch_heavy});
  return std::min(env.c_out * std::exp(-exponent), 1.0);
}

bool moment_subgamma_check(const MomentTable& moments, double v, double b, double c) {
  if (v < 0.0 || b < 0.0 || c <= 0.0) throw ValidationError("v, b must be >= 0 and C > 0");
  for (const auto& [d, value] : moments.entries) {
    if (d % 2 != 0 || d < 2) throw ValidationError("moment table must hold even d >= 2");
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw ValidationError("moment values must be finite and >= 0");
    }
    const double dd = static_cast<double>(d);
    const double norm = std::pow(value, 1.0 / dd);
    if (norm > c * (std::sqrt(dd) * v + dd * b)) return false;
  }
  return true;
}

}  // namespace collider
