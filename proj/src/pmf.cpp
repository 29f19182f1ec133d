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

#include "collider/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "collider/errors.hpp"

namespace collider {

DiscretePmf::DiscretePmf(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw ValidationError("pmf must have at least one entry");
  detail::CompensatedSum total;
  for (double p : probs_) {
    if (!std::isfinite(p)) throw ValidationError("pmf entry is not finite");
    if (p < 0.0) throw ValidationError("pmf entry is negative");
    max_prob_ = std::max(max_prob_, p);
    total.add(p);
  }
  if (std::abs(total.value() - 1.0) > 1e-12) {
    throw ValidationError("pmf entries sum to " + std::to_string(total.value()) +
                          ", expected 1 within 1e-12");
  }
}

DiscretePmf DiscretePmf::from_weights(std::span<const double> weights) {
  if (weights.empty()) throw ValidationError("weight vector is empty");
  detail::CompensatedSum total;
  for (double w : weights) {
    if (!std::isfinite(w)) throw ValidationError("weight is not finite");
    if (w < 0.0) throw ValidationError("weight is negative");
    total.add(w);
  }
  const double sum = total.value();
  if (sum <= 0.0) throw ValidationError("all weights are zero");
  std::vector<double> probs(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) probs[i] = weights[i] / sum;
  return DiscretePmf(std::move(probs));
}

DiscretePmf DiscretePmf::uniform(std::uint64_t m) {
  if (m == 0) throw ValidationError("uniform pmf needs m >= 1");
  return DiscretePmf(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

DiscretePmf DiscretePmf::planted_bias(std::uint64_t m, double alpha) {
  if (m == 0 || m % 2 != 0) throw ValidationError("planted_bias needs even m >= 2");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("planted_bias needs alpha in [0, 1]");
  const double beta = std::sqrt(alpha);
  const double md = static_cast<double>(m);
  std::vector<double> probs(m);
  for (std::uint64_t i = 0; i < m / 2; ++i) probs[i] = (1.0 + beta) / md;
  for (std::uint64_t i = m / 2; i < m; ++i) probs[i] = (1.0 - beta) / md;
  return DiscretePmf(std::move(probs));
}

DiscretePmf DiscretePmf::zipf(std::uint64_t m, double s) {
  if (m == 0) throw ValidationError("zipf pmf needs m >= 1");
  if (!(s >= 0.0) || !std::isfinite(s)) throw ValidationError("zipf needs finite s >= 0");
  std::vector<double> weights(m);
  for (std::uint64_t k = 0; k < m; ++k) {
    weights[k] = std::pow(static_cast<double>(k + 1), -s);
  }
  return from_weights(weights);
}

double collision_probability(const DiscretePmf& pmf) { return power_sum(pmf, 2); }

double power_sum(const DiscretePmf& pmf, unsigned k) {
  if (k == 0) throw ValidationError("power_sum needs k >= 1");
  detail::CompensatedSum sum;
  for (double p : pmf.probs()) {
    double term = p;
    for (unsigned i = 1; i < k; ++i) term *= p;
    sum.add(term);
  }
  return sum.value();
}

}  // namespace collider
