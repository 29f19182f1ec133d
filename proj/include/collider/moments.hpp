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

#ifndef COLLIDER_MOMENTS_HPP_
#define COLLIDER_MOMENTS_HPP_

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace collider {

using BigInt = boost::multiprecision::cpp_int;

/// Even absolute moments E|Z|^d of some centered random variable, indexed
/// by d.  meta describes the underlying variable (construction tag, n, p).
struct MomentTable {
  std::map<unsigned, double> entries;
  std::string meta;
};

/// Parameters of the auxiliary function g(l) = a^l * l^(b-l), a, b > 0.
struct AuxFunctionParams {
  double a = 1.0;
  double b = 1.0;
};

/// Committed constants for bin_moment_bound, fitted once over the grid
/// n <= 100, np in [0.01, 50], d in {2,...,12} (minimal common constant
/// measured at 1.981) and rounded up.
inline constexpr double kDefaultBinMomentC1 = 2.5;
inline constexpr double kDefaultBinMomentC2 = 2.5;

/// Exact Binomial(n, p) pmf over {0..n}.  Mode-anchored multiplicative
/// recurrence evaluated in extended precision; sums to 1 within 1e-12.
std::vector<double> binomial_pmf(std::uint64_t n, double p);

/// Exact E(S - S')^d for independent S, S' ~ Binomial(n, p) and even d,
/// via convolution of the pmf with its reflection over support -n..n.
double symm_diff_moment_exact(std::uint64_t n, double p, unsigned d);

/// Upper bound (C*d)^(d/2) * sum_{l=1}^{d/2} binom(n,l) l^(d/2) sigma^(2l)
/// with sigma^2 = 2p(1-p), computed in log space.  Dominates the exact
/// moment with C = 1 on the verification grid.
double symm_diff_moment_bound(std::uint64_t n, double p, unsigned d, double c = 1.0);

/// Exact E(r_1 + ... + r_l)^d for i.i.d. signs r_i = +-1 w.p. 1/2 and even
/// d; integer-valued.  Supported range l <= 64, d <= 32.
BigInt rademacher_moment_exact(unsigned l, unsigned d);

/// Sum of multinomial coefficients binom(d; c_1..c_l) over compositions of
/// d into exactly l even positive parts.  Returns 0 when l > d/2.
BigInt even_multinomial_sum(unsigned l, unsigned d);

/// Main branch of the Lambert W function on [-1/e, +inf):
/// W(x) exp(W(x)) = x to 1e-12 relative accuracy.  Halley iteration from a
/// log-based initial guess (branch-point series near -1/e).
double lambert_w(double x);

/// g(l) = a^l * l^(b-l), evaluated in log space.
double aux_g(double l, AuxFunctionParams params);

/// argmax of g over (0, inf): b / W(b*e/a).
double aux_g_argmax(AuxFunctionParams params);

/// Closed-form bound sup{g(l) : 1 <= l <= b} <= a * max(a, b)^(b-1).
/// Requires b >= 1.
double aux_g_sup_bound(AuxFunctionParams params);

/// Exact d-th central absolute moment of the bin contribution S^2 - S,
/// S ~ Binomial(n, p): sum_s pmf(s) |s^2 - s - n(n-1)p^2|^d.
double bin_moment_exact(std::uint64_t n, double p, unsigned d);

/// Two-term upper bound
/// (C1 d)^d (np)^2 max(d, np)^(d-2) + (C2 d)^(d/2) (np)^(d+1) max(d, np)^(d/2-1)
/// computed in log space.
double bin_moment_bound(std::uint64_t n, double p, unsigned d,
                        double c1 = kDefaultBinMomentC1, double c2 = kDefaultBinMomentC2);

/// Solves for the infimum T with sum_x E phi(W_x / T) <= d, where
/// phi(u) = ((1+u)^d + (1-u)^d)/2 - 1 and sum_moment(k) supplies
/// sum_x E W_x^k for even k in 2..d.  The condition is monotone in T, so
/// bisection is used; the bracket [bracket_lo, bracket_hi] is expanded by
/// doubling (up to 60 times) until it straddles the root.
double latala_t(const std::function<double(unsigned)>& sum_moment, unsigned d,
                double bracket_lo = 0x1p-52, double bracket_hi = 1.0);

/// Exact-enumeration check of the decoupling inequality for the diagonal-
/// free quadratic form of centered Bernoulli(p) coordinates:
/// E|sum_{i!=j} xi_i xi_j|^d <= E|4 sum_{i!=j} xi_i xi'_j|^d.
/// Enumerates all 2^n * 2^n outcomes; n <= 4, even d <= 6.
bool decoupling_check(unsigned n, double p, unsigned d);

/// Exact-enumeration check of the symmetrization inequality
/// E|sum_i xi_i|^d <= E|sum_i eta_i|^d with eta_i the difference of two
/// independent Bernoulli(p) draws.  n <= 4, even d <= 6.
bool symmetrization_check(unsigned n, double p, unsigned d);

}  // namespace collider

#endif  // COLLIDER_MOMENTS_HPP_
