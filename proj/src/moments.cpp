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

#include "collider/moments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "collider/errors.hpp"

namespace collider {
namespace {

void require_even_d(unsigned d) {
  if (d < 2 || d % 2 != 0) throw ValidationError("moment order d must be even and >= 2");
}

void require_prob(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p must lie in [0, 1]");
}

long double log_choose(std::uint64_t n, std::uint64_t k) {
  return lgammal(static_cast<long double>(n) + 1.0L) -
         lgammal(static_cast<long double>(k) + 1.0L) -
         lgammal(static_cast<long double>(n - k) + 1.0L);
}

// x^d for small integer d, evaluated by repeated multiplication.
long double pow_int(long double x, unsigned d) {
  long double out = 1.0L;
  for (unsigned i = 0; i < d; ++i) out *= x;
  return out;
}

BigInt big_choose(unsigned n, unsigned k) {
  if (k > n) return 0;
  BigInt out = 1;
  for (unsigned i = 0; i < k; ++i) {
    out *= n - i;
    out /= i + 1;
  }
  return out;
}

// Enumeration support for the decoupling/symmetrization checks: weights
// and centered values of all 2^n Bernoulli(p) outcome vectors.
struct BernoulliOutcomes {
  std::vector<long double> weight;
  std::vector<std::array<double, 4>> xi;
  std::vector<int> ones;
  unsigned n;

  BernoulliOutcomes(unsigned n_, double p) : n(n_) {
    const std::size_t total = std::size_t{1} << n;
    weight.resize(total);
    xi.resize(total);
    ones.resize(total);
    for (std::size_t mask = 0; mask < total; ++mask) {
      long double w = 1.0L;
      int pop = 0;
      for (unsigned i = 0; i < n; ++i) {
        const bool bit = (mask >> i) & 1;
        w *= bit ? static_cast<long double>(p) : static_cast<long double>(1.0 - p);
        xi[mask][i] = (bit ? 1.0 : 0.0) - p;
        pop += bit;
      }
      weight[mask] = w;
      ones[mask] = pop;
    }
  }
};

void require_enumeration_range(unsigned n, double p, unsigned d) {
  if (n < 1 || n > 4) throw ValidationError("exact enumeration supports 1 <= n <= 4");
  require_prob(p);
  require_even_d(d);
  if (d > 6) throw ValidationError("exact enumeration supports d <= 6");
}

}  // namespace

std::vector<double> binomial_pmf(std::uint64_t n, double p) {
  require_prob(p);
  if (n >= (std::uint64_t{1} << 31)) throw ValidationError("binomial pmf limited to n < 2^31");
  std::vector<double> pmf(n + 1, 0.0);
  if (p == 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (p == 1.0) {
    pmf[n] = 1.0;
    return pmf;
  }
  // Multiplicative recurrence anchored at the mode, then normalized; this
  // stays in range for any n without log-space gymnastics.
  std::vector<long double> work(n + 1, 0.0L);
  const long double pl = p;
  const long double ql = 1.0L - pl;
  const auto mode = static_cast<std::uint64_t>(
      std::min<long double>(static_cast<long double>(n), floorl((n + 1) * pl)));
  work[mode] = 1.0L;
  for (std::uint64_t k = mode; k < n; ++k) {
    const long double ratio = (static_cast<long double>(n - k) / (k + 1)) * (pl / ql);
    work[k + 1] = work[k] * ratio;
  }
  for (std::uint64_t k = mode; k > 0; --k) {
    const long double ratio = (static_cast<long double>(k) / (n - k + 1)) * (ql / pl);
    work[k - 1] = work[k] * ratio;
  }
  long double total = 0.0L;
  for (const long double v : work) total += v;
  for (std::uint64_t k = 0; k <= n; ++k) pmf[k] = static_cast<double>(work[k] / total);
  return pmf;
}

double symm_diff_moment_exact(std::uint64_t n, double p, unsigned d) {
  require_even_d(d);
  if (n == 0) throw ValidationError("binomial moment needs n >= 1");
  const std::vector<double> pmf = binomial_pmf(n, p);
  // S - S' is symmetric; fold the convolution over positive lags.
  long double moment = 0.0L;
  for (std::uint64_t lag = 1; lag <= n; ++lag) {
    long double pr = 0.0L;
    for (std::uint64_t s = lag; s <= n; ++s) {
      pr += static_cast<long double>(pmf[s]) * static_cast<long double>(pmf[s - lag]);
    }
    moment += 2.0L * pr * pow_int(static_cast<long double>(lag), d);
  }
  return static_cast<double>(moment);
}

double symm_diff_moment_bound(std::uint64_t n, double p, unsigned d, double c) {
  require_even_d(d);
  require_prob(p);
  if (n == 0) throw ValidationError("binomial moment bound needs n >= 1");
  if (!(c > 0.0)) throw ValidationError("constant C must be positive");
  const double sigma2 = 2.0 * p * (1.0 - p);
  if (sigma2 == 0.0) return 0.0;
  const unsigned half = d / 2;
  // Log-space sum with max-term factoring; the terms span many decades.
  std::vector<long double> log_terms;
  log_terms.reserve(half);
  for (unsigned l = 1; l <= half && l <= n; ++l) {
    const long double lt = log_choose(n, l) +
                           (static_cast<long double>(d) / 2.0L) * logl(static_cast<long double>(l)) +
                           static_cast<long double>(l) * logl(static_cast<long double>(sigma2));
    log_terms.push_back(lt);
  }
  const long double peak = *std::max_element(log_terms.begin(), log_terms.end());
  long double rest = 0.0L;
  for (const long double lt : log_terms) rest += expl(lt - peak);
  const long double log_bound =
      (static_cast<long double>(d) / 2.0L) * logl(static_cast<long double>(c) * d) + peak + logl(rest);
  return static_cast<double>(expl(log_bound));
}

BigInt rademacher_moment_exact(unsigned l, unsigned d) {
  require_even_d(d);
  if (l < 1 || l > 64 || d > 32) {
    throw ValidationError("exact sign-sum moment supports 1 <= l <= 64, even d <= 32");
  }
  // The partial sum takes value l - 2k with weight binom(l, k); the
  // normalization 2^l divides the numerator exactly because the moment
  // counts index tuples with all-even multiplicities.
  BigInt numerator = 0;
  for (unsigned k = 0; k <= l; ++k) {
    const long long value = static_cast<long long>(l) - 2LL * k;
    BigInt term = big_choose(l, k);
    BigInt power = 1;
    for (unsigned i = 0; i < d; ++i) power *= value < 0 ? -value : value;
    numerator += term * power;
  }
  const BigInt denom = BigInt(1) << l;
  if (numerator % denom != 0) throw std::logic_error("sign-sum moment was not an integer");
  return numerator / denom;
}

BigInt even_multinomial_sum(unsigned l, unsigned d) {
  require_even_d(d);
  if (l < 1) throw ValidationError("number of parts l must be >= 1");
  if (l > d / 2) return 0;
  // table[j][r]: ordered compositions of r into j even parts >= 2, each
  // weighted by its multinomial coefficient.
  std::vector<std::vector<BigInt>> table(l + 1, std::vector<BigInt>(d + 1, 0));
  for (unsigned r = 2; r <= d; r += 2) table[1][r] = 1;
  for (unsigned j = 2; j <= l; ++j) {
    for (unsigned r = 2 * j; r <= d; r += 2) {
      BigInt acc = 0;
      for (unsigned c = 2; c + 2 * (j - 1) <= r; c += 2) {
        acc += big_choose(r, c) * table[j - 1][r - c];
      }
      table[j][r] = acc;
    }
  }
  return table[l][d];
}

double lambert_w(double x) {
  if (!std::isfinite(x)) throw DomainError("lambert_w needs a finite argument");
  const long double inv_e = expl(-1.0L);
  long double xl = x;
  if (xl < -inv_e) {
    // Inputs that round just below the branch point are clamped onto it.
    if (xl < -inv_e * (1.0L + 1e-12L)) throw DomainError("lambert_w domain is x >= -1/e");
    xl = -inv_e;
  }
  if (xl == -inv_e) return -1.0;
  long double w;
  if (xl < -0.25L) {
    // Series around the branch point in q = sqrt(2(e x + 1)).
    const long double q = sqrtl(2.0L * (expl(1.0L) * xl + 1.0L));
    w = -1.0L + q - q * q / 3.0L + 11.0L * q * q * q / 72.0L;
  } else if (xl < 4.0L) {
    w = log1pl(xl);
  } else {
    const long double lx = logl(xl);
    const long double llx = logl(lx);
    w = lx - llx + llx / lx;
  }
  for (int iter = 0; iter < 100; ++iter) {
    const long double ew = expl(w);
    const long double f = w * ew - xl;
    const long double wp1 = w + 1.0L;
    const long double denom = ew * wp1 - f * (w + 2.0L) / (2.0L * wp1);
    if (denom == 0.0L) break;
    const long double step = f / denom;
    w -= step;
    if (fabsl(step) <= 1e-14L * (fabsl(w) + 1e-30L)) break;
  }
  return static_cast<double>(w);
}

double aux_g(double l, AuxFunctionParams params) {
  if (!(params.a > 0.0 && params.b > 0.0)) throw ValidationError("aux function needs a, b > 0");
  if (!(l > 0.0)) throw ValidationError("aux function argument l must be positive");
  return std::exp(l * std::log(params.a) + (params.b - l) * std::log(l));
}

double aux_g_argmax(AuxFunctionParams params) {
  if (!(params.a > 0.0 && params.b > 0.0)) throw ValidationError("aux function needs a, b > 0");
  const double arg = params.b * std::exp(1.0) / params.a;
  return params.b / lambert_w(arg);
}

double aux_g_sup_bound(AuxFunctionParams params) {
  if (!(params.a > 0.0 && params.b > 0.0)) throw ValidationError("aux function needs a, b > 0");
  if (params.b < 1.0) throw ValidationError("supremum bound needs b >= 1");
  return std::exp(std::log(params.a) + (params.b - 1.0) * std::log(std::max(params.a, params.b)));
}

double bin_moment_exact(std::uint64_t n, double p, unsigned d) {
  require_even_d(d);
  require_prob(p);
  if (n == 0) throw ValidationError("bin moment needs n >= 1");
  const std::vector<double> pmf = binomial_pmf(n, p);
  const long double mean = static_cast<long double>(n) * (static_cast<long double>(n) - 1.0L) *
                           static_cast<long double>(p) * static_cast<long double>(p);
  long double moment = 0.0L;
  for (std::uint64_t s = 0; s <= n; ++s) {
    const long double value = static_cast<long double>(s) * (static_cast<long double>(s) - 1.0L);
    moment += static_cast<long double>(pmf[s]) * pow_int(fabsl(value - mean), d);
  }
  return static_cast<double>(moment);
}

double bin_moment_bound(std::uint64_t n, double p, unsigned d, double c1, double c2) {
  require_even_d(d);
  require_prob(p);
  if (n == 0) throw ValidationError("bin moment bound needs n >= 1");
  if (!(c1 > 0.0 && c2 > 0.0)) throw ValidationError("constants C1, C2 must be positive");
  const long double np = static_cast<long double>(n) * static_cast<long double>(p);
  if (np == 0.0L) return 0.0;
  const long double dl = static_cast<long double>(d);
  const long double peak = std::max(dl, np);
  const long double t1 =
      dl * logl(c1 * dl) + 2.0L * logl(np) + (dl - 2.0L) * logl(peak);
  const long double t2 = (dl / 2.0L) * logl(c2 * dl) + (dl + 1.0L) * logl(np) +
                         (dl / 2.0L - 1.0L) * logl(peak);
  return static_cast<double>(expl(t1) + expl(t2));
}

double latala_t(const std::function<double(unsigned)>& sum_moment, unsigned d,
                double bracket_lo, double bracket_hi) {
  require_even_d(d);
  if (!(bracket_lo > 0.0) || !(bracket_hi > bracket_lo)) {
    throw ValidationError("bracket must satisfy 0 < lo < hi");
  }
  std::vector<long double> coeff;  // binom(d, k) * M_k for even k
  std::vector<unsigned> orders;
  bool any_positive = false;
  for (unsigned k = 2; k <= d; k += 2) {
    const double mk = sum_moment(k);
    if (!std::isfinite(mk) || mk < 0.0) {
      throw ValidationError("moment provider must return finite values >= 0 for even k");
    }
    if (mk > 0.0) any_positive = true;
    long double binom = 1.0L;
    for (unsigned i = 0; i < k; ++i) binom = binom * (d - i) / (i + 1);
    coeff.push_back(binom * static_cast<long double>(mk));
    orders.push_back(k);
  }
  if (!any_positive) return 0.0;  // all components vanish

  const auto excess = [&](long double t) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < coeff.size(); ++i) {
      acc += coeff[i] / pow_int(t, orders[i]);
    }
    return acc - static_cast<long double>(d);
  };

  long double lo = bracket_lo;
  long double hi = bracket_hi;
  int expansions = 0;
  while (excess(hi) > 0.0L && expansions < 60) {
    hi *= 2.0L;
    ++expansions;
  }
  if (excess(hi) > 0.0L) throw BracketError("bracket expansion exhausted (upper end)");
  expansions = 0;
  while (excess(lo) <= 0.0L && expansions < 60) {
    lo /= 2.0L;
    ++expansions;
  }
  if (excess(lo) <= 0.0L) throw BracketError("bracket expansion exhausted (lower end)");

  for (int iter = 0; iter < 400 && (hi - lo) > 1e-11L * hi; ++iter) {
    const long double mid = 0.5L * (lo + hi);
    if (excess(mid) > 0.0L) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return static_cast<double>(0.5L * (lo + hi));
}

bool decoupling_check(unsigned n, double p, unsigned d) {
  require_enumeration_range(n, p, d);
  const BernoulliOutcomes outcomes(n, p);
  const std::size_t total = outcomes.weight.size();

  long double lhs = 0.0L;
  for (std::size_t mask = 0; mask < total; ++mask) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (unsigned i = 0; i < n; ++i) {
      sum += outcomes.xi[mask][i];
      sum_sq += outcomes.xi[mask][i] * outcomes.xi[mask][i];
    }
    const double quad = sum * sum - sum_sq;
    lhs += outcomes.weight[mask] * pow_int(fabsl(quad), d);
  }

  long double rhs = 0.0L;
  for (std::size_t a = 0; a < total; ++a) {
    for (std::size_t b = 0; b < total; ++b) {
      double sum_a = 0.0;
      double sum_b = 0.0;
      double dot = 0.0;
      for (unsigned i = 0; i < n; ++i) {
        sum_a += outcomes.xi[a][i];
        sum_b += outcomes.xi[b][i];
        dot += outcomes.xi[a][i] * outcomes.xi[b][i];
      }
      const double bilinear = sum_a * sum_b - dot;
      rhs += outcomes.weight[a] * outcomes.weight[b] * pow_int(fabsl(4.0 * bilinear), d);
    }
  }
  return lhs <= rhs * (1.0L + 1e-12L) + 1e-300L;
}

bool symmetrization_check(unsigned n, double p, unsigned d) {
  require_enumeration_range(n, p, d);
  const BernoulliOutcomes outcomes(n, p);
  const std::size_t total = outcomes.weight.size();

  long double lhs = 0.0L;
  for (std::size_t mask = 0; mask < total; ++mask) {
    const double sum = outcomes.ones[mask] - static_cast<double>(n) * p;
    lhs += outcomes.weight[mask] * pow_int(fabsl(sum), d);
  }

  // sum_i eta_i with eta_i = beta_i - beta'_i equals (#ones in the first
  // vector) - (#ones in the second).
  long double rhs = 0.0L;
  for (std::size_t a = 0; a < total; ++a) {
    for (std::size_t b = 0; b < total; ++b) {
      const long long diff = outcomes.ones[a] - outcomes.ones[b];
      rhs += outcomes.weight[a] * outcomes.weight[b] *
             pow_int(static_cast<long double>(diff < 0 ? -diff : diff), d);
    }
  }
  return lhs <= rhs * (1.0L + 1e-12L) + 1e-300L;
}

}  // namespace collider
