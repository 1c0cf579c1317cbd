#pragma once

// Sieve density omega(d) for the shifted-prime divisibility condition
// (p1+2)(p2+2) = 0 mod d, with the exact-rational closed forms at primes
// and the scans that bound the sieve dimension constants.

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <string>
#include <vector>

#include "gblab/common.hpp"
#include "gblab/quadrature.hpp"
#include "gblab/sieve.hpp"
#include "gblab/singular.hpp"

namespace gblab::omega {

using rational = boost::multiprecision::cpp_rational;
using bigint = boost::multiprecision::cpp_int;

namespace detail {

// Local Euler factors as exact rationals.
inline rational square_deficit(u64 p) {
  const bigint m = bigint(p) - 1;
  return rational(m * m - 1, m * m);
}
inline rational cubic_excess(u64 p) {
  const bigint m = bigint(p) - 1;
  return rational(m * m * m + 1, m * m * m);
}
inline rational ramified(u64 p) { return rational(p, p - 1); }

inline std::vector<u64> squarefree_odd_primes(u64 d, const char* who) {
  if (d == 0 || d % 2 == 0) {
    reject(std::string(who) + ": d must be odd and positive (got " +
           std::to_string(d) + ")");
  }
  std::vector<u64> ps;
  for (const auto& [p, e] : factorize(d).factors) {
    if (e > 1) {
      reject(std::string(who) + ": d must be squarefree (got " +
             std::to_string(d) + ")");
    }
    ps.push_back(p);
  }
  return ps;
}

}  // namespace detail

/// Density omega(d) for squarefree odd d: the divisor double-sum
///   d * sum_{t|d} sum_{s|d/t} mu(s)/(phi(st) phi(d/t)) * (local factors),
/// where per prime p | d the factors are
///   (1 - 1/(p-1)^2)      if p does not divide n+2 and p | st xor p | d/t,
///   (1 - 1/(p-1)^2)^-1   if p | n,
///   (1 + 1/(p-1)^3)^-1   if p does not divide n,
///   (1 + 1/(p-1))        if (p | n+2 and p | st xor p | d/t)
///                        or (p does not divide n+4 and p | s).
/// Evaluated in exact rational arithmetic; multiplicative in d.
inline rational omega_d(u64 d, u64 n) {
  const std::vector<u64> ps = detail::squarefree_odd_primes(d, "omega_d");
  const int nu = static_cast<int>(ps.size());

  // Every divisor pair (t, s | d/t) is one assignment of each prime to
  // "in t" (0), "in s" (1), or "in d/t only" (2).
  std::vector<int> state(static_cast<size_t>(nu), 0);
  rational total = 0;
  while (true) {
    int mu_sign = 1;
    rational term = 1;
    for (int i = 0; i < nu; ++i) {
      const u64 p = ps[i];
      const bool in_t = state[static_cast<size_t>(i)] == 0;
      const bool in_s = state[static_cast<size_t>(i)] == 1;
      const bool in_st = in_t || in_s;
      const bool in_dt = !in_t;  // s | d/t, so states 1 and 2 lie in d/t
      if (in_s) mu_sign = -mu_sign;
      if (in_st) term /= p - 1;  // phi(st)
      if (in_dt) term /= p - 1;  // phi(d/t)
      const bool div_n = n % p == 0;
      const bool div_n2 = (n + 2) % p == 0;
      const bool div_n4 = (n + 4) % p == 0;
      if (!div_n2 && (in_st != in_dt)) term *= detail::square_deficit(p);
      if (div_n) {
        term /= detail::square_deficit(p);
      } else {
        term /= detail::cubic_excess(p);
      }
      if ((div_n2 && (in_st != in_dt)) || (!div_n4 && in_st && in_dt)) {
        term *= detail::ramified(p);
      }
    }
    total += mu_sign * term;
    int i = 0;
    while (i < nu && state[static_cast<size_t>(i)] == 2) {
      state[static_cast<size_t>(i)] = 0;
      ++i;
    }
    if (i == nu) break;
    ++state[static_cast<size_t>(i)];
  }
  return rational(d) * total;
}

/// Closed form of omega_d at an odd prime, split by which of n, n+2, n+4
/// the prime divides (at most one can, and for l = 3 exactly one does).
inline rational omega_prime_case(u64 ell, u64 n) {
  if (ell < 3 || ell % 2 == 0 || !is_prime_u64(ell)) {
    reject("omega_prime_case: l must be an odd prime (got " +
           std::to_string(ell) + ")");
  }
  const bigint l = ell;
  const bigint lm1 = l - 1;
  const bigint cube1 = lm1 * lm1 * lm1 + 1;
  if (n % ell == 0) {
    return rational(l * (2 * l - 5), lm1 * (l - 2));
  }
  if ((n + 2) % ell == 0) {
    return rational(l * l * (2 * l - 3), cube1);
  }
  if ((n + 4) % ell == 0) {
    return rational(l * (2 * lm1 * lm1 - 1 - l), cube1);
  }
  return rational(l * (2 * lm1 * lm1 - 2 - l), cube1);
}

/// Sieve normalizer xi = H(X1,X2,Y,n)
///   * prod_{p|n} (1 - 1/(p-1)^2) * prod_{p !| n, p <= pmax} (1 + 1/(p-1)^3),
/// i.e. the density integral times the unrestricted two-progression constant,
/// so that the sifted sequence's element count is approximated by
/// (omega(d)/d) * xi uniformly in d (at d = 1 this is just the count itself).
inline double xi(double X1, double X2, double Y, u64 n,
                 u64 pmax = kDefaultPrimeCutoff) {
  if (n == 0) reject("xi: n must be >= 1");
  if (pmax < 3) reject("xi: P_max must be >= 3");
  double v = quadrature::h_integral(X1, X2, Y, static_cast<double>(n));
  v *= std::exp(gblab::detail::cubic_log_product(pmax));
  for (const auto& [p, e] : factorize(n).factors) {
    (void)e;
    if (p <= pmax) v /= gblab::detail::cubic_factor(p);
    v *= gblab::detail::square_deficit_factor(p);
  }
  return v;
}

/// Result of the per-prime density-ratio scan: a1 is the largest value of
/// 1/(1 - omega(l)/l) over odd primes l <= ell_max, attained at witness_ell.
struct DensityRatioScan {
  double a1 = 1.0;
  u64 witness_ell = 0;
};

/// Scans 1/(1 - omega(l)/l) over odd primes l <= ell_max, checking
/// 0 <= omega(l) < l exactly along the way.  Requires 3 to not divide
/// n+2 (otherwise omega(3) = 3 and the ratio diverges).
inline DensityRatioScan density_ratio_scan(u64 n, u64 ell_max = 10000) {
  if (n % 3 == 1) {
    reject("density_ratio_scan: n = 1 mod 3 puts omega(3) = 3 and the "
           "ratio 1/(1 - omega/3) diverges");
  }
  auto primes = gblab::detail::base_primes(ell_max);
  DensityRatioScan out;
  for (u32 p : *primes) {
    if (p < 3 || p > ell_max) continue;
    const rational w = omega_prime_case(p, n);
    if (w < 0 || w >= rational(p)) {
      reject("density_ratio_scan: omega(" + std::to_string(p) +
             ") escapes [0, p)");
    }
    const double ratio = (rational(p) / (rational(p) - w)).convert_to<double>();
    if (ratio > out.a1) {
      out.a1 = ratio;
      out.witness_ell = p;
    }
  }
  return out;
}

/// Result of the log-weighted density scan: a2 is the smallest constant with
///   sum_{v <= p <= w} omega(p)/p * log p <= 2 log(w/v) + a2
/// over every real 2 <= v <= w <= limit, attained at the recorded primes.
struct LogDensityScan {
  double a2 = 0.0;
  u64 witness_v = 0;
  u64 witness_w = 0;
};

/// Single ascending pass over odd primes (every sieve modulus is odd, so
/// p = 2 carries no omega weight).  The surplus sum - 2 log(w/v) is largest
/// at prime endpoints, so tracking a running minimum of the v-side term
/// covers the whole real grid.
inline LogDensityScan log_density_scan(u64 n, u64 limit = 1000000) {
  if (n % 3 == 1) {
    reject("log_density_scan: n = 1 mod 3 puts omega(3) = 3; scan expects "
           "the nondegenerate density");
  }
  auto primes = gblab::detail::base_primes(limit);
  LogDensityScan out;
  double sum = 0.0;  // running sum of omega(p)/p * log p over odd primes <= p
  double min_g = 0.0;
  u64 min_g_prime = 0;
  bool have_g = false;
  for (u32 p : *primes) {
    if (p < 3 || p > limit) continue;
    const double logp = std::log(static_cast<double>(p));
    const double g = sum - 2.0 * logp;  // v-candidate: sum excludes p itself
    if (!have_g || g < min_g) {
      min_g = g;
      min_g_prime = p;
      have_g = true;
    }
    const double w = omega_prime_case(p, n).convert_to<double>();
    sum += w / static_cast<double>(p) * logp;
    const double surplus = (sum - 2.0 * logp) - min_g;
    if (surplus > out.a2) {
      out.a2 = surplus;
      out.witness_v = min_g_prime;
      out.witness_w = p;
    }
  }
  return out;
}

}  // namespace gblab::omega
