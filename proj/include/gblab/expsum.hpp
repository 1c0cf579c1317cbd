#pragma once
// Exponential sums over reduced residue classes.  The *_direct functions are
// literal loops over residues and serve as the reference forms; the series
// code in singular.hpp assembles the same quantities prime-by-prime from the
// cached reduced-residue unit sum.

#include <complex>
#include <map>
#include <mutex>

#include "gblab/common.hpp"
#include "gblab/sieve.hpp"

namespace gblab {

using cplx = std::complex<double>;

/// e(num/den) = exp(2 pi i num/den); the argument is reduced mod den first so
/// equal residues give bit-identical values.
inline cplx e_frac(i64 num, u64 den) {
  const double frac = static_cast<double>(mod_norm(num, den)) / static_cast<double>(den);
  return std::polar(1.0, 2.0 * kPi * frac);
}

/// c_s(k) = sum over reduced b mod s of e(k b / s), by the literal loop.
inline cplx ramanujan_sum_direct(u64 s, i64 k) {
  if (s == 0) reject("ramanujan_sum_direct: modulus must be >= 1");
  const u64 km = mod_norm(k, s);
  cplx acc{0.0, 0.0};
  for (u64 b = 0; b < s; ++b) {
    if (std::gcd(b, s) != 1) continue;
    acc += e_frac(static_cast<i64>((km * b) % s), s);
  }
  return acc;
}

namespace detail {

/// T_p = sum_{b=1}^{p-1} e(b/p) for prime p, computed by direct summation and
/// cached.  Conjugate pairs are added together so the imaginary part stays at
/// rounding level even for large p.
inline cplx reduced_unit_sum(u64 p) {
  static std::mutex mu;
  static std::map<u64, cplx> cache;
  {
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(p);
    if (it != cache.end()) return it->second;
  }
  cplx acc{0.0, 0.0};
  if (p == 2) {
    acc = e_frac(1, 2);
  } else {
    for (u64 b = 1; b <= (p - 1) / 2; ++b)
      acc += e_frac(static_cast<i64>(b), p) + e_frac(static_cast<i64>(p - b), p);
  }
  std::lock_guard<std::mutex> lk(mu);
  cache.emplace(p, acc);
  return acc;
}

/// Local factor at prime p of c_s(k): p-1 when p | k, else T_p.
inline cplx ramanujan_local(u64 p, u64 k_mod_p) {
  return k_mod_p == 0 ? cplx(static_cast<double>(p - 1), 0.0) : reduced_unit_sum(p);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Direct double and triple sums
// ---------------------------------------------------------------------------

/// F(n; a, q, s) = sum over reduced b, c mod s with c = a mod (q, s) of
/// e(-(n - c) b / s).
inline cplx f_sum(u64 n, i64 a, u64 q, u64 s) {
  if (s == 0 || q == 0) reject("f_sum: moduli must be >= 1");
  const u64 g  = std::gcd(q, s);
  const u64 am = mod_norm(a, g);
  cplx acc{0.0, 0.0};
  for (u64 b = 0; b < s; ++b) {
    if (std::gcd(b, s) != 1) continue;
    for (u64 c = 0; c < s; ++c) {
      if (std::gcd(c, s) != 1) continue;
      if (c % g != am) continue;
      // -(n - c) = c - n
      const u64 m = mod_norm(static_cast<i64>(c % s) - static_cast<i64>(n % s), s);
      acc += e_frac(static_cast<i64>((m * b) % s), s);
    }
  }
  return acc;
}

/// G(n; a1, q1, a2, q2, s) = sum over reduced b, c, d mod s with
/// c = a2 mod (q2, s) and d = a1 mod (q1, s) of e(-(n - d - c) b / s).
inline cplx g_sum(u64 n, i64 a1, u64 q1, i64 a2, u64 q2, u64 s) {
  if (s == 0 || q1 == 0 || q2 == 0) reject("g_sum: moduli must be >= 1");
  const u64 g1 = std::gcd(q1, s);
  const u64 g2 = std::gcd(q2, s);
  const u64 a1m = mod_norm(a1, g1);
  const u64 a2m = mod_norm(a2, g2);
  cplx acc{0.0, 0.0};
  for (u64 b = 0; b < s; ++b) {
    if (std::gcd(b, s) != 1) continue;
    for (u64 c = 0; c < s; ++c) {
      if (std::gcd(c, s) != 1) continue;
      if (c % g2 != a2m) continue;
      for (u64 d = 0; d < s; ++d) {
        if (std::gcd(d, s) != 1) continue;
        if (d % g1 != a1m) continue;
        const u64 m =
            mod_norm(static_cast<i64>((d + c) % s) - static_cast<i64>(n % s), s);
        acc += e_frac(static_cast<i64>((m * b) % s), s);
      }
    }
  }
  return acc;
}

}  // namespace gblab
