#pragma once
// Singular-series values for the binary and ternary additive prime problems,
// in both Euler-product form (truncated at a prime cutoff P_max) and series
// form (truncated at a squarefree-modulus cutoff S_max).  The two forms are
// independent computations of the same constants and cross-validate each
// other in the test suite.

#include <initializer_list>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

#include "gblab/common.hpp"
#include "gblab/expsum.hpp"
#include "gblab/sieve.hpp"

namespace gblab {

inline constexpr u64 kDefaultPrimeCutoff  = 1'000'000;
inline constexpr u64 kDefaultSeriesCutoff = 10'000;

enum class TruncationKind { prime_cutoff, series_cutoff };

struct Truncation {
  TruncationKind kind;
  u64 cutoff;
};

/// A truncated constant together with how it was truncated and a rough upper
/// estimate of the truncation error (0 when the value is exact).
struct SingularValue {
  double value;
  Truncation truncation;
  double tail_bound;
};

/// Residue class a mod q.
struct ResidueClass {
  i64 a = 0;
  u64 q = 1;
  bool reduced() const { return std::gcd(mod_norm(a, q), q) == 1; }
  u64 normalized() const { return mod_norm(a, q); }
};

namespace detail {

/// log prod_{3 <= p <= pmax} (1 - 1/(p-1)^2), Kahan-compensated, cached.
inline double twin_log_product(u64 pmax) {
  static std::mutex mu;
  static std::map<u64, double> cache;
  {
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(pmax);
    if (it != cache.end()) return it->second;
  }
  KahanSum ks;
  auto primes = base_primes(pmax);
  for (u32 p : *primes) {
    if (p > pmax) break;
    if (p == 2) continue;
    const double pm1 = static_cast<double>(p) - 1.0;
    ks.add(std::log1p(-1.0 / (pm1 * pm1)));
  }
  std::lock_guard<std::mutex> lk(mu);
  cache.emplace(pmax, ks.value());
  return ks.value();
}

/// log prod_{p <= pmax} (1 + 1/(p-1)^3), p = 2 included, cached.
inline double cubic_log_product(u64 pmax) {
  static std::mutex mu;
  static std::map<u64, double> cache;
  {
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(pmax);
    if (it != cache.end()) return it->second;
  }
  KahanSum ks;
  auto primes = base_primes(pmax);
  for (u32 p : *primes) {
    if (p > pmax) break;
    const double pm1 = static_cast<double>(p) - 1.0;
    ks.add(std::log1p(1.0 / (pm1 * pm1 * pm1)));
  }
  std::lock_guard<std::mutex> lk(mu);
  cache.emplace(pmax, ks.value());
  return ks.value();
}

/// Estimate for the omitted p > pmax factors of an Euler product whose terms
/// are 1 + O(1/p^2).
inline double prime_tail_bound(u64 pmax) {
  return 4.0 / (static_cast<double>(pmax) * std::log(static_cast<double>(pmax)));
}

/// phi on each divisor of q, keyed by divisor.  phi((q,s)) lookups for the
/// series weights stay O(log) without assuming q is small.
inline std::map<u64, u64> phi_on_divisors(u64 q) {
  std::map<u64, u64> out;
  std::vector<u64> divs{1};
  for (auto& [p, e] : factorize(q).factors) {
    const size_t base_count = divs.size();
    u64 pk = 1;
    for (u32 k = 1; k <= e; ++k) {
      pk *= p;
      for (size_t i = 0; i < base_count; ++i) divs.push_back(divs[i] * pk);
    }
  }
  for (u64 d : divs) out[d] = totient(d);
  return out;
}

/// Heuristic envelope for the omitted s > smax terms of the series forms.
inline double series_tail_bound(u64 smax) { return 20.0 / static_cast<double>(smax); }

/// Shared smallest-prime-factor / moebius / totient tables for the series
/// summations, built once per cutoff by a linear sieve.
struct SquarefreeTables {
  std::vector<u32> spf;
  std::vector<u32> phi;
  std::vector<i32> mu;

  explicit SquarefreeTables(u32 smax)
      : spf(smax + 1, 0), phi(smax + 1, 0), mu(smax + 1, 0) {
    if (smax >= 1) {
      spf[1] = 1;
      phi[1] = 1;
      mu[1]  = 1;
    }
    std::vector<u32> primes;
    for (u32 i = 2; i <= smax; ++i) {
      if (spf[i] == 0) {
        spf[i] = i;
        phi[i] = i - 1;
        mu[i]  = -1;
        primes.push_back(i);
      }
      for (u32 p : primes) {
        if (static_cast<u64>(p) * i > smax) break;
        const u32 ip = p * i;
        spf[ip]      = p;
        if (i % p == 0) {
          phi[ip] = phi[i] * p;
          mu[ip]  = 0;
          break;
        }
        phi[ip] = phi[i] * (p - 1);
        mu[ip]  = -mu[i];
      }
    }
  }
};

inline std::shared_ptr<const SquarefreeTables> squarefree_tables(u64 smax) {
  static std::mutex mu;
  static std::map<u64, std::shared_ptr<const SquarefreeTables>> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(smax);
  if (it != cache.end()) return it->second;
  auto t = std::make_shared<const SquarefreeTables>(static_cast<u32>(smax));
  cache.emplace(smax, t);
  return t;
}

/// Sums a series over squarefree s <= smax whose s-term is assembled from
/// per-prime local factors; enforces the reality check before discarding the
/// imaginary part.
template <class TermFn>
inline double sum_squarefree_series(u64 smax, const SquarefreeTables& t, TermFn&& term_of) {
  KahanSum re, im;
  for (u64 s = 1; s <= smax; ++s) {
    if (t.mu[s] == 0) continue;
    const cplx term = term_of(s);
    re.add(term.real());
    im.add(term.imag());
  }
  if (std::abs(im.value()) >= 1e-9)
    throw std::runtime_error("series evaluation: imaginary part " +
                             std::to_string(im.value()) + " exceeds the 1e-9 reality check");
  return re.value();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Binary problem
// ---------------------------------------------------------------------------

/// Euler-product value for the even target r: 0 for odd r, else
/// 2 prod_{p>2}(1 - 1/(p-1)^2) * prod_{p|r, p>2} (p-1)/(p-2).
inline SingularValue binary_sing(i64 r, u64 pmax = kDefaultPrimeCutoff) {
  if (r == 0) reject("binary_sing: r = 0 (every prime divides 0)");
  if (pmax < 3) reject("binary_sing: P_max must be >= 3");
  const Truncation tr{TruncationKind::prime_cutoff, pmax};
  const u64 rr = static_cast<u64>(r < 0 ? -r : r);
  if (rr % 2 != 0) return {0.0, tr, 0.0};
  double v = 2.0 * std::exp(detail::twin_log_product(pmax));
  for (auto& [p, e] : factorize(rr).factors) {
    (void)e;
    if (p == 2) continue;
    v *= static_cast<double>(p - 1) / static_cast<double>(p - 2);
  }
  return {v, tr, detail::prime_tail_bound(pmax)};
}

/// Series form: sum over squarefree s <= smax of mu^2(s)/phi^2(s) * c_s(-r).
inline SingularValue binary_sing_series(i64 r, u64 smax = kDefaultSeriesCutoff) {
  if (r == 0) reject("binary_sing_series: r = 0 (every modulus divides 0)");
  if (smax < 1) reject("binary_sing_series: S_max must be >= 1");
  const u64 rr = static_cast<u64>(r < 0 ? -r : r);
  auto tables  = detail::squarefree_tables(smax);
  const auto& t = *tables;
  const double value = detail::sum_squarefree_series(smax, t, [&](u64 s) {
    cplx prod{1.0, 0.0};
    for (u32 m = static_cast<u32>(s); m > 1;) {
      const u32 p = t.spf[m];
      prod *= detail::ramanujan_local(p, rr % p);
      m /= p;
    }
    const double phis = static_cast<double>(t.phi[s]);
    return prod / (phis * phis);
  });
  return {value, {TruncationKind::series_cutoff, smax}, detail::series_tail_bound(smax)};
}

/// AP-refined binary value: (1/phi(q)) * binary value at the literal product
/// r*q when 2|r and (a,q) = (a-r,q) = 1, else exactly 0.
inline SingularValue binary_sing_ap(i64 r, u64 q, i64 a, u64 pmax = kDefaultPrimeCutoff) {
  if (q == 0) reject("binary_sing_ap: q must be >= 1");
  if (r == 0) reject("binary_sing_ap: r = 0 (every prime divides 0)");
  if (pmax < 3) reject("binary_sing_ap: P_max must be >= 3");
  const Truncation tr{TruncationKind::prime_cutoff, pmax};
  const bool even     = (mod_norm(r, 2) == 0);
  const bool a_red    = std::gcd(mod_norm(a, q), q) == 1;
  const bool ar_red   = std::gcd(mod_norm(a - r, q), q) == 1;
  if (!(even && a_red && ar_red)) return {0.0, tr, 0.0};
  const u64 rr = static_cast<u64>(r < 0 ? -r : r);
  if (rr > static_cast<u64>(std::numeric_limits<i64>::max()) / q)
    reject("binary_sing_ap: r*q does not fit in a signed 64-bit value");
  SingularValue base = binary_sing(static_cast<i64>(rr * q), pmax);
  base.value /= static_cast<double>(totient(q));
  base.tail_bound = detail::prime_tail_bound(pmax);
  return base;
}

/// Single term of the AP-refined binary series, by the literal double sum:
/// mu(s)/(phi(s) phi([q;s])) * sum*_b e(-rb/s) sum*_{c: (q,s)|c-a} e(bc/s).
inline cplx hs_term(u64 s, i64 r, u64 q, i64 a) {
  if (s == 0 || q == 0) reject("hs_term: moduli must be >= 1");
  const int mu_s = moebius(s);
  if (mu_s == 0) return {0.0, 0.0};
  const u64 g  = std::gcd(q, s);
  const u64 am = mod_norm(a, g);
  const u64 rm = mod_norm(r, s);
  cplx acc{0.0, 0.0};
  for (u64 b = 0; b < s; ++b) {
    if (std::gcd(b, s) != 1) continue;
    // e(-rb/s) = e((s - rm) b / s)
    const cplx outer = e_frac(static_cast<i64>((mod_norm(-static_cast<i64>(rm), s) * b) % s), s);
    cplx inner{0.0, 0.0};
    for (u64 c = 0; c < s; ++c) {
      if (std::gcd(c, s) != 1) continue;
      if (c % g != am) continue;
      inner += e_frac(static_cast<i64>((b * c) % s), s);
    }
    acc += outer * inner;
  }
  const u64 gq      = std::gcd(q, s);
  const u64 phi_lcm = totient(q) / totient(gq) * totient(s);
  return acc * (static_cast<double>(mu_s) /
                (static_cast<double>(totient(s)) * static_cast<double>(phi_lcm)));
}

/// Sum of hs_term over squarefree s <= smax, assembled prime-by-prime.
inline SingularValue hs_series(i64 r, u64 q, i64 a, u64 smax = kDefaultSeriesCutoff) {
  if (q == 0) reject("hs_series: q must be >= 1");
  if (r == 0) reject("hs_series: r = 0 (every modulus divides 0)");
  if (smax < 1) reject("hs_series: S_max must be >= 1");
  auto tables   = detail::squarefree_tables(smax);
  const auto& t = *tables;
  const u64 phi_q = totient(q);
  // phi on the divisors of q, for phi([q;s]) = phi(q)/phi((q,s)) * phi(s).
  const auto phi_div = detail::phi_on_divisors(q);
  const double value = detail::sum_squarefree_series(smax, t, [&](u64 s) {
    cplx prod{1.0, 0.0};
    bool zero = false;
    for (u32 m = static_cast<u32>(s); m > 1;) {
      const u32 p = t.spf[m];
      m /= p;
      if (q % p == 0) {
        if (mod_norm(a, p) == 0) { zero = true; break; }
        prod *= detail::ramanujan_local(p, mod_norm(a - r, p));
      } else {
        prod *= detail::reduced_unit_sum(p) * detail::ramanujan_local(p, mod_norm(r, p));
      }
    }
    if (zero) return cplx{0.0, 0.0};
    const u64 g       = std::gcd(q, s);
    const u64 phi_lcm = phi_q / phi_div.at(g) * t.phi[s];
    const double den  = static_cast<double>(t.phi[s]) * static_cast<double>(phi_lcm);
    return prod * (static_cast<double>(t.mu[s]) / den);
  });
  return {value, {TruncationKind::series_cutoff, smax}, detail::series_tail_bound(smax)};
}

// ---------------------------------------------------------------------------
// Ternary problem
// ---------------------------------------------------------------------------

namespace detail {

inline double cubic_factor(u64 p) {
  const double pm1 = static_cast<double>(p) - 1.0;
  return 1.0 + 1.0 / (pm1 * pm1 * pm1);
}
inline double square_deficit_factor(u64 p) {
  const double pm1 = static_cast<double>(p) - 1.0;
  return 1.0 - 1.0 / (pm1 * pm1);
}
inline double ramified_factor(u64 p) {
  return static_cast<double>(p) / (static_cast<double>(p) - 1.0);
}

/// Ascending union of the distinct primes of several integers (1s ignored).
inline std::vector<u64> prime_union(std::initializer_list<u64> values) {
  std::vector<u64> out;
  for (u64 v : values) {
    if (v <= 1) continue;
    for (auto& [p, e] : factorize(v).factors) { (void)e; out.push_back(p); }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

/// One-AP ternary constant: (1/phi(q)) times the three-class prime product
/// (p|q: ramified or deficit by n = a mod p; p|n, p not | q: deficit;
/// p not | nq: cubic, truncated at pmax).
inline SingularValue ternary_one_ap(u64 n, u64 q, i64 a, u64 pmax = kDefaultPrimeCutoff) {
  if (n == 0) reject("ternary_one_ap: n must be >= 1");
  if (q == 0) reject("ternary_one_ap: q must be >= 1");
  if (pmax < 3) reject("ternary_one_ap: P_max must be >= 3");
  const Truncation tr{TruncationKind::prime_cutoff, pmax};
  double v = std::exp(detail::cubic_log_product(pmax)) / static_cast<double>(totient(q));
  for (u64 p : detail::prime_union({n, q})) {
    if (p <= pmax) v /= detail::cubic_factor(p);
    if (q % p == 0) {
      const bool n_is_a = mod_norm(static_cast<i64>(n % p) - static_cast<i64>(mod_norm(a, p)), p) == 0;
      v *= n_is_a ? detail::ramified_factor(p) : detail::square_deficit_factor(p);
    } else {
      v *= detail::square_deficit_factor(p);  // here p | n
    }
  }
  return {v, tr, detail::prime_tail_bound(pmax)};
}

/// Two-AP ternary constant; exactly 0 when (q1, q2, n-(a1+a2)) > 1, else
/// 1/(phi(q1) phi(q2)) times the class product.  The normalization is fixed
/// by two identities the series form satisfies: at q2 = 1 the value reduces
/// to the one-progression constant, and summing over reduced a2 mod q2
/// recovers it as well.
inline SingularValue ternary_two_ap(u64 n, u64 q1, i64 a1, u64 q2, i64 a2,
                                    u64 pmax = kDefaultPrimeCutoff) {
  if (n == 0) reject("ternary_two_ap: n must be >= 1");
  if (q1 == 0 || q2 == 0) reject("ternary_two_ap: q1, q2 must be >= 1");
  if (pmax < 3) reject("ternary_two_ap: P_max must be >= 3");
  const Truncation tr{TruncationKind::prime_cutoff, pmax};
  const u64 g12 = std::gcd(q1, q2);
  if (g12 > 1) {
    const u64 res = mod_norm(static_cast<i64>(n % g12) - (a1 + a2), g12);
    if (std::gcd(res, g12) > 1) return {0.0, tr, 0.0};
  }
  double v = std::exp(detail::cubic_log_product(pmax)) /
             (static_cast<double>(totient(q1)) * static_cast<double>(totient(q2)));
  for (u64 p : detail::prime_union({n, q1, q2})) {
    if (p <= pmax) v /= detail::cubic_factor(p);
    const bool d1 = q1 % p == 0, d2 = q2 % p == 0;
    if (!d1 && !d2) {
      v *= detail::square_deficit_factor(p);  // here p | n
    } else if (d1 != d2) {
      const i64 ai      = d1 ? a1 : a2;
      const bool n_is_a = mod_norm(static_cast<i64>(n % p) - static_cast<i64>(mod_norm(ai, p)), p) == 0;
      v *= n_is_a ? detail::ramified_factor(p) : detail::square_deficit_factor(p);
    } else {
      // p | (q1, q2) and p does not divide n-(a1+a2), else we returned 0.
      v *= detail::ramified_factor(p);
    }
  }
  return {v, tr, detail::prime_tail_bound(pmax)};
}

/// Series form of the one-AP ternary constant:
/// sum_s mu^2(s)/phi^2(s) * F(n;a,q,s) / phi([q;s]).
inline SingularValue ternary_one_ap_series(u64 n, u64 q, i64 a, u64 smax = kDefaultSeriesCutoff) {
  if (n == 0 || q == 0) reject("ternary_one_ap_series: n, q must be >= 1");
  if (smax < 1) reject("ternary_one_ap_series: S_max must be >= 1");
  auto tables   = detail::squarefree_tables(smax);
  const auto& t = *tables;
  const u64 phi_q = totient(q);
  const auto phi_div = detail::phi_on_divisors(q);
  const double value = detail::sum_squarefree_series(smax, t, [&](u64 s) {
    cplx prod{1.0, 0.0};
    bool zero = false;
    for (u32 m = static_cast<u32>(s); m > 1;) {
      const u32 p = t.spf[m];
      m /= p;
      if (q % p == 0) {
        if (mod_norm(a, p) == 0) { zero = true; break; }
        const u64 na = mod_norm(static_cast<i64>(n % p) - static_cast<i64>(mod_norm(a, p)), p);
        prod *= detail::ramanujan_local(p, na);
      } else {
        prod *= detail::reduced_unit_sum(p) * detail::ramanujan_local(p, n % p);
      }
    }
    if (zero) return cplx{0.0, 0.0};
    const u64 g       = std::gcd(q, s);
    const u64 phi_lcm = phi_q / phi_div.at(g) * t.phi[s];
    const double phis = static_cast<double>(t.phi[s]);
    return prod / (phis * phis * static_cast<double>(phi_lcm));
  });
  return {value, {TruncationKind::series_cutoff, smax}, detail::series_tail_bound(smax)};
}

/// Series form of the two-AP ternary constant:
/// sum_s mu(s) G(n;a1,q1,a2,q2,s) / (phi(s) phi([q1;s]) phi([q2;s])).
inline SingularValue ternary_two_ap_series(u64 n, u64 q1, i64 a1, u64 q2, i64 a2,
                                           u64 smax = kDefaultSeriesCutoff) {
  if (n == 0 || q1 == 0 || q2 == 0) reject("ternary_two_ap_series: n, q1, q2 must be >= 1");
  if (smax < 1) reject("ternary_two_ap_series: S_max must be >= 1");
  auto tables   = detail::squarefree_tables(smax);
  const auto& t = *tables;
  const u64 phi_q1 = totient(q1), phi_q2 = totient(q2);
  const auto phi_div1 = detail::phi_on_divisors(q1);
  const auto phi_div2 = detail::phi_on_divisors(q2);
  const double value = detail::sum_squarefree_series(smax, t, [&](u64 s) {
    cplx prod{1.0, 0.0};
    bool zero = false;
    for (u32 m = static_cast<u32>(s); m > 1;) {
      const u32 p = t.spf[m];
      m /= p;
      const bool d1 = q1 % p == 0, d2 = q2 % p == 0;
      if (!d1 && !d2) {
        const cplx tp = detail::reduced_unit_sum(p);
        prod *= tp * tp * detail::ramanujan_local(p, n % p);
      } else if (d1 != d2) {
        const i64 ai = d1 ? a1 : a2;
        if (mod_norm(ai, p) == 0) { zero = true; break; }
        const u64 na = mod_norm(static_cast<i64>(n % p) - static_cast<i64>(mod_norm(ai, p)), p);
        prod *= detail::reduced_unit_sum(p) * detail::ramanujan_local(p, na);
      } else {
        if (mod_norm(a1, p) == 0 || mod_norm(a2, p) == 0) { zero = true; break; }
        const u64 nc = mod_norm(static_cast<i64>(n % p) - (a1 + a2), p);
        prod *= detail::ramanujan_local(p, nc);
      }
    }
    if (zero) return cplx{0.0, 0.0};
    const u64 g1 = std::gcd(q1, s), g2 = std::gcd(q2, s);
    const u64 phi_l1 = phi_q1 / phi_div1.at(g1) * t.phi[s];
    const u64 phi_l2 = phi_q2 / phi_div2.at(g2) * t.phi[s];
    const double den = static_cast<double>(t.phi[s]) * static_cast<double>(phi_l1) *
                       static_cast<double>(phi_l2);
    return prod * (static_cast<double>(t.mu[s]) / den);
  });
  return {value, {TruncationKind::series_cutoff, smax}, detail::series_tail_bound(smax)};
}

}  // namespace gblab
