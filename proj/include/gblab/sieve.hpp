#pragma once
// Windowed prime generation plus the elementary arithmetic functions used
// throughout the library.  Every window follows the half-open convention
// (X, X+Y]: length Y, containing the integers X+1 .. X+Y.

#include <algorithm>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <utility>
#include <vector>

#include "gblab/common.hpp"
#include "gblab/parallel.hpp"

namespace gblab {

namespace detail {

/// Plain odd-only sieve of the primes p <= limit.
inline std::vector<u32> simple_sieve(u64 limit) {
  std::vector<u32> primes;
  if (limit < 2) return primes;
  primes.push_back(2);
  if (limit < 3) return primes;
  // composite[i] marks the odd number 2i+3.
  const u64 count = (limit - 1) / 2;
  std::vector<u8> composite(count, 0);
  for (u64 i = 0;; ++i) {
    u64 p = 2 * i + 3;
    if (p * p > limit) break;
    if (composite[i]) continue;
    for (u64 m = (p * p - 3) / 2; m < count; m += p) composite[m] = 1;
  }
  for (u64 i = 0; i < count; ++i)
    if (!composite[i]) primes.push_back(static_cast<u32>(2 * i + 3));
  return primes;
}

/// Shared cache of the small primes used as sieving bases and trial divisors.
/// Callers receive an immutable snapshot; the cache regrows geometrically.
inline std::shared_ptr<const std::vector<u32>> base_primes(u64 limit) {
  static std::mutex mu;
  static std::shared_ptr<const std::vector<u32>> cache =
      std::make_shared<const std::vector<u32>>(simple_sieve(1u << 10));
  static u64 sieved_to = 1u << 10;
  std::lock_guard<std::mutex> lk(mu);
  if (limit > sieved_to) {
    u64 target = std::max<u64>(limit, sieved_to * 2);
    cache      = std::make_shared<const std::vector<u32>>(simple_sieve(target));
    sieved_to  = target;
  }
  return cache;
}

// Trial division by cached primes stops here; beyond it we fall back to
// stepping through odd candidates so that one huge semiprime cannot force a
// multi-gigabyte prime table.
inline constexpr u64 kTrialCacheCap = u64(1) << 26;

}  // namespace detail

// ---------------------------------------------------------------------------
// PrimeWindow
// ---------------------------------------------------------------------------

/// Bitset of the primes in (base, base+length].  Bit i corresponds to the
/// integer base+1+i.
class PrimeWindow {
 public:
  PrimeWindow() = default;
  PrimeWindow(u64 base, u64 length, std::vector<u64> words)
      : base_(base), length_(length), words_(std::move(words)) {}

  u64 base() const { return base_; }
  u64 length() const { return length_; }
  bool empty() const { return length_ == 0; }

  bool contains(u64 n) const { return n > base_ && n - base_ <= length_; }

  bool bit(u64 i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

  /// True iff n lies in the window and is prime.  Out-of-window queries are a
  /// caller bug; use contains() first when coverage is not guaranteed.
  bool is_prime(u64 n) const {
    if (!contains(n)) reject("PrimeWindow::is_prime: " + std::to_string(n) + " outside (" +
                             std::to_string(base_) + ", " + std::to_string(base_ + length_) + "]");
    return bit(n - base_ - 1);
  }

  u64 popcount() const {
    u64 total = 0;
    for (u64 w : words_) total += static_cast<u64>(__builtin_popcountll(w));
    return total;
  }

  /// Visits the primes of the window in ascending order.
  template <class Fn>
  void for_each_prime(Fn&& fn) const {
    for (u64 wi = 0; wi < words_.size(); ++wi) {
      u64 w = words_[wi];
      while (w) {
        u64 b = static_cast<u64>(__builtin_ctzll(w));
        fn(base_ + 1 + wi * 64 + b);
        w &= w - 1;
      }
    }
  }

  std::vector<u64> primes() const {
    std::vector<u64> out;
    out.reserve(popcount());
    for_each_prime([&](u64 p) { out.push_back(p); });
    return out;
  }

  const std::vector<u64>& words() const { return words_; }

  /// Integers per sieving segment (2^20 odd candidates).  Segment boundaries
  /// are multiples of this, hence word-aligned, so parallel segment writes
  /// never touch the same word.
  static constexpr u64 kSegmentIntegers = u64(1) << 21;

 private:
  u64 base_   = 0;
  u64 length_ = 0;
  std::vector<u64> words_;
};

/// Sieves the window (X, X+Y].  Deterministic for every worker count: each
/// segment writes a disjoint, word-aligned slice of the bitset.
inline PrimeWindow sieve_window(u64 X, u64 Y, unsigned workers = 1) {
  if (Y == 0) reject("sieve_window: window length must be >= 1");
  if (X > std::numeric_limits<u64>::max() - Y)
    reject("sieve_window: X + Y does not fit in 64 bits");
  const u64 lo = X + 1, hi = X + Y;
  std::vector<u64> words((Y + 63) / 64, 0);
  auto base = detail::base_primes(isqrt_u64(hi));

  const u64 seg_len = PrimeWindow::kSegmentIntegers;
  const u64 n_seg   = (Y + seg_len - 1) / seg_len;

  auto do_segment = [&](u64 seg) {
    const u64 off0 = seg * seg_len;
    const u64 off1 = std::min(off0 + seg_len, Y);
    const u64 s_lo = lo + off0;
    const u64 s_hi = lo + (off1 - 1);
    if (s_lo <= 2 && 2 <= s_hi) {
      u64 idx = 2 - lo;
      words[idx >> 6] |= u64(1) << (idx & 63);
    }
    const u64 first_odd = s_lo | 1;
    if (first_odd > s_hi) return;
    const u64 n_odd = (s_hi - first_odd) / 2 + 1;
    std::vector<u8> composite(n_odd, 0);
    for (u32 p32 : *base) {
      const u64 p = p32;
      if (p == 2) continue;
      if (p > s_hi / p) break;  // p*p > s_hi
      const u64 k = s_lo / p + (s_lo % p != 0);
      if (k > s_hi / p) continue;
      u64 start = std::max(p * p, k * p);
      if ((start & 1) == 0) start += p;
      if (start > s_hi) continue;
      const u64 step = 2 * p;
      for (u64 m = start; m <= s_hi;) {
        composite[(m - first_odd) / 2] = 1;
        if (s_hi - m < step) break;
        m += step;
      }
    }
    for (u64 j = 0; j < n_odd; ++j) {
      if (composite[j]) continue;
      const u64 n = first_odd + 2 * j;
      if (n < 3) continue;
      const u64 idx = n - lo;
      words[idx >> 6] |= u64(1) << (idx & 63);
    }
  };

  if (resolve_workers(workers) <= 1 || n_seg <= 1) {
    for (u64 s = 0; s < n_seg; ++s) do_segment(s);
  } else {
    parallel_for(n_seg, workers, do_segment);
  }
  return PrimeWindow(X, Y, std::move(words));
}

// ---------------------------------------------------------------------------
// Factorization and the classical arithmetic functions
// ---------------------------------------------------------------------------

struct FactorSignature {
  std::vector<std::pair<u64, u32>> factors;  // (prime, exponent), ascending

  u32 nu() const { return static_cast<u32>(factors.size()); }  // distinct primes
  u32 big_omega() const {
    u32 t = 0;
    for (auto& [p, e] : factors) { (void)p; t += e; }
    return t;
  }
  bool squarefree() const {
    for (auto& [p, e] : factors) { (void)p; if (e > 1) return false; }
    return true;
  }
};

inline FactorSignature factorize(u64 n) {
  if (n == 0) reject("factorize: n must be >= 1");
  FactorSignature sig;
  if (n == 1) return sig;
  u64 m     = n;
  u64 bound = std::min(isqrt_u64(m), detail::kTrialCacheCap);
  auto base = detail::base_primes(bound);
  for (u32 p32 : *base) {
    const u64 p = p32;
    if (p > bound || p > m / p) break;
    if (m % p) continue;
    u32 e = 0;
    while (m % p == 0) { m /= p; ++e; }
    sig.factors.emplace_back(p, e);
  }
  if (m > 1) {
    u64 d = std::max<u64>(detail::kTrialCacheCap | 1, 3);
    if (isqrt_u64(m) >= d) {
      // Residual cofactor beyond the prime cache: odd-step trial division.
      for (; d <= m / d; d += 2) {
        if (m % d) continue;
        u32 e = 0;
        while (m % d == 0) { m /= d; ++e; }
        sig.factors.emplace_back(d, e);
      }
    }
    if (m > 1) sig.factors.emplace_back(m, 1);
  }
  return sig;
}

inline bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  auto sig = factorize(n);
  return sig.factors.size() == 1 && sig.factors[0].second == 1;
}

/// True iff n has at most s prime factors counted with multiplicity.
inline bool is_almost_prime(u64 n, u32 s) {
  if (n == 0) reject("is_almost_prime: n must be >= 1");
  return factorize(n).big_omega() <= s;
}

inline u64 totient(u64 q) {
  if (q == 0) reject("totient: argument must be >= 1");
  u64 r = q;
  for (auto& [p, e] : factorize(q).factors) { (void)e; r -= r / p; }
  return r;
}

inline int moebius(u64 q) {
  if (q == 0) reject("moebius: argument must be >= 1");
  auto sig = factorize(q);
  if (!sig.squarefree()) return 0;
  return (sig.nu() % 2 == 0) ? 1 : -1;
}

inline u64 tau(u64 q) {
  if (q == 0) reject("tau: argument must be >= 1");
  u64 t = 1;
  for (auto& [p, e] : factorize(q).factors) { (void)p; t *= e + 1; }
  return t;
}

inline u64 gcd_u64(u64 a, u64 b) { return std::gcd(a, b); }
inline u64 lcm_u64(u64 a, u64 b) {
  if (a == 0 || b == 0) reject("lcm: arguments must be >= 1");
  return a / std::gcd(a, b) * b;
}

// ---------------------------------------------------------------------------
// Divisor sums
// ---------------------------------------------------------------------------

/// D(x) = sum_{n <= x} tau(n), by the hyperbola method (O(sqrt x)).
inline u64 divisor_sum(u64 x) {
  if (x == 0) reject("divisor_sum: x must be >= 1");
  const u64 s = isqrt_u64(x);
  u64 total   = 0;
  for (u64 d = 1; d <= s; ++d) total += x / d;
  return 2 * total - s * s;
}

/// (D(x) - x log x - (2 gamma - 1) x) / (x^{1/3} log x); bounded for the x we
/// can reach if the divisor remainder behaves.
inline double voronoi_residual(u64 x) {
  if (x < 2) reject("voronoi_residual: x must be >= 2 (log x must be positive)");
  const double xd   = static_cast<double>(x);
  const double lx   = std::log(xd);
  const double main = xd * lx + (2.0 * kEulerGamma - 1.0) * xd;
  return (static_cast<double>(divisor_sum(x)) - main) / (std::cbrt(xd) * lx);
}

/// sum over primes v <= p <= w of log p / (p - 2), skipping p = 2.
/// Empty ranges (w < 2 or v > w) give 0.
inline double mertens_log_sum(double v, double w) {
  if (w < 2.0) return 0.0;
  if (v < 2.0) v = 2.0;
  if (v > w) return 0.0;
  const u64 lo = static_cast<u64>(std::ceil(v));
  const u64 hi = static_cast<u64>(std::floor(w));
  if (hi < lo) return 0.0;
  KahanSum ks;
  const u64 chunk = u64(1) << 24;
  for (u64 b = lo; b <= hi;) {
    const u64 len = std::min(chunk, hi - b + 1);
    PrimeWindow win = sieve_window(b - 1, len);
    win.for_each_prime([&](u64 p) {
      if (p == 2) return;
      ks.add(std::log(static_cast<double>(p)) / static_cast<double>(p - 2));
    });
    b += len;
  }
  return ks.value();
}

// ---------------------------------------------------------------------------
// Bulk factorization over a window
// ---------------------------------------------------------------------------

/// Distinct prime factors for every integer in (X, X+Y], as ascending lists.
/// Entry i describes X+1+i.  Cost is ~ Y log log(X+Y) via a segmented pass of
/// the base primes.
inline std::vector<std::vector<u64>> factor_window(u64 X, u64 Y) {
  if (Y == 0) reject("factor_window: window length must be >= 1");
  if (X > std::numeric_limits<u64>::max() - Y)
    reject("factor_window: X + Y does not fit in 64 bits");
  const u64 lo = X + 1, hi = X + Y;
  std::vector<std::vector<u64>> out(Y);
  std::vector<u64> rest(Y);
  for (u64 i = 0; i < Y; ++i) rest[i] = lo + i;
  auto base = detail::base_primes(isqrt_u64(hi));
  for (u32 p32 : *base) {
    const u64 p = p32;
    if (p > hi / p) break;
    const u64 k = lo / p + (lo % p != 0);
    if (k > hi / p) continue;
    u64 m = k * p;
    for (; m <= hi; m += p) {
      const u64 i = m - lo;
      out[i].push_back(p);
      while (rest[i] % p == 0) rest[i] /= p;
      if (hi - m < p) break;
    }
  }
  for (u64 i = 0; i < Y; ++i)
    if (rest[i] > 1) out[i].push_back(rest[i]);
  return out;
}

}  // namespace gblab
