#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gblab/common.hpp"
#include "gblab/parallel.hpp"
#include "gblab/sieve.hpp"

namespace gblab::finder {

/// Half-open window (X, X+Y].
struct WindowSpec {
  u64 X = 0;
  u64 Y = 0;
};

enum class SearchMode { first, all, count };

/// Constrained ternary representation search: n = p1 + p2 + p3 with p1 and
/// p2 drawn from the two query windows, p3 := n - p1 - p2 prime, optional
/// shifted almost-prime conditions p_i + 2 = P_s per summand, and an optional
/// product condition (p1+2)(p2+2) = P_s.
struct RepresentationQuery {
  u64 n = 0;
  std::vector<WindowSpec> windows;  // p1 window, p2 window; p3 is derived
  std::vector<std::pair<u32, u64>> almost_prime_conditions;  // (summand 1..3, s)
  std::optional<u64> product_s;
  SearchMode mode = SearchMode::all;
};

struct Triple {
  u64 p1 = 0, p2 = 0, p3 = 0;
};

struct FindResult {
  std::vector<Triple> solutions;  // filled in first/all modes
  u64 count = 0;                  // filled in every mode
  std::vector<std::string> warnings;
};

namespace detail {

inline u32 clamp_order(u64 s) {
  // Any 64-bit integer has at most 63 prime factors with multiplicity.
  return static_cast<u32>(std::min<u64>(s, 64));
}

}  // namespace detail

/// Enumerates (p1, p2, p3) lexicographically in (p1, p2).  `first` mode stops
/// at the first solution and is sequential; `all` and `count` modes split the
/// p1 range across workers and merge in ascending order, so results are
/// deterministic for any worker count.  An empty derived p3 range yields an
/// empty result with a diagnostic warning.
inline FindResult find_ternary(const RepresentationQuery& query, unsigned workers = 1) {
  if (query.n % 2 == 0) reject("find_ternary: n must be odd");
  if (query.windows.size() != 2)
    reject("find_ternary: query needs exactly two windows (p1 and p2); p3 is derived");
  std::optional<u64> cond[4];
  for (const auto& [idx, s] : query.almost_prime_conditions) {
    if (idx < 1 || idx > 3)
      reject("find_ternary: almost-prime condition index must be 1, 2, or 3");
    if (s < 1) reject("find_ternary: almost-prime order s must be >= 1");
    cond[idx] = cond[idx] ? std::min(*cond[idx], s) : s;
  }
  if (query.product_s && *query.product_s < 1)
    reject("find_ternary: product almost-prime order must be >= 1");

  FindResult out;
  if (query.n % 6 == 1)
    out.warnings.push_back(
        "n = 1 (mod 6): degenerate residue class for the p+2 conditions");

  const WindowSpec w1s = query.windows[0];
  const WindowSpec w2s = query.windows[1];
  if (w1s.Y == 0 || w2s.Y == 0) return out;

  const i64 lo = static_cast<i64>(query.n) - static_cast<i64>(w1s.X + w1s.Y) -
                 static_cast<i64>(w2s.X + w2s.Y);
  const i64 hi = static_cast<i64>(query.n) - static_cast<i64>(w1s.X) -
                 static_cast<i64>(w2s.X) - 2;
  if (hi < 2) {
    out.warnings.push_back(
        "derived p3 range is empty: n - p1 - p2 falls below 2 for every candidate");
    return out;
  }
  const PrimeWindow w1 = sieve_window(w1s.X, w1s.Y, workers);
  const PrimeWindow w2 = sieve_window(w2s.X, w2s.Y, workers);
  const u64 alo = static_cast<u64>(std::max<i64>(lo, 2));
  const PrimeWindow aux =
      sieve_window(alo - 1, static_cast<u64>(hi) - alo + 1, workers);

  std::vector<u64> p1s;
  w1.for_each_prime([&](u64 p) {
    if (!cond[1] || is_almost_prime(p + 2, detail::clamp_order(*cond[1])))
      p1s.push_back(p);
  });
  std::vector<u64> p2s;
  w2.for_each_prime([&](u64 p) {
    if (!cond[2] || is_almost_prime(p + 2, detail::clamp_order(*cond[2])))
      p2s.push_back(p);
  });

  auto match = [&](u64 p1, u64 p2, Triple* t) -> bool {
    const i64 p3 = static_cast<i64>(query.n) - static_cast<i64>(p1) -
                   static_cast<i64>(p2);
    if (p3 < 2) return false;
    const u64 v = static_cast<u64>(p3);
    if (!aux.contains(v))
      reject("find_ternary: auxiliary window misses derived value " +
             std::to_string(v));
    if (!aux.is_prime(v)) return false;
    if (cond[3] && !is_almost_prime(v + 2, detail::clamp_order(*cond[3]))) return false;
    if (query.product_s) {
      const u64 f1 = p1 + 2, f2 = p2 + 2;
      if (f2 != 0 && f1 > std::numeric_limits<u64>::max() / f2)
        reject("find_ternary: product condition overflows 64 bits");
      if (!is_almost_prime(f1 * f2, detail::clamp_order(*query.product_s)))
        return false;
    }
    *t = {p1, p2, v};
    return true;
  };

  if (query.mode == SearchMode::first) {
    for (u64 p1 : p1s)
      for (u64 p2 : p2s) {
        Triple t;
        if (match(p1, p2, &t)) {
          out.solutions.push_back(t);
          out.count = 1;
          return out;
        }
      }
    return out;
  }

  std::vector<std::vector<Triple>> found(p1s.size());
  std::vector<u64> counts(p1s.size(), 0);
  const bool keep = query.mode == SearchMode::all;
  parallel_for(p1s.size(), workers, [&](u64 i1) {
    const u64 p1 = p1s[i1];
    u64 c = 0;
    for (u64 p2 : p2s) {
      Triple t;
      if (!match(p1, p2, &t)) continue;
      ++c;
      if (keep) found[i1].push_back(t);
    }
    counts[i1] = c;
  });
  for (std::size_t i1 = 0; i1 < p1s.size(); ++i1) {
    out.count += counts[i1];
    if (keep)
      out.solutions.insert(out.solutions.end(), found[i1].begin(), found[i1].end());
  }
  return out;
}

/// Number of primes p in the window whose shift p + 2 has at most two prime
/// factors counted with multiplicity.
inline u64 count_chen(const PrimeWindow& window) {
  u64 c = 0;
  window.for_each_prime([&](u64 p) {
    if (is_almost_prime(p + 2, 2)) ++c;
  });
  return c;
}

/// Exceptional-set scan for constrained binary representations.
struct ExceptionReport {
  u64 exceptional_count = 0;
  u64 total = 0;             // admissible even targets scanned
  double theta_report = 0.0; // echoed presentation parameter
  std::vector<u64> exceptional;
  std::vector<std::string> warnings;
};

/// Scans the even targets 2k in (2*X1, 2*X1+2Y] with 2k != 2 (mod 6) and
/// reports those with NO representation 2k = p2 + p3, p2 in (X2, X2+Y] with
/// p2 + 2 = P_s, p3 prime.  The fraction exceptional_count/total is a pure
/// measurement.
inline ExceptionReport cor2_exceptions(u64 X1, u64 X2, u64 Y, u64 s,
                                       double theta_report = 0.0,
                                       unsigned workers = 1) {
  if (s < 1) reject("cor2_exceptions: almost-prime order s must be >= 1");
  ExceptionReport out;
  out.theta_report = theta_report;
  if (Y == 0) return out;

  const PrimeWindow w2 = sieve_window(X2, Y, workers);
  std::vector<u64> p2s;
  w2.for_each_prime([&](u64 p) {
    if (is_almost_prime(p + 2, detail::clamp_order(s))) p2s.push_back(p);
  });
  if (p2s.empty())
    out.warnings.push_back("no p2 candidate satisfies the almost-prime condition; "
                           "every admissible target is exceptional");

  const i64 lo = 2 * static_cast<i64>(X1 + 1) - static_cast<i64>(X2 + Y);
  const i64 hi = 2 * static_cast<i64>(X1 + Y) - static_cast<i64>(X2 + 1);
  PrimeWindow aux;
  const bool have_aux = !p2s.empty() && hi >= 2;
  if (have_aux) {
    const u64 alo = static_cast<u64>(std::max<i64>(lo, 2));
    aux = sieve_window(alo - 1, static_cast<u64>(hi) - alo + 1, workers);
  }

  std::vector<u64> targets;
  targets.reserve(Y);
  for (u64 k = X1 + 1; k <= X1 + Y; ++k)
    if ((2 * k) % 6 != 2) targets.push_back(k);
  out.total = targets.size();

  std::vector<u8> bad(targets.size(), 0);
  parallel_for(targets.size(), workers, [&](u64 ti) {
    const u64 k = targets[ti];
    bool found = false;
    if (have_aux) {
      for (u64 p2 : p2s) {
        const i64 p3 = 2 * static_cast<i64>(k) - static_cast<i64>(p2);
        if (p3 < 2) continue;
        const u64 v = static_cast<u64>(p3);
        if (!aux.contains(v))
          reject("cor2_exceptions: auxiliary window misses derived value " +
                 std::to_string(v));
        if (aux.is_prime(v)) {
          found = true;
          break;
        }
      }
    }
    bad[ti] = found ? 0 : 1;
  });
  for (std::size_t ti = 0; ti < targets.size(); ++ti)
    if (bad[ti]) out.exceptional.push_back(2 * targets[ti]);
  out.exceptional_count = out.exceptional.size();
  return out;
}

}  // namespace gblab::finder
