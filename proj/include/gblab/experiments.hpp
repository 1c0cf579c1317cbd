#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gblab/common.hpp"
#include "gblab/parallel.hpp"
#include "gblab/quadrature.hpp"
#include "gblab/sieve.hpp"
#include "gblab/singular.hpp"

namespace gblab::experiments {

// ---------------------------------------------------------------------------
// Spec and report types
// ---------------------------------------------------------------------------

/// Measurement kinds.  The names double as the config-file / report
/// vocabulary, so they are stable interface tokens.
enum class Kind {
  thm1,
  thm2,
  thm3_bv,
  thm4_kawada,
  thm5,
  thm6_variance,
  thm7,
  conjecture_goldbach,
  conjecture_twin,
  lemma1,
  lemma2,
};

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::thm1: return "thm1";
    case Kind::thm2: return "thm2";
    case Kind::thm3_bv: return "thm3_bv";
    case Kind::thm4_kawada: return "thm4_kawada";
    case Kind::thm5: return "thm5";
    case Kind::thm6_variance: return "thm6_variance";
    case Kind::thm7: return "thm7";
    case Kind::conjecture_goldbach: return "conjecture_goldbach";
    case Kind::conjecture_twin: return "conjecture_twin";
    case Kind::lemma1: return "lemma1";
    case Kind::lemma2: return "lemma2";
  }
  return "unknown";
}

inline std::optional<Kind> kind_from_name(const std::string& s) {
  static const std::pair<const char*, Kind> table[] = {
      {"thm1", Kind::thm1},
      {"thm2", Kind::thm2},
      {"thm3_bv", Kind::thm3_bv},
      {"thm4_kawada", Kind::thm4_kawada},
      {"thm5", Kind::thm5},
      {"thm6_variance", Kind::thm6_variance},
      {"thm7", Kind::thm7},
      {"conjecture_goldbach", Kind::conjecture_goldbach},
      {"conjecture_twin", Kind::conjecture_twin},
      {"lemma1", Kind::lemma1},
      {"lemma2", Kind::lemma2},
  };
  for (const auto& [name, k] : table)
    if (s == name) return k;
  return std::nullopt;
}

/// Which two-prime equation a pair-correlation run measures.
enum class PairEquation { goldbach, twin };

/// Parameter block for run_experiment.  Which fields are meaningful depends
/// on the kind; the config layer enforces per-kind required/allowed keys.
struct ExperimentSpec {
  Kind kind = Kind::thm3_bv;
  u64 X1 = 0, X2 = 0;
  u64 Y = 0, Y1 = 0, Y2 = 0;
  u64 R = 0;
  u64 n = 0;  // ternary target
  u64 Q = 0, Q1 = 0, Q2 = 0;
  i64 a = 0, a1 = 0, a2 = 0;
  bool weighted = true;
  bool max_over_a = false;  // ternary one-progression kind only
  double a_display = 3.0;   // presentation exponent for the log-power rescale
  u64 pmax = 1'000'000;     // Euler-product truncation for main terms
  // envelope kinds only
  u64 M = 0, N = 0;
  u64 trials = 0;
  u64 seed = 0;
};

/// One outer-index contribution to a report's left-hand side.  The index is
/// the outermost summation variable: a modulus q, a center k, or a shift r.
struct BreakdownRow {
  u64 index = 0;
  double value = 0.0;
};

/// Result of one measurement.  normalized = lhs / main_scale, and
/// log_power_scaled = normalized * log_scale^a_display (presentation only).
struct ExperimentReport {
  Kind kind = Kind::thm3_bv;
  double lhs = 0.0;
  double main_scale = 1.0;
  double normalized = 0.0;
  double log_scale = 0.0;
  double a_display = 3.0;
  double log_power_scaled = 0.0;
  u64 cutoff_terms = 0;  // pair terms whose forced complement fell below 2
  std::vector<BreakdownRow> breakdown;
  std::vector<std::string> warnings;
};

// ---------------------------------------------------------------------------
// Shared internals
// ---------------------------------------------------------------------------

namespace detail {

/// Primes of a window with their logs, ascending.
struct WeightedPrimes {
  std::vector<u64> p;
  std::vector<double> logp;
};

inline WeightedPrimes weighted_primes(const PrimeWindow& w) {
  WeightedPrimes out;
  out.p = w.primes();
  out.logp.resize(out.p.size());
  for (std::size_t i = 0; i < out.p.size(); ++i)
    out.logp[i] = std::log(static_cast<double>(out.p[i]));
  return out;
}

/// A prime window plus a dense log table, so pair loops can test primality
/// and fetch log p with two array reads instead of a std::log per hit.
struct LogTable {
  PrimeWindow win;
  std::vector<double> logs;

  LogTable() = default;
  explicit LogTable(PrimeWindow w) : win(std::move(w)) {
    logs.assign(win.length(), 0.0);
    win.for_each_prime(
        [&](u64 p) { logs[p - win.base() - 1] = std::log(static_cast<double>(p)); });
  }

  bool covers(u64 v) const { return win.contains(v); }
  bool is_prime(u64 v) const { return win.bit(v - win.base() - 1); }  // pre: covers(v)
  double logp(u64 v) const { return logs[v - win.base() - 1]; }
};

/// Sieves exactly the integers [lo, hi] (clamped below at 2).  A void range
/// yields an empty table that covers nothing.
inline LogTable aux_table(i64 lo, i64 hi, unsigned workers) {
  lo = std::max<i64>(lo, 2);
  if (hi < lo) return LogTable{};
  return LogTable(sieve_window(static_cast<u64>(lo - 1),
                               static_cast<u64>(hi - lo + 1), workers));
}

inline double fold_rows(const std::vector<BreakdownRow>& rows) {
  KahanSum s;
  for (const auto& r : rows) s.add(r.value);
  return s.value();
}

/// Fills the derived fields once the breakdown is complete.  Rows are folded
/// in ascending index order, so the total is independent of how many workers
/// produced them.
inline void finish_report(ExperimentReport& rep, double main_scale, double log_scale) {
  rep.lhs = fold_rows(rep.breakdown);
  rep.main_scale = main_scale;
  rep.normalized = main_scale > 0.0 ? rep.lhs / main_scale : 0.0;
  rep.log_scale = log_scale;
  rep.log_power_scaled =
      log_scale > 0.0 ? rep.normalized * std::pow(log_scale, rep.a_display) : rep.normalized;
  if (rep.cutoff_terms > 0)
    rep.warnings.push_back(std::to_string(rep.cutoff_terms) +
                           " pair term(s) forced the complementary value below 2 and contribute 0");
}

/// Primes of `w` in the class a mod q for each q = 1..Q, with logs.
inline std::vector<WeightedPrimes> residue_filtered(const PrimeWindow& w, u64 Q, i64 a) {
  std::vector<WeightedPrimes> lists(Q);
  for (u64 qi = 0; qi < Q; ++qi) {
    const u64 q = qi + 1;
    const u64 ar = mod_norm(a, q);
    w.for_each_prime([&](u64 p) {
      if (p % q != ar) return;
      lists[qi].p.push_back(p);
      lists[qi].logp.push_back(std::log(static_cast<double>(p)));
    });
  }
  return lists;
}

/// Per-center, per-modulus pair-count residuals
///   d[center][q-1] = | pairsum(2k; q, a) - main(2k; q, a) |
/// for centers k in (X1, X1+Klen], pairs p2 + p3 = 2k with p2 in (X2, X2+Y]
/// and p2 = a (mod q).  Weighted mode pairs carry log p2 log p3 against the
/// Euler value times Y; unweighted pairs carry 1 against the Euler value
/// times the density integral at the center.
struct CenterResidualTable {
  u64 Klen = 0, Q = 0;
  std::vector<double> d;  // Klen * Q, row-major by center
  std::vector<u64> cut;   // per-center dropped-term tallies

  double at(u64 ki, u64 qi) const { return d[ki * Q + qi]; }
  u64 total_cut() const {
    u64 t = 0;
    for (u64 c : cut) t += c;
    return t;
  }
};

inline CenterResidualTable center_residuals(u64 X1, u64 Klen, u64 X2, u64 Y, u64 Q,
                                            i64 a, bool weighted, u64 pmax,
                                            unsigned workers) {
  CenterResidualTable t;
  t.Klen = Klen;
  t.Q = Q;
  t.d.assign(Klen * Q, 0.0);
  t.cut.assign(Klen, 0);
  if (Klen == 0 || Q == 0) return t;

  const PrimeWindow w2 = sieve_window(X2, Y, workers);
  const auto lists = residue_filtered(w2, Q, a);
  const i64 lo = 2 * static_cast<i64>(X1 + 1) - static_cast<i64>(X2 + Y);
  const i64 hi = 2 * static_cast<i64>(X1 + Klen) - static_cast<i64>(X2 + 1);
  const LogTable aux = aux_table(lo, hi, workers);
  const double Yd = static_cast<double>(Y);
  (void)gblab::detail::twin_log_product(pmax);  // warm the shared cache before parallel rows

  parallel_for(Klen, workers, [&](u64 ki) {
    const u64 k = X1 + 1 + ki;
    u64 cut = 0;
    for (u64 qi = 0; qi < Q; ++qi) {
      const auto& lst = lists[qi];
      KahanSum s;
      for (std::size_t i = 0; i < lst.p.size(); ++i) {
        const i64 p3 = 2 * static_cast<i64>(k) - static_cast<i64>(lst.p[i]);
        if (p3 < 2) {
          ++cut;
          continue;
        }
        const u64 v = static_cast<u64>(p3);
        if (!aux.covers(v))
          reject("center_residuals: auxiliary window misses complementary value " +
                 std::to_string(v));
        if (!aux.is_prime(v)) continue;
        s.add(weighted ? lst.logp[i] * aux.logp(v) : 1.0);
      }
      const double sing = binary_sing_ap(2 * static_cast<i64>(k), qi + 1, a, pmax).value;
      double main = 0.0;
      if (sing != 0.0)
        main = weighted ? sing * Yd
                        : sing * quadrature::binary_h_integral(static_cast<double>(X2), Yd,
                                                   static_cast<double>(2 * k));
      t.d[ki * Q + qi] = std::abs(s.value() - main);
    }
    t.cut[ki] = cut;
  });
  return t;
}

/// Ratio comparability advisory: warns when `right` is negative or when it is
/// not within a factor 4 of `left`.
inline void warn_comparable(std::vector<std::string>& warnings, double left, double right,
                            const std::string& what) {
  if (right < 0.0) {
    warnings.push_back(what + " is negative");
    return;
  }
  if (left <= 0.0) return;
  const double ratio = right / left;
  if (ratio < 0.25 || ratio > 4.0)
    warnings.push_back(what + " is not comparable to the window length (ratio " +
                       std::to_string(ratio) + ")");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pair counters and the single-progression residual
// ---------------------------------------------------------------------------

/// Sum over p2 in window2 with p2 = a (mod q) and p3 := r - p2 prime of
/// log p2 log p3 (weighted) or 1 (unweighted).  Ordered pairs: (p2, p3) roles
/// are fixed.  `aux` must cover every complementary value >= 2; shortfalls
/// below 2 contribute 0 and are tallied into *cutoff_terms when given.
inline double goldbach_pairs(i64 r, const PrimeWindow& window2, u64 q, i64 a,
                             bool weighted, const detail::LogTable& aux,
                             u64* cutoff_terms) {
  if (q == 0) reject("goldbach_pairs: modulus must be >= 1");
  const u64 ar = mod_norm(a, q);
  KahanSum s;
  u64 cut = 0;
  window2.for_each_prime([&](u64 p2) {
    if (p2 % q != ar) return;
    const i64 p3 = r - static_cast<i64>(p2);
    if (p3 < 2) {
      ++cut;
      return;
    }
    const u64 v = static_cast<u64>(p3);
    if (!aux.covers(v))
      reject("goldbach_pairs: auxiliary window misses complementary value " +
             std::to_string(v) + "; required range is [" +
             std::to_string(r - static_cast<i64>(window2.base() + window2.length())) +
             ", " + std::to_string(r - static_cast<i64>(window2.base()) - 1) + "]");
    if (!aux.is_prime(v)) return;
    s.add(weighted ? std::log(static_cast<double>(p2)) * aux.logp(v) : 1.0);
  });
  if (cutoff_terms) *cutoff_terms += cut;
  return s.value();
}

/// Convenience overload that sieves the exact complementary range itself.
inline double goldbach_pairs(i64 r, const PrimeWindow& window2, u64 q, i64 a,
                             bool weighted = true) {
  const auto aux = detail::aux_table(
      r - static_cast<i64>(window2.base() + window2.length()),
      r - static_cast<i64>(window2.base()) - 1, 1);
  return goldbach_pairs(r, window2, q, a, weighted, aux, nullptr);
}

/// Same as goldbach_pairs with the twin equation p3 := p2 - r.
inline double twin_pairs(i64 r, const PrimeWindow& window2, u64 q, i64 a, bool weighted,
                         const detail::LogTable& aux, u64* cutoff_terms) {
  if (q == 0) reject("twin_pairs: modulus must be >= 1");
  const u64 ar = mod_norm(a, q);
  KahanSum s;
  u64 cut = 0;
  window2.for_each_prime([&](u64 p2) {
    if (p2 % q != ar) return;
    const i64 p3 = static_cast<i64>(p2) - r;
    if (p3 < 2) {
      ++cut;
      return;
    }
    const u64 v = static_cast<u64>(p3);
    if (!aux.covers(v))
      reject("twin_pairs: auxiliary window misses complementary value " +
             std::to_string(v) + "; required range is [" +
             std::to_string(static_cast<i64>(window2.base()) + 1 - r) + ", " +
             std::to_string(static_cast<i64>(window2.base() + window2.length()) - r) +
             "]");
    if (!aux.is_prime(v)) return;
    s.add(weighted ? std::log(static_cast<double>(p2)) * aux.logp(v) : 1.0);
  });
  if (cutoff_terms) *cutoff_terms += cut;
  return s.value();
}

inline double twin_pairs(i64 r, const PrimeWindow& window2, u64 q, i64 a,
                         bool weighted = true) {
  const auto aux =
      detail::aux_table(static_cast<i64>(window2.base()) + 1 - r,
                        static_cast<i64>(window2.base() + window2.length()) - r, 1);
  return twin_pairs(r, window2, q, a, weighted, aux, nullptr);
}

/// Signed residual of the log-weighted prime count of the class a mod q in
/// (X, X+Y] against Y/phi(q).  Non-reduced classes get main term 0: apart from
/// at most one ramified prime they contain no primes at all.
inline double ap_error(const PrimeWindow& window, u64 q, i64 a) {
  if (q == 0) reject("ap_error: modulus must be >= 1");
  const u64 ar = mod_norm(a, q);
  KahanSum s;
  window.for_each_prime([&](u64 p) {
    if (p % q == ar) s.add(std::log(static_cast<double>(p)));
  });
  const double main = std::gcd(ar, q) == 1
                          ? static_cast<double>(window.length()) /
                                static_cast<double>(totient(q))
                          : 0.0;
  return s.value() - main;
}

inline double ap_error(u64 X, u64 Y, u64 q, i64 a, unsigned workers = 1) {
  return ap_error(sieve_window(X, Y, workers), q, a);
}

// ---------------------------------------------------------------------------
// Averaged residual reports
// ---------------------------------------------------------------------------

/// Sum over moduli q <= Q of the worst reduced-class residual |ap_error| for
/// the window (X, X+Y].  Rows are indexed by q; normalization scale is Y.
inline ExperimentReport ap_residual_sum(u64 X, u64 Y, u64 Q, double a_display = 3.0,
                                        unsigned workers = 1) {
  if (Y == 0) reject("ap_residual_sum: Y must be >= 1");
  if (Q == 0) reject("ap_residual_sum: Q must be >= 1");
  ExperimentReport rep;
  rep.kind = Kind::thm3_bv;
  rep.a_display = a_display;
  const double Xd = static_cast<double>(X), Yd = static_cast<double>(Y);
  if (Y > X) rep.warnings.push_back("window length Y exceeds its left endpoint X");
  if (Yd < std::pow(Xd, 0.6))
    rep.warnings.push_back("Y below X^(3/5): outside the averaged-residual regime");
  if (X > 0 && static_cast<double>(Q) > Yd / std::sqrt(Xd))
    rep.warnings.push_back("modulus bound Q exceeds Y/sqrt(X)");

  const auto wp = detail::weighted_primes(sieve_window(X, Y, workers));
  rep.breakdown.resize(Q);
  parallel_for(Q, workers, [&](u64 qi) {
    const u64 q = qi + 1;
    std::vector<KahanSum> cls(q);
    for (std::size_t i = 0; i < wp.p.size(); ++i) cls[wp.p[i] % q].add(wp.logp[i]);
    const double main = Yd / static_cast<double>(totient(q));
    double worst = 0.0;
    for (u64 c = 0; c < q; ++c) {
      if (std::gcd(c, q) != 1) continue;
      worst = std::max(worst, std::abs(cls[c].value() - main));
    }
    rep.breakdown[qi] = {q, worst};
  });
  detail::finish_report(rep, Yd, std::log(Yd));
  return rep;
}

/// Pair-count residuals with a progression inside the pair, averaged over
/// every center k in (X1, X1+Y] and over moduli q2 <= Q2.  Rows are indexed
/// by q2; normalization scale is Y^2.
inline ExperimentReport goldbach_ap_residual_sum(u64 X1, u64 X2, u64 Y, u64 Q2, i64 a2,
                                                 bool weighted = true,
                                                 u64 pmax = kDefaultPrimeCutoff,
                                                 double a_display = 3.0,
                                                 unsigned workers = 1) {
  if (Q2 == 0) reject("goldbach_ap_residual_sum: Q2 must be >= 1");
  ExperimentReport rep;
  rep.kind = Kind::thm4_kawada;
  rep.a_display = a_display;
  const double X1d = static_cast<double>(X1), X2d = static_cast<double>(X2),
               Yd = static_cast<double>(Y);
  if (Y > X1) rep.warnings.push_back("window length Y exceeds X1");
  if (Yd < std::pow(X1d, 2.0 / 3.0))
    rep.warnings.push_back("Y below X1^(2/3): outside the averaged-residual regime");
  if (X2 < Y) rep.warnings.push_back("X2 below Y");
  if (X2 + Y > 2 * X1)
    rep.warnings.push_back(
        "X2 exceeds 2*X1 - Y: complementary values can fall below 2");
  if (X2 > 0 && static_cast<double>(Q2) > Yd / std::sqrt(X2d))
    rep.warnings.push_back("modulus bound Q2 exceeds Y/sqrt(X2)");

  rep.breakdown.resize(Q2);
  for (u64 qi = 0; qi < Q2; ++qi) rep.breakdown[qi] = {qi + 1, 0.0};
  if (Y > 0) {
    const auto t = detail::center_residuals(X1, Y, X2, Y, Q2, a2, weighted, pmax, workers);
    for (u64 qi = 0; qi < Q2; ++qi) {
      KahanSum s;
      for (u64 ki = 0; ki < t.Klen; ++ki) s.add(t.at(ki, qi));
      rep.breakdown[qi].value = s.value();
    }
    rep.cutoff_terms = t.total_cut();
  }
  detail::finish_report(rep, Yd * Yd, Y > 0 ? std::log(Yd) : 0.0);
  return rep;
}

/// As goldbach_ap_residual_sum, with the centers additionally restricted to a
/// progression: rows are indexed by the center modulus q1 and collect the
/// residuals of centers k with 2k = a1 (mod q1), summed over q2 <= Q2.
/// Normalization scale is Y^2.
inline ExperimentReport goldbach_double_ap_residual_sum(
    u64 X1, u64 X2, u64 Y, u64 Q1, u64 Q2, i64 a1, i64 a2, bool weighted = true,
    u64 pmax = kDefaultPrimeCutoff, double a_display = 3.0, unsigned workers = 1) {
  if (Q1 == 0) reject("goldbach_double_ap_residual_sum: Q1 must be >= 1");
  if (Q2 == 0) reject("goldbach_double_ap_residual_sum: Q2 must be >= 1");
  ExperimentReport rep;
  rep.kind = Kind::thm5;
  rep.a_display = a_display;
  const double X1d = static_cast<double>(X1), X2d = static_cast<double>(X2),
               Yd = static_cast<double>(Y);
  if (Y > X1) rep.warnings.push_back("window length Y exceeds X1");
  if (Yd < std::pow(X1d, 2.0 / 3.0))
    rep.warnings.push_back("Y below X1^(2/3): outside the averaged-residual regime");
  if (X2 < Y) rep.warnings.push_back("X2 below Y");
  if (X2 + Y > 2 * X1)
    rep.warnings.push_back(
        "X2 exceeds 2*X1 - Y: complementary values can fall below 2");
  if (X2 > 0 && static_cast<double>(Q2) > Yd / std::sqrt(X2d))
    rep.warnings.push_back("modulus bound Q2 exceeds Y/sqrt(X2)");
  if (X1 > 0 && static_cast<double>(Q1) > std::pow(Yd, 1.5) / std::sqrt(X1d))
    rep.warnings.push_back("center modulus bound Q1 exceeds Y^(3/2)/sqrt(X1)");
  if (a1 < 1 || a1 > static_cast<i64>(X1))
    rep.warnings.push_back("center residue a1 outside [1, X1]");

  rep.breakdown.resize(Q1);
  for (u64 qi = 0; qi < Q1; ++qi) rep.breakdown[qi] = {qi + 1, 0.0};
  if (Y > 0) {
    const auto t = detail::center_residuals(X1, Y, X2, Y, Q2, a2, weighted, pmax, workers);
    parallel_for(Q1, workers, [&](u64 qi1) {
      const u64 q1 = qi1 + 1;
      const u64 a1r = mod_norm(a1, q1);
      KahanSum s;
      for (u64 ki = 0; ki < t.Klen; ++ki) {
        const u64 k = X1 + 1 + ki;
        if ((2 * k) % q1 != a1r) continue;
        for (u64 qi2 = 0; qi2 < Q2; ++qi2) s.add(t.at(ki, qi2));
      }
      rep.breakdown[qi1].value = s.value();
    });
    rep.cutoff_terms = t.total_cut();
  }
  detail::finish_report(rep, Yd * Yd, Y > 0 ? std::log(Yd) : 0.0);
  return rep;
}

/// Plain pair-count residuals (no progression inside the pair) with the
/// centers restricted to a progression: centers k in (X1, X1+R], rows indexed
/// by the center modulus q <= Q collecting centers with 2k = a (mod q).
/// Normalization scale is R*Y.
inline ExperimentReport goldbach_center_ap_residual_sum(
    u64 X1, u64 X2, u64 Y, u64 R, u64 Q, i64 a, bool weighted = true,
    u64 pmax = kDefaultPrimeCutoff, double a_display = 3.0, unsigned workers = 1) {
  if (Q == 0) reject("goldbach_center_ap_residual_sum: Q must be >= 1");
  ExperimentReport rep;
  rep.kind = Kind::thm7;
  rep.a_display = a_display;
  const double X1d = static_cast<double>(X1), X2d = static_cast<double>(X2),
               Yd = static_cast<double>(Y), Rd = static_cast<double>(R);
  if (Y > X2) rep.warnings.push_back("window length Y exceeds X2");
  if (Yd < std::pow(X2d, 7.0 / 12.0))
    rep.warnings.push_back("Y below X2^(7/12): outside the averaged-residual regime");
  if (R > Y) rep.warnings.push_back("center range R exceeds Y");
  if (R > 0 && Rd < std::cbrt(Yd))
    rep.warnings.push_back("center range R below Y^(1/3)");
  if (R > X1) rep.warnings.push_back("center range R exceeds X1");
  if (X1 > 0 && static_cast<double>(Q) > std::pow(Rd, 1.5) / std::sqrt(X1d))
    rep.warnings.push_back("modulus bound Q exceeds R^(3/2)/sqrt(X1)");
  detail::warn_comparable(rep.warnings, Yd, X1d - X2d - Yd, "X1 - X2 - Y");
  if (a < 1 || a > static_cast<i64>(X1))
    rep.warnings.push_back("center residue a outside [1, X1]");

  rep.breakdown.resize(Q);
  for (u64 qi = 0; qi < Q; ++qi) rep.breakdown[qi] = {qi + 1, 0.0};
  if (R > 0 && Y > 0) {
    const auto t = detail::center_residuals(X1, R, X2, Y, 1, 0, weighted, pmax, workers);
    parallel_for(Q, workers, [&](u64 qi) {
      const u64 q = qi + 1;
      const u64 ar = mod_norm(a, q);
      KahanSum s;
      for (u64 ki = 0; ki < t.Klen; ++ki) {
        const u64 k = X1 + 1 + ki;
        if ((2 * k) % q == ar) s.add(t.at(ki, 0));
      }
      rep.breakdown[qi].value = s.value();
    });
    rep.cutoff_terms = t.total_cut();
  }
  detail::finish_report(rep, Rd * Yd, Y > 0 ? std::log(Yd) : 0.0);
  return rep;
}

/// Squared plain pair-count residuals over the centers k in (X1, X1+R]:
/// row k carries |pairsum(2k) - main(2k)|^2.  Normalization scale is R*Y^2.
inline ExperimentReport goldbach_residual_variance(u64 X1, u64 R, u64 X2, u64 Y,
                                                   bool weighted = true,
                                                   u64 pmax = kDefaultPrimeCutoff,
                                                   double a_display = 3.0,
                                                   unsigned workers = 1) {
  ExperimentReport rep;
  rep.kind = Kind::thm6_variance;
  rep.a_display = a_display;
  const double X1d = static_cast<double>(X1), X2d = static_cast<double>(X2),
               Yd = static_cast<double>(Y), Rd = static_cast<double>(R);
  if (R > Y) rep.warnings.push_back("center range R exceeds Y");
  if (R > 0 && Y > 0 && Rd < std::cbrt(Yd))
    rep.warnings.push_back("center range R below Y^(1/3)");
  if (R > X1) rep.warnings.push_back("center range R exceeds X1");
  if (Y > X2) rep.warnings.push_back("window length Y exceeds X2");
  if (Y > 0 && Yd < std::pow(X2d, 7.0 / 12.0))
    rep.warnings.push_back("Y below X2^(7/12): outside the averaged-residual regime");
  detail::warn_comparable(rep.warnings, Yd, 2.0 * X1d - X2d - Yd, "2*X1 - X2 - Y");

  rep.breakdown.resize(R);
  for (u64 ki = 0; ki < R; ++ki) rep.breakdown[ki] = {X1 + 1 + ki, 0.0};
  if (R > 0 && Y > 0) {
    const auto t = detail::center_residuals(X1, R, X2, Y, 1, 0, weighted, pmax, workers);
    for (u64 ki = 0; ki < R; ++ki) {
      const double d = t.at(ki, 0);
      rep.breakdown[ki].value = d * d;
    }
    rep.cutoff_terms = t.total_cut();
  }
  detail::finish_report(rep, Rd * Yd * Yd, Y > 0 ? std::log(Yd) : 0.0);
  return rep;
}

/// Ternary representation residuals with progressions on the first two
/// primes.  For each modulus pair (q1, q2) the triple count over p1 + p2 + p3
/// = n with p1, p2 in their windows and p1 = a1 (q1), p2 = a2 (q2) is
/// compared against the two-progression Euler constant times Y^2 (weighted)
/// or times the nested density integral (unweighted).  Rows are indexed by
/// q1 and sum over q2 <= Q2.  Normalization scale is Y^2.
inline ExperimentReport ternary_double_ap_residual_sum(
    u64 n, u64 X1, u64 X2, u64 Y, u64 Q1, u64 Q2, i64 a1, i64 a2, bool weighted = true,
    u64 pmax = kDefaultPrimeCutoff, double a_display = 3.0, unsigned workers = 1) {
  if (Q1 == 0) reject("ternary_double_ap_residual_sum: Q1 must be >= 1");
  if (Q2 == 0) reject("ternary_double_ap_residual_sum: Q2 must be >= 1");
  ExperimentReport rep;
  rep.kind = Kind::thm1;
  rep.a_display = a_display;
  const double nd = static_cast<double>(n), X1d = static_cast<double>(X1),
               X2d = static_cast<double>(X2), Yd = static_cast<double>(Y);
  if (n % 2 == 0) rep.warnings.push_back("n is even: every ternary main term vanishes");
  if (n < X1 + X2 + 2 * Y)
    rep.warnings.push_back("n below X1 + X2 + 2Y: no representations are possible");
  if (nd > X1d * Yd) rep.warnings.push_back("n exceeds X1*Y");
  if (Y > X1) rep.warnings.push_back("window length Y exceeds X1");
  if (Y > X2) rep.warnings.push_back("window length Y exceeds X2");
  if (Yd < std::pow(X1d, 0.6))
    rep.warnings.push_back("Y below X1^(3/5): outside the averaged-residual regime");
  if (nd > X1d && Yd < std::pow(nd - X1d, 2.0 / 3.0))
    rep.warnings.push_back("Y below (n - X1)^(2/3)");
  if (X1 > 0 && static_cast<double>(Q1) > Yd / std::sqrt(X1d))
    rep.warnings.push_back("modulus bound Q1 exceeds Y/sqrt(X1)");
  if (X2 > 0 && static_cast<double>(Q2) > Yd / std::sqrt(X2d))
    rep.warnings.push_back("modulus bound Q2 exceeds Y/sqrt(X2)");
  if (a1 < 1 || a1 + static_cast<i64>(X1 + Y) > static_cast<i64>(n))
    rep.warnings.push_back("residue a1 outside [1, n - X1 - Y]");

  rep.breakdown.resize(Q1);
  for (u64 qi = 0; qi < Q1; ++qi) rep.breakdown[qi] = {qi + 1, 0.0};
  if (Y > 0) {
    const PrimeWindow w1 = sieve_window(X1, Y, workers);
    const auto wp1 = detail::weighted_primes(w1);
    const PrimeWindow w2 = sieve_window(X2, Y, workers);
    const auto lists2 = detail::residue_filtered(w2, Q2, a2);
    const i64 lo = static_cast<i64>(n) - static_cast<i64>(X1 + Y) -
                   static_cast<i64>(X2 + Y);
    const i64 hi = static_cast<i64>(n) - static_cast<i64>(X1 + 1) -
                   static_cast<i64>(X2 + 1);
    const detail::LogTable aux = detail::aux_table(lo, hi, workers);
    const std::size_t n1 = wp1.p.size();

    // pair_block[i1*Q2 + qi2]: inner double sum over p2 (in class a2 mod q2)
    // and p3 = n - p1 - p2, for the first-window prime indexed i1.
    std::vector<double> pair_block(n1 * Q2, 0.0);
    std::vector<u64> cut(n1, 0);
    parallel_for(n1, workers, [&](u64 i1) {
      const i64 rem = static_cast<i64>(n) - static_cast<i64>(wp1.p[i1]);
      u64 c = 0;
      for (u64 qi2 = 0; qi2 < Q2; ++qi2) {
        const auto& lst = lists2[qi2];
        KahanSum s;
        for (std::size_t i = 0; i < lst.p.size(); ++i) {
          const i64 p3 = rem - static_cast<i64>(lst.p[i]);
          if (p3 < 2) {
            ++c;
            continue;
          }
          const u64 v = static_cast<u64>(p3);
          if (!aux.covers(v))
            reject("ternary_double_ap_residual_sum: auxiliary window misses " +
                   std::to_string(v));
          if (!aux.is_prime(v)) continue;
          s.add(weighted ? lst.logp[i] * aux.logp(v) : 1.0);
        }
        pair_block[i1 * Q2 + qi2] = s.value();
      }
      cut[i1] = c;
    });
    for (u64 c : cut) rep.cutoff_terms += c;

    double density = 0.0;
    if (!weighted) density = quadrature::h_integral(X1d, X2d, Yd, nd);
    (void)gblab::detail::cubic_log_product(pmax);  // warm the shared cache before parallel rows
    parallel_for(Q1, workers, [&](u64 qi1) {
      const u64 q1 = qi1 + 1;
      const u64 a1r = mod_norm(a1, q1);
      KahanSum row;
      for (u64 qi2 = 0; qi2 < Q2; ++qi2) {
        KahanSum cell;
        for (std::size_t i1 = 0; i1 < n1; ++i1) {
          if (wp1.p[i1] % q1 != a1r) continue;
          cell.add(weighted ? wp1.logp[i1] * pair_block[i1 * Q2 + qi2]
                            : pair_block[i1 * Q2 + qi2]);
        }
        const double sing = ternary_two_ap(n, q1, a1, qi2 + 1, a2, pmax).value;
        const double main = weighted ? sing * Yd * Yd : sing * density;
        row.add(std::abs(cell.value() - main));
      }
      rep.breakdown[qi1].value = row.value();
    });
  }
  detail::finish_report(rep, Yd * Yd, Y > 0 ? std::log(Yd) : 0.0);
  return rep;
}

/// Ternary representation residuals with one progression, on the first
/// prime: windows (X1, X1+Y1] and (X2, X2+Y2], rows indexed by q <= Q.  With
/// max_over_a the row takes the worst reduced residue class; otherwise the
/// fixed class a.  Normalization scale is Y1*Y2; the log scale is log Y2.
inline ExperimentReport ternary_ap_residual_sum(u64 n, u64 X1, u64 Y1, u64 X2, u64 Y2,
                                                u64 Q, i64 a, bool max_over_a = false,
                                                bool weighted = true,
                                                u64 pmax = kDefaultPrimeCutoff,
                                                double a_display = 3.0,
                                                unsigned workers = 1) {
  if (Q == 0) reject("ternary_ap_residual_sum: Q must be >= 1");
  if (!weighted && Y1 != Y2)
    reject("ternary_ap_residual_sum: the unweighted density integral needs Y1 == Y2");
  ExperimentReport rep;
  rep.kind = Kind::thm2;
  rep.a_display = a_display;
  const double nd = static_cast<double>(n), X1d = static_cast<double>(X1),
               X2d = static_cast<double>(X2), Y1d = static_cast<double>(Y1),
               Y2d = static_cast<double>(Y2);
  if (n % 2 == 0) rep.warnings.push_back("n is even: every ternary main term vanishes");
  if (Y1 > X1) rep.warnings.push_back("window length Y1 exceeds X1");
  if (Y1 > 0 && Y1d < std::pow(X1d, 0.6))
    rep.warnings.push_back("Y1 below X1^(3/5): outside the averaged-residual regime");
  if (Y2 > X2) rep.warnings.push_back("window length Y2 exceeds X2");
  if (Y2 > 0 && Y2d < std::pow(X2d, 7.0 / 12.0))
    rep.warnings.push_back("Y2 below X2^(7/12)");
  if (Y1 > Y2) rep.warnings.push_back("Y1 exceeds Y2");
  if (Y1 > 0 && Y1d < std::cbrt(Y2d)) rep.warnings.push_back("Y1 below Y2^(1/3)");
  {
    const double slack = nd - X1d - Y1d - X2d - Y2d;
    if (slack < 0.0)
      rep.warnings.push_back("windows overshoot n: no representations are possible");
    else if (Y2 > 0 && (slack / Y2d < 0.25 || slack / Y2d > 4.0))
      rep.warnings.push_back("n - X1 - Y1 - X2 - Y2 is not comparable to Y2");
  }
  if (X1 > 0 && static_cast<double>(Q) > Y1d / std::sqrt(X1d))
    rep.warnings.push_back("modulus bound Q exceeds Y1/sqrt(X1)");
  if (!max_over_a && nd > X1d &&
      static_cast<double>(Q) > std::pow(Y1d, 1.5) / std::sqrt(nd - X1d))
    rep.warnings.push_back("modulus bound Q exceeds Y1^(3/2)/sqrt(n - X1)");
  if (max_over_a && static_cast<double>(Q) > std::sqrt(Y1d))
    rep.warnings.push_back("modulus bound Q exceeds sqrt(Y1) in the max variant");
  if (!max_over_a && (a < 1 || a + static_cast<i64>(X1 + Y1) > static_cast<i64>(n)))
    rep.warnings.push_back("residue a outside [1, n - X1 - Y1]");

  rep.breakdown.resize(Q);
  for (u64 qi = 0; qi < Q; ++qi) rep.breakdown[qi] = {qi + 1, 0.0};
  if (Y1 > 0 && Y2 > 0) {
    const PrimeWindow w1 = sieve_window(X1, Y1, workers);
    const auto wp1 = detail::weighted_primes(w1);
    const PrimeWindow w2 = sieve_window(X2, Y2, workers);
    const auto wp2 = detail::weighted_primes(w2);
    const i64 lo = static_cast<i64>(n) - static_cast<i64>(X1 + Y1) -
                   static_cast<i64>(X2 + Y2);
    const i64 hi = static_cast<i64>(n) - static_cast<i64>(X1 + 1) -
                   static_cast<i64>(X2 + 1);
    const detail::LogTable aux = detail::aux_table(lo, hi, workers);
    const std::size_t n1 = wp1.p.size();

    // inner_sum[i1]: double sum over p2 and p3 = n - p1 - p2; independent of q.
    std::vector<double> inner_sum(n1, 0.0);
    std::vector<u64> cut(n1, 0);
    parallel_for(n1, workers, [&](u64 i1) {
      const i64 rem = static_cast<i64>(n) - static_cast<i64>(wp1.p[i1]);
      KahanSum s;
      u64 c = 0;
      for (std::size_t i = 0; i < wp2.p.size(); ++i) {
        const i64 p3 = rem - static_cast<i64>(wp2.p[i]);
        if (p3 < 2) {
          ++c;
          continue;
        }
        const u64 v = static_cast<u64>(p3);
        if (!aux.covers(v))
          reject("ternary_ap_residual_sum: auxiliary window misses " + std::to_string(v));
        if (!aux.is_prime(v)) continue;
        s.add(weighted ? wp2.logp[i] * aux.logp(v) : 1.0);
      }
      inner_sum[i1] = s.value();
      cut[i1] = c;
    });
    for (u64 c : cut) rep.cutoff_terms += c;

    double density = 0.0;
    if (!weighted) density = quadrature::h_integral(X1d, X2d, Y1d, nd);
    const double scale = weighted ? Y1d * Y2d : density;
    (void)gblab::detail::cubic_log_product(pmax);  // warm the shared cache before parallel rows
    parallel_for(Q, workers, [&](u64 qi) {
      const u64 q = qi + 1;
      std::vector<KahanSum> cls(q);
      for (std::size_t i1 = 0; i1 < n1; ++i1)
        cls[wp1.p[i1] % q].add(weighted ? wp1.logp[i1] * inner_sum[i1] : inner_sum[i1]);
      double value;
      if (max_over_a) {
        value = 0.0;
        for (u64 c = 0; c < q; ++c) {
          if (std::gcd(c, q) != 1) continue;
          const double main =
              ternary_one_ap(n, q, static_cast<i64>(c), pmax).value * scale;
          value = std::max(value, std::abs(cls[c].value() - main));
        }
      } else {
        const u64 ar = mod_norm(a, q);
        const double main = ternary_one_ap(n, q, a, pmax).value * scale;
        value = std::abs(cls[ar].value() - main);
      }
      rep.breakdown[qi].value = value;
    });
  }
  detail::finish_report(rep, Y1d * Y2d, Y2 > 0 ? std::log(Y2d) : 0.0);
  return rep;
}

/// Pair-correlation residuals: for every even shift r in (X1, X1+R] and every
/// modulus q <= Q, the worst admissible class a (reduced, with a - r also
/// reduced) of |pairs(r, q, a) - main|.  The pair equation is p2 + p3 = r
/// (goldbach) or p2 - p3 = r (twin) with p2 in (X2, X2+Y].  Rows are indexed
/// by r; normalization scale is R*Y.  Weighted mode only.
inline ExperimentReport pair_equation_residual_sum(u64 X1, u64 R, u64 X2, u64 Y, u64 Q,
                                                   PairEquation equation,
                                                   bool weighted = true,
                                                   u64 pmax = kDefaultPrimeCutoff,
                                                   double a_display = 3.0,
                                                   unsigned workers = 1) {
  if (Q == 0) reject("pair_equation_residual_sum: Q must be >= 1");
  if (!weighted)
    reject("pair_equation_residual_sum: no unweighted main-term form is defined");
  ExperimentReport rep;
  rep.kind = equation == PairEquation::goldbach ? Kind::conjecture_goldbach
                                                : Kind::conjecture_twin;
  rep.a_display = a_display;
  const double Yd = static_cast<double>(Y), Rd = static_cast<double>(R),
               X2d = static_cast<double>(X2);
  if (Y > X2) rep.warnings.push_back("window length Y exceeds X2");
  if (X2 > 0 && static_cast<double>(Q) > Yd / std::sqrt(X2d))
    rep.warnings.push_back("modulus bound Q exceeds Y/sqrt(X2)");

  // Even shifts in (X1, X1+R], ascending.
  std::vector<u64> shifts;
  for (u64 r = X1 + 1 + ((X1 + 1) % 2); r <= X1 + R; r += 2) shifts.push_back(r);

  rep.breakdown.resize(shifts.size());
  for (std::size_t ri = 0; ri < shifts.size(); ++ri) rep.breakdown[ri] = {shifts[ri], 0.0};
  if (!shifts.empty() && Y > 0) {
    const PrimeWindow w2 = sieve_window(X2, Y, workers);
    const auto wp2 = detail::weighted_primes(w2);
    i64 lo, hi;
    if (equation == PairEquation::goldbach) {
      lo = static_cast<i64>(shifts.front()) - static_cast<i64>(X2 + Y);
      hi = static_cast<i64>(shifts.back()) - static_cast<i64>(X2 + 1);
    } else {
      lo = static_cast<i64>(X2 + 1) - static_cast<i64>(shifts.back());
      hi = static_cast<i64>(X2 + Y) - static_cast<i64>(shifts.front());
    }
    const detail::LogTable aux = detail::aux_table(lo, hi, workers);
    (void)gblab::detail::twin_log_product(pmax);  // warm the shared cache before parallel rows
    std::vector<u64> cut(shifts.size(), 0);

    parallel_for(shifts.size(), workers, [&](u64 ri) {
      const u64 r = shifts[ri];
      // Pair hits (p2, log p2 * log p3) for this shift, then per-q class sums.
      std::vector<u64> hit_p;
      std::vector<double> hit_w;
      u64 c = 0;
      for (std::size_t i = 0; i < wp2.p.size(); ++i) {
        const i64 p3 = equation == PairEquation::goldbach
                           ? static_cast<i64>(r) - static_cast<i64>(wp2.p[i])
                           : static_cast<i64>(wp2.p[i]) - static_cast<i64>(r);
        if (p3 < 2) {
          ++c;
          continue;
        }
        const u64 v = static_cast<u64>(p3);
        if (!aux.covers(v))
          reject("pair_equation_residual_sum: auxiliary window misses " +
                 std::to_string(v));
        if (!aux.is_prime(v)) continue;
        hit_p.push_back(wp2.p[i]);
        hit_w.push_back(wp2.logp[i] * aux.logp(v));
      }
      cut[ri] = c;
      KahanSum row;
      for (u64 q = 1; q <= Q; ++q) {
        std::vector<KahanSum> cls(q);
        for (std::size_t i = 0; i < hit_p.size(); ++i) cls[hit_p[i] % q].add(hit_w[i]);
        // The admissible-class main term is constant: find one admissible a.
        double main = 0.0;
        bool any = false;
        for (u64 cand = 0; cand < q; ++cand) {
          if (std::gcd(cand, q) != 1) continue;
          const u64 shifted = mod_norm(static_cast<i64>(cand) - static_cast<i64>(r), q);
          if (std::gcd(shifted, q) != 1) continue;
          if (!any) {
            main = binary_sing_ap(static_cast<i64>(r), q, static_cast<i64>(cand), pmax)
                       .value *
                   Yd;
            any = true;
            break;
          }
        }
        double worst = 0.0;
        for (u64 cand = 0; cand < q; ++cand) {
          if (std::gcd(cand, q) != 1) continue;
          const u64 shifted = mod_norm(static_cast<i64>(cand) - static_cast<i64>(r), q);
          if (std::gcd(shifted, q) != 1) continue;
          worst = std::max(worst, std::abs(cls[cand].value() - main));
        }
        row.add(worst);
      }
      rep.breakdown[ri] = {r, row.value()};
    });
    for (u64 c : cut) rep.cutoff_terms += c;
  }
  detail::finish_report(rep, Rd * Yd, Y > 0 ? std::log(Yd) : 0.0);
  return rep;
}

// ---------------------------------------------------------------------------
// Norm-envelope ratio checks
// ---------------------------------------------------------------------------

namespace detail {

/// Deterministic unit-interval stream for the envelope trials: fixed 64-bit
/// linear congruential step, top 53 bits as the mantissa.  Frozen so recorded
/// reference values are portable.
struct UnitStream {
  u64 state;
  explicit UnitStream(u64 seed) : state(seed) {}
  double next() {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state >> 11) * 0x1.0p-53;
  }
};

inline double l2_norm(const std::vector<std::complex<double>>& v) {
  KahanSum s;
  for (const auto& z : v) s.add(z.real() * z.real() + z.imag() * z.imag());
  return std::sqrt(s.value());
}

}  // namespace detail

/// Ratio of the dyadic progression-sum aggregate against its norm envelope
/// for one explicit vector v of length N (entry j belongs to n = M+1+j).
/// kind lemma1 uses the fixed residue a and envelope
/// sqrt(N + Q^(2/3) M^(1/3)) * log(M+1)^(3/2) * |v|_2; kind lemma2 takes the
/// worst residue class per modulus against sqrt(N log(Q+1) + Q^2) * |v|_2.
/// Moduli run over the dyadic block Q <= q < 2Q.  A zero vector gives 0.
inline double hm_lemma_ratio_for(Kind kind, const std::vector<std::complex<double>>& v,
                                 u64 M, u64 N, u64 Q, i64 a) {
  if (kind != Kind::lemma1 && kind != Kind::lemma2)
    reject("hm_lemma_ratio_for: kind must be lemma1 or lemma2");
  if (Q < 1) reject("hm_lemma_ratio_for: Q must be >= 1");
  if (N == 0) reject("hm_lemma_ratio_for: N must be >= 1");
  if (kind == Kind::lemma1) {
    if (Q > M) reject("hm_lemma_ratio_for: Q must be <= M");
    if (N > M) reject("hm_lemma_ratio_for: N must be <= M");
    if (a > static_cast<i64>(M)) reject("hm_lemma_ratio_for: M must be >= a");
  } else {
    if (M < 2 || N < 2) reject("hm_lemma_ratio_for: M and N must be >= 2");
  }
  if (v.size() != N) reject("hm_lemma_ratio_for: vector length must equal N");

  const double norm = detail::l2_norm(v);
  if (norm == 0.0) return 0.0;

  KahanSum lhs;
  for (u64 q = Q; q < 2 * Q; ++q) {
    if (kind == Kind::lemma1) {
      const u64 ar = mod_norm(a, q);
      KahanSum re, im;
      // First index j with M+1+j = ar (mod q).
      const u64 m1 = (M + 1) % q;
      const u64 j0 = ar >= m1 ? ar - m1 : ar + q - m1;
      for (u64 j = j0; j < N; j += q) {
        re.add(v[j].real());
        im.add(v[j].imag());
      }
      lhs.add(std::hypot(re.value(), im.value()));
    } else {
      std::vector<KahanSum> re(q), im(q);
      for (u64 j = 0; j < N; ++j) {
        const u64 cls = (M + 1 + j) % q;
        re[cls].add(v[j].real());
        im[cls].add(v[j].imag());
      }
      double worst = 0.0;
      for (u64 c = 0; c < q; ++c)
        worst = std::max(worst, std::hypot(re[c].value(), im[c].value()));
      lhs.add(worst);
    }
  }

  const double Md = static_cast<double>(M), Nd = static_cast<double>(N),
               Qd = static_cast<double>(Q);
  double envelope;
  if (kind == Kind::lemma1)
    envelope = std::sqrt(Nd + std::pow(Qd, 2.0 / 3.0) * std::cbrt(Md)) *
               std::pow(std::log(Md + 1.0), 1.5) * norm;
  else
    envelope = std::sqrt(Nd * std::log(Qd + 1.0) + Qd * Qd) * norm;
  return lhs.value() / envelope;
}

namespace detail {

/// Runs the seeded trials and reports the worst ratio with its trial index.
inline std::pair<double, u64> lemma_trials(Kind kind, u64 M, u64 N, u64 Q, i64 a,
                                           u64 trials, u64 seed) {
  if (trials == 0) reject("hm_lemma_ratio: trials must be >= 1");
  UnitStream rng(seed);
  double best = 0.0;
  u64 best_trial = 0;
  std::vector<std::complex<double>> v(N);
  for (u64 t = 0; t < trials; ++t) {
    for (u64 j = 0; j < N; ++j) {
      const double re = rng.next();
      const double im = rng.next();
      v[j] = {re, im};
    }
    const double ratio = hm_lemma_ratio_for(kind, v, M, N, Q, a);
    if (ratio > best) {
      best = ratio;
      best_trial = t;
    }
  }
  return {best, best_trial};
}

}  // namespace detail

/// Worst envelope ratio over `trials` pseudo-random unit-box complex vectors
/// drawn from one seeded stream (real then imaginary part per entry, entries
/// ascending, trials back to back).
inline double hm_lemma_ratio(Kind kind, u64 M, u64 N, u64 Q, i64 a, u64 trials,
                             u64 rng_seed) {
  return detail::lemma_trials(kind, M, N, Q, a, trials, rng_seed).first;
}

// ---------------------------------------------------------------------------
// Dispatch and decay ladders
// ---------------------------------------------------------------------------

/// Runs the measurement a spec describes.  Degenerate window parameters give
/// zero-valued reports; malformed domains (zero moduli bounds, missing trial
/// counts) are rejected.
inline ExperimentReport run_experiment(const ExperimentSpec& spec, unsigned workers = 1) {
  switch (spec.kind) {
    case Kind::thm1:
      return ternary_double_ap_residual_sum(spec.n, spec.X1, spec.X2, spec.Y, spec.Q1,
                                            spec.Q2, spec.a1, spec.a2, spec.weighted,
                                            spec.pmax, spec.a_display, workers);
    case Kind::thm2:
      return ternary_ap_residual_sum(spec.n, spec.X1, spec.Y1, spec.X2, spec.Y2, spec.Q,
                                     spec.a, spec.max_over_a, spec.weighted, spec.pmax,
                                     spec.a_display, workers);
    case Kind::thm3_bv: {
      auto rep = ap_residual_sum(spec.X1, spec.Y, spec.Q, spec.a_display, workers);
      if (!spec.weighted)
        rep.warnings.push_back("weighted=false ignored: this kind is log-weighted");
      return rep;
    }
    case Kind::thm4_kawada:
      return goldbach_ap_residual_sum(spec.X1, spec.X2, spec.Y, spec.Q2, spec.a2,
                                      spec.weighted, spec.pmax, spec.a_display, workers);
    case Kind::thm5:
      return goldbach_double_ap_residual_sum(spec.X1, spec.X2, spec.Y, spec.Q1, spec.Q2,
                                             spec.a1, spec.a2, spec.weighted, spec.pmax,
                                             spec.a_display, workers);
    case Kind::thm6_variance:
      return goldbach_residual_variance(spec.X1, spec.R, spec.X2, spec.Y, spec.weighted,
                                        spec.pmax, spec.a_display, workers);
    case Kind::thm7:
      return goldbach_center_ap_residual_sum(spec.X1, spec.X2, spec.Y, spec.R, spec.Q,
                                             spec.a, spec.weighted, spec.pmax,
                                             spec.a_display, workers);
    case Kind::conjecture_goldbach:
    case Kind::conjecture_twin:
      return pair_equation_residual_sum(spec.X1, spec.R, spec.X2, spec.Y, spec.Q,
                                        spec.kind == Kind::conjecture_goldbach
                                            ? PairEquation::goldbach
                                            : PairEquation::twin,
                                        spec.weighted, spec.pmax, spec.a_display,
                                        workers);
    case Kind::lemma1:
    case Kind::lemma2: {
      ExperimentReport rep;
      rep.kind = spec.kind;
      rep.a_display = spec.a_display;
      const auto [ratio, trial] = detail::lemma_trials(spec.kind, spec.M, spec.N, spec.Q,
                                                       spec.a, spec.trials, spec.seed);
      rep.breakdown.push_back({trial, ratio});
      if (!spec.weighted)
        rep.warnings.push_back("weighted=false ignored: envelope ratios are unweighted");
      detail::finish_report(rep, 1.0, std::log(static_cast<double>(spec.M) + 1.0));
      return rep;
    }
  }
  reject("run_experiment: unknown kind");
}

/// One rung of a decay ladder.
struct DecayRow {
  u64 Y = 0;
  double normalized = 0.0;
  double ratio_to_prev = 0.0;  // this rung / previous rung; 0 on the first
  ExperimentReport report;
};

namespace detail {

inline u64 round_u64(double x) { return static_cast<u64>(std::llround(x)); }

/// Rescales a spec to a new driving length Y, coupling the other window
/// parameters so each kind keeps its intended shape across the ladder:
///   thm3_bv        X1 kept fixed, Q = max(1, Y / (10 sqrt(X1)))
///   thm4_kawada    X1 = Y^(1/0.9), X2 = 2 X1 - 2 Y          (Q2, a2 kept)
///   thm5           as thm4_kawada                            (Q1, a1 kept)
///   thm6_variance  X1 = Y^(1/0.9), X2 = 2 X1 - 2 Y, R = sqrt(Y)
///   thm7           X2 = Y^1.5, X1 = X2 + 2 Y, R = sqrt(Y)    (Q, a kept)
/// Other kinds have no frozen coupling rule and are rejected.
inline ExperimentSpec scale_for_decay(const ExperimentSpec& base, u64 Y) {
  ExperimentSpec s = base;
  s.Y = Y;
  const double Yd = static_cast<double>(Y);
  switch (base.kind) {
    case Kind::thm3_bv: {
      if (base.X1 == 0)
        reject("decay_report: thm3_bv keeps X1 fixed across the ladder and needs X1 >= 1");
      const double Xd = static_cast<double>(base.X1);
      s.Q = std::max<u64>(1, static_cast<u64>(Yd / (10.0 * std::sqrt(Xd))));
      return s;
    }
    case Kind::thm4_kawada:
    case Kind::thm5: {
      s.X1 = round_u64(std::pow(Yd, 1.0 / 0.9));
      s.X2 = 2 * s.X1 - 2 * Y;
      return s;
    }
    case Kind::thm6_variance: {
      s.X1 = round_u64(std::pow(Yd, 1.0 / 0.9));
      s.X2 = 2 * s.X1 - 2 * Y;
      s.R = round_u64(std::sqrt(Yd));
      return s;
    }
    case Kind::thm7: {
      s.X2 = round_u64(std::pow(Yd, 1.5));
      s.X1 = s.X2 + 2 * Y;
      s.R = round_u64(std::sqrt(Yd));
      return s;
    }
    default:
      reject(std::string("decay_report: no scale-coupling rule for kind ") +
             kind_name(base.kind));
  }
}

}  // namespace detail

/// Reruns the spec across a ladder of driving lengths Y, rescaling coupled
/// parameters per kind, and tabulates normalized values with successive
/// ratios.  The rows fold in ladder order, deterministically for any worker
/// count.
inline std::vector<DecayRow> decay_report(const ExperimentSpec& base,
                                          const std::vector<u64>& ladder,
                                          unsigned workers = 1) {
  if (ladder.empty()) reject("decay_report: ladder must not be empty");
  std::vector<DecayRow> rows;
  rows.reserve(ladder.size());
  for (u64 Y : ladder) {
    DecayRow row;
    row.Y = Y;
    row.report = run_experiment(detail::scale_for_decay(base, Y), workers);
    row.normalized = row.report.normalized;
    if (!rows.empty() && rows.back().normalized > 0.0)
      row.ratio_to_prev = row.normalized / rows.back().normalized;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace gblab::experiments
