#pragma once

// Sieve-parameter calculator: the iterated-log constant Lambda_s, the
// admissibility inequality r > rhs(kappa, zeta, mu, nu), and the derived
// feasibility thresholds for the short-interval corollaries.

#include <cmath>
#include <string>

#include "gblab/common.hpp"

namespace gblab::bounds {

inline constexpr double kDefaultNuKappa2 = 4.42;
inline constexpr double kGridStep = 1e-4;

/// Lambda_s = s + 1 - log(4/(1 + 3^-s)) / log 3.
inline double lambda_s(u64 s) {
  if (s < 1) reject("lambda_s: s must be >= 1");
  const double t = std::pow(3.0, -static_cast<double>(s));
  return static_cast<double>(s) + 1.0 -
         std::log(4.0 / (1.0 + t)) / std::log(3.0);
}

/// Right-hand side of the admissibility inequality:
/// (1+zeta)*mu - 1 + (kappa+zeta)*log(nu/zeta) - kappa - zeta*(mu-kappa)/nu.
inline double hr_rhs(double kappa, double zeta, double mu, double nu_kappa) {
  if (!(zeta > 0.0) || !(zeta < nu_kappa)) {
    reject("hr_rhs: zeta must lie strictly between 0 and nu_kappa (zeta = " +
           std::to_string(zeta) + ", nu_kappa = " + std::to_string(nu_kappa) +
           ")");
  }
  return (1.0 + zeta) * mu - 1.0 +
         (kappa + zeta) * std::log(nu_kappa / zeta) - kappa -
         zeta * (mu - kappa) / nu_kappa;
}

/// Result of minimizing hr_rhs over zeta: the smallest admissible integer r
/// (strictly above the minimum) and the minimizing zeta.
struct MinRResult {
  i64 r = 1;
  double zeta_star = 0.0;
  double rhs_min = 0.0;
};

namespace detail {

// Golden-section minimization of f on [a, b] (f unimodal near the optimum).
template <typename F>
double golden_min(F&& f, double a, double b) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > 1e-12 * (1.0 + std::abs(a) + std::abs(b))) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// Minimizes hr_rhs over zeta on a 10^5-point grid in
/// (1e-4, nu_kappa - 1e-4) with golden-section refinement around the grid
/// argmin; r is the smallest natural number strictly exceeding the minimum.
inline MinRResult min_r(double kappa, double mu, double nu_kappa) {
  if (!(nu_kappa > 2e-4)) reject("min_r: nu_kappa too small for the zeta grid");
  constexpr int kGridPoints = 100000;
  const double lo = 1e-4;
  const double hi = nu_kappa - 1e-4;
  const double step = (hi - lo) / (kGridPoints - 1);
  auto f = [&](double z) { return hr_rhs(kappa, z, mu, nu_kappa); };

  int best_i = 0;
  double best = f(lo);
  for (int i = 1; i < kGridPoints; ++i) {
    const double v = f(lo + step * i);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  const double a = lo + step * (best_i > 0 ? best_i - 1 : 0);
  const double b = lo + step * (best_i < kGridPoints - 1 ? best_i + 1
                                                         : kGridPoints - 1);
  MinRResult out;
  out.zeta_star = detail::golden_min(f, a, b);
  out.rhs_min = std::min(best, f(out.zeta_star));
  const double fl = std::floor(out.rhs_min);
  out.r = static_cast<i64>(fl) + 1;
  if (out.r < 1) out.r = 1;
  return out;
}

/// mu required at interval exponent theta: mu(theta) = 4/(2*theta - 1).
inline double cor1_mu(double theta) {
  if (!(theta > 0.5)) {
    reject("cor1_mu: theta must exceed 1/2 (got " + std::to_string(theta) +
           ")");
  }
  return 4.0 / (2.0 * theta - 1.0);
}

/// Feasibility of a given theta for cor1: whether the minimal admissible r
/// at mu(theta) (plus a tiny margin, since the inequality on mu is strict)
/// stays within r_max.
inline bool cor1_feasible(double theta, i64 r_max = 9,
                          double nu_kappa = kDefaultNuKappa2,
                          double mu_margin = 1e-6) {
  return min_r(2.0, cor1_mu(theta) + mu_margin, nu_kappa).r <= r_max;
}

struct Cor1Thresholds {
  double theta_min = 0.0;
  double (*mu_of_theta)(double) = &cor1_mu;
};

// theta_min is a 3-decimal claim, so it is reported on a 1e-3 grid: the
// exact feasibility crossing sits between two adjacent millis and quoting
// finer digits would overstate the resolution of the underlying constants.
inline constexpr double kThetaReportGrid = 1e-3;

/// Smallest theta on the reporting grid that is cor1-feasible.  Feasibility
/// is monotone in theta (mu decreases, the rhs decreases with it), so the
/// first feasible grid point is found by bisection over grid indices.
inline Cor1Thresholds cor1_thresholds(i64 r_max = 9,
                                      double nu_kappa = kDefaultNuKappa2) {
  const double step = kThetaReportGrid;
  const i64 k_lo = static_cast<i64>(std::llround(0.5 / step)) + 1;
  const i64 k_hi = static_cast<i64>(std::llround(1.0 / step));
  if (!cor1_feasible(k_hi * step, r_max, nu_kappa)) {
    reject("cor1_thresholds: even theta = 1 is infeasible for r_max = " +
           std::to_string(r_max));
  }
  i64 lo = k_lo;  // may be infeasible
  i64 hi = k_hi;  // feasible
  if (cor1_feasible(lo * step, r_max, nu_kappa)) {
    return {lo * step, &cor1_mu};
  }
  while (hi - lo > 1) {
    const i64 mid = lo + (hi - lo) / 2;
    if (cor1_feasible(mid * step, r_max, nu_kappa)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {hi * step, &cor1_mu};
}

/// Interval exponent threshold solving 1/theta = (1 - 1/(2 theta)) Lambda_s:
/// theta* = 1/Lambda_s + 1/2.
inline double cor2_theta_threshold(u64 s) {
  return 1.0 / lambda_s(s) + 0.5;
}

/// Floor for eta solving (3/2 - 1/(2 eta)) Lambda_s = 1:
/// eta = 1/(3 - 2/Lambda_s).
inline double cor2_eta_floor(u64 s) {
  return 1.0 / (3.0 - 2.0 / lambda_s(s));
}

/// eta must exceed this for the first admissibility bullet at a given theta1.
inline double cor4_case1_threshold(double theta1) {
  if (!(theta1 > 0.0)) reject("cor4_case1_threshold: theta1 must be positive");
  return 1.0 / (1.0 + 1.0 / theta1);
}

/// theta1 must exceed this for the second admissibility bullet at a given
/// eta: 1/min(1/eta - 1, (3/2 - 1/(2 eta)) Lambda_s).
inline double cor4_case2_threshold(double eta, u64 s = 3) {
  if (!(eta > 0.0) || !(eta < 1.0)) {
    reject("cor4_case2_threshold: eta must lie in (0, 1)");
  }
  const double arm_eta = 1.0 / eta - 1.0;
  const double arm_lambda = (1.5 - 0.5 / eta) * lambda_s(s);
  const double m = std::min(arm_eta, arm_lambda);
  if (!(m > 0.0)) {
    reject("cor4_case2_threshold: min arm nonpositive at eta = " +
           std::to_string(eta));
  }
  return 1.0 / m;
}

enum class Cor4Binding { case1, case2_eta, case2_lambda, none };

inline const char* to_string(Cor4Binding b) {
  switch (b) {
    case Cor4Binding::case1: return "case1";
    case Cor4Binding::case2_eta: return "case2_eta";
    case Cor4Binding::case2_lambda: return "case2_lambda";
    default: return "none";
  }
}

struct Cor4Region {
  bool feasible = false;
  Cor4Binding binding = Cor4Binding::none;
  double threshold = 0.0;
};

/// Two-bullet admissibility test for the pair (eta, theta1):
///   bullet 1: 1 >= theta1 >= 0.861 and 1 >= eta > (1 + 1/theta1)^-1;
///   bullet 2: 0.5 >= eta >= 0.463 and
///             1 >= theta1 > 1/min(1/eta - 1, (3/2 - 1/(2 eta)) Lambda_s).
/// threshold reports the boundary of the bullet that applied (the eta bound
/// in case 1, the theta1 bound in case 2); if neither bullet's base range
/// holds it stays 0 with binding "none".
inline Cor4Region cor4_region(double eta, double theta1, u64 s = 3) {
  Cor4Region out;
  if (theta1 >= 0.861 && theta1 <= 1.0) {
    const double t = cor4_case1_threshold(theta1);
    out.threshold = t;
    if (eta > t && eta <= 1.0) {
      out.feasible = true;
      out.binding = Cor4Binding::case1;
      return out;
    }
  }
  if (eta >= 0.463 && eta <= 0.5) {
    const double arm_eta = 1.0 / eta - 1.0;
    const double arm_lambda = (1.5 - 0.5 / eta) * lambda_s(s);
    const double t = 1.0 / std::min(arm_eta, arm_lambda);
    out.threshold = t;
    if (theta1 > t && theta1 <= 1.0) {
      out.feasible = true;
      out.binding = arm_eta <= arm_lambda ? Cor4Binding::case2_eta
                                          : Cor4Binding::case2_lambda;
      return out;
    }
  }
  return out;
}

struct Cor4Infimum {
  double crossing_eta = 0.0;      // where the two min arms meet
  double value_at_crossing = 0.0; // theta1 bound right at the crossing
  double min_over_range = 0.0;    // smallest theta1 bound on [eta_lo, eta_hi]
  double argmin_eta = 0.0;
};

/// The case-2 theta1 bound as a function of eta has its global minimum where
/// the two min arms cross: eta* = (2 + Lambda_s)/(2 + 3 Lambda_s), where the
/// bound equals 1/Lambda_s + 1/2.  Also scans the stated eta range on a 1e-4
/// grid for the in-range minimum.
inline Cor4Infimum cor4_case2_infimum(u64 s = 3, double eta_lo = 0.463,
                                      double eta_hi = 0.5) {
  if (!(eta_lo < eta_hi)) reject("cor4_case2_infimum: empty eta range");
  const double lam = lambda_s(s);
  Cor4Infimum out;
  out.crossing_eta = (2.0 + lam) / (2.0 + 3.0 * lam);
  out.value_at_crossing = 1.0 / lam + 0.5;
  out.min_over_range = cor4_case2_threshold(eta_lo, s);
  out.argmin_eta = eta_lo;
  const i64 steps = static_cast<i64>(std::floor((eta_hi - eta_lo) / kGridStep));
  for (i64 k = 1; k <= steps; ++k) {
    const double eta = eta_lo + kGridStep * k;
    const double v = cor4_case2_threshold(std::min(eta, eta_hi), s);
    if (v < out.min_over_range) {
      out.min_over_range = v;
      out.argmin_eta = eta;
    }
  }
  return out;
}

}  // namespace gblab::bounds
