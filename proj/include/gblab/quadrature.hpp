#pragma once

// Adaptive quadrature for the logarithmic main-term integrals.

#include <cmath>
#include <string>
#include <utility>

#include "gblab/common.hpp"

namespace gblab::quadrature {

inline constexpr double kDefaultRelTol = 1e-8;
inline constexpr int kMaxDepth = 40;

namespace detail {

// One Simpson panel over [a, b] given the three endpoint/midpoint values.
inline double simpson_panel(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double simpson_rec(const F& f, double a, double b, double eps, double whole,
                   double fa, double fm, double fb, int depth) {
  const double m  = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left  = simpson_panel(a, m, fa, flm, fm);
  const double right = simpson_panel(m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps) {
    return left + right + delta / 15.0;
  }
  return simpson_rec(f, a, m, 0.5 * eps, left, fa, flm, fm, depth - 1) +
         simpson_rec(f, m, b, 0.5 * eps, right, fm, frm, fb, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson integral of f over [a, b] to relative tolerance rel_tol.
/// Degenerate or reversed intervals are rejected, not clamped.
template <typename F>
double adaptive_simpson(F&& f, double a, double b,
                        double rel_tol = kDefaultRelTol) {
  if (!(a < b)) {
    reject("adaptive_simpson: empty integration interval [" +
           std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = detail::simpson_panel(a, b, fa, fm, fb);
  // Relative tolerance anchored on the first estimate, with a small
  // absolute floor so near-zero integrals still terminate.
  const double eps = rel_tol * std::max(std::abs(whole), 1e-300);
  return detail::simpson_rec(f, a, b, eps, whole, fa, fm, fb, kMaxDepth);
}

namespace detail {

// Guards one log argument: every point of the domain must keep it > 1.
inline void require_log_domain(const char* name, double lowest) {
  if (!(lowest > 1.0)) {
    reject(std::string("integral domain violation: ") + name +
           " reaches " + std::to_string(lowest) +
           " but must stay > 1 over the whole range");
  }
}

}  // namespace detail

/// Integral over t in [X2, X2+Y] of dt / (log t * log(k1 - t)).
inline double binary_h_integral(double X2, double Y, double k1) {
  if (!(Y > 0.0)) reject("binary_h_integral: Y must be positive");
  detail::require_log_domain("t", X2);
  detail::require_log_domain("k1 - t", k1 - X2 - Y);
  auto f = [k1](double t) { return 1.0 / (std::log(t) * std::log(k1 - t)); };
  return adaptive_simpson(f, X2, X2 + Y);
}

/// Nested integral over v in [X1, X1+Y], t in [X2, X2+Y] of
/// dv dt / (log v * log t * log(n - v - t)).
inline double h_integral(double X1, double X2, double Y, double n) {
  if (!(Y > 0.0)) reject("h_integral: Y must be positive");
  detail::require_log_domain("v", X1);
  detail::require_log_domain("t", X2);
  detail::require_log_domain("n - v - t", n - (X1 + Y) - (X2 + Y));
  auto outer = [X2, Y, n](double v) {
    auto inner = [v, n](double t) {
      return 1.0 / (std::log(t) * std::log(n - v - t));
    };
    // Inner pass runs a notch tighter so its error does not dominate the
    // outer tolerance.
    return adaptive_simpson(inner, X2, X2 + Y, 1e-9) / std::log(v);
  };
  return adaptive_simpson(outer, X1, X1 + Y);
}

}  // namespace gblab::quadrature
