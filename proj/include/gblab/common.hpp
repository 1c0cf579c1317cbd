#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gblab {

using u8  = std::uint8_t;
using u16 = std::uint16_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i32 = std::int32_t;
using i64 = std::int64_t;

inline constexpr double kPi         = 3.14159265358979323846264338327950288;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// Thrown when an operation rejects its inputs.  The CLI maps this to exit
/// code 1; everything else that escapes is an internal error (exit 2).
class precondition_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

[[noreturn]] inline void reject(const std::string& msg) {
  throw precondition_error(msg);
}

/// Kahan-compensated accumulator for long sums of small terms.
struct KahanSum {
  double sum   = 0.0;
  double carry = 0.0;

  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry    = (t - sum) - y;
    sum      = t;
  }
  double value() const { return sum; }
};

/// Integer square root, exact for the full 64-bit range.
inline u64 isqrt_u64(u64 n) {
  if (n == 0) return 0;
  u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && (r > 4294967295ULL || r * r > n)) --r;
  while (r < 4294967295ULL && (r + 1) * (r + 1) <= n) ++r;
  return r;
}

/// Smallest nonnegative representative of a mod q.
inline u64 mod_norm(i64 a, u64 q) {
  i64 m = a % static_cast<i64>(q);
  if (m < 0) m += static_cast<i64>(q);
  return static_cast<u64>(m);
}

}  // namespace gblab
