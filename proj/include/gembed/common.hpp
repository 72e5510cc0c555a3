#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gembed {

// Exact rational arithmetic for the small-cancellation thresholds and the
// embedding constant d.  All comparisons against word lengths go through
// cross-multiplication so no floating point enters a correctness decision.
struct Ratio {
  long long num = 0;
  long long den = 1;

  constexpr Ratio() = default;
  constexpr Ratio(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("Ratio: zero denominator");
    if (den < 0) { num = -num; den = -den; }
  }

  friend constexpr bool operator==(const Ratio& a, const Ratio& b) {
    return a.num * b.den == b.num * a.den;
  }
  friend constexpr bool operator<(const Ratio& a, const Ratio& b) {
    return a.num * b.den < b.num * a.den;
  }
  friend constexpr bool operator<=(const Ratio& a, const Ratio& b) {
    return a.num * b.den <= b.num * a.den;
  }

  double value() const { return double(num) / double(den); }

  Ratio normalized() const {
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g == 0) return {0, 1};
    return {num / g, den / g};
  }

  std::string str() const {
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

// lhs < r * rhs, exact.
constexpr bool lt_scaled(long long lhs, Ratio r, long long rhs) {
  return lhs * r.den < r.num * rhs;
}
// lhs <= r * rhs, exact.
constexpr bool le_scaled(long long lhs, Ratio r, long long rhs) {
  return lhs * r.den <= r.num * rhs;
}
// lhs > r * rhs, exact.
constexpr bool gt_scaled(long long lhs, Ratio r, long long rhs) {
  return lhs * r.den > r.num * rhs;
}
// ceil(r * x) as integer.
constexpr long long ceil_scaled(Ratio r, long long x) {
  long long p = r.num * x;
  return (p + r.den - 1) / r.den;
}
// floor(r * x) as integer.
constexpr long long floor_scaled(Ratio r, long long x) {
  return (r.num * x) / r.den;
}

// The word/block family could not supply enough material; callers should
// re-enumerate with a larger bound.
struct family_exhausted_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A relator inventory was asked to answer a question beyond its generated
// syllable horizon.  Refusing is the sound behaviour.
struct under_generated_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An internal consistency guarantee backed by the star property failed;
// this signals corrupted input data (e.g. a Y-set violating uniqueness),
// never a user error.
struct data_integrity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A diagram surgery hit a configuration the implementation does not model.
struct unsupported_surgery_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gembed
