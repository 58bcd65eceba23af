#pragma once

#include <optional>

#include "diag/rational.hpp"

namespace diag {

// Certified bounds on a real number: exact rational, rational interval, or a signed infinity.
// Interval endpoints are always true bounds; operations are outward-rounding (here: exact).
struct CertifiedValue {
  enum class Kind { Exact, Interval, PlusInf, MinusInf };
  Kind kind = Kind::Exact;
  Rat lo, hi;  // Exact: lo == hi. Interval: lo <= hi. Infinities: unused.

  CertifiedValue() = default;
  static CertifiedValue exact(Rat v) {
    CertifiedValue c;
    c.kind = Kind::Exact;
    c.lo = v;
    c.hi = std::move(v);
    return c;
  }
  static CertifiedValue interval(Rat a, Rat b) {
    if (a > b) throw std::domain_error("CertifiedValue: lo > hi");
    if (a == b) return exact(std::move(a));
    CertifiedValue c;
    c.kind = Kind::Interval;
    c.lo = std::move(a);
    c.hi = std::move(b);
    return c;
  }
  static CertifiedValue plus_inf() { CertifiedValue c; c.kind = Kind::PlusInf; return c; }
  static CertifiedValue minus_inf() { CertifiedValue c; c.kind = Kind::MinusInf; return c; }

  bool is_exact() const { return kind == Kind::Exact; }
  bool is_interval() const { return kind == Kind::Interval; }
  bool is_finite() const { return kind == Kind::Exact || kind == Kind::Interval; }
  bool is_plus_inf() const { return kind == Kind::PlusInf; }
  bool is_minus_inf() const { return kind == Kind::MinusInf; }
  const Rat& exact_value() const {
    if (!is_exact()) throw std::domain_error("CertifiedValue: not exact");
    return lo;
  }
  Rat width() const { return is_interval() ? Rat(hi - lo) : Rat(0); }

  std::string str() const;
};

CertifiedValue operator+(const CertifiedValue& a, const CertifiedValue& b);
CertifiedValue operator-(const CertifiedValue& a, const CertifiedValue& b);
CertifiedValue operator-(const CertifiedValue& a);
CertifiedValue operator*(const Rat& c, const CertifiedValue& a);

// a >= b, a > b, a == b as certified three-valued predicates.
Tri cv_ge(const CertifiedValue& a, const CertifiedValue& b);
Tri cv_gt(const CertifiedValue& a, const CertifiedValue& b);
Tri cv_eq(const CertifiedValue& a, const CertifiedValue& b);
// sign(a) >= 0 / > 0 / == 0.
inline Tri cv_nonneg(const CertifiedValue& a) { return cv_ge(a, CertifiedValue::exact(Rat(0))); }
inline Tri cv_pos(const CertifiedValue& a) { return cv_gt(a, CertifiedValue::exact(Rat(0))); }
inline Tri cv_zero(const CertifiedValue& a) { return cv_eq(a, CertifiedValue::exact(Rat(0))); }

// True if the two certifications are consistent (their ranges intersect).
bool cv_consistent(const CertifiedValue& a, const CertifiedValue& b);

struct RatInterval {
  Rat lo, hi;
};

// Certified bounds on base^expo for base > 0, rational expo, absolute error <= 2^-bits scale.
// Exact (lo == hi) whenever expo is an integer.
RatInterval pow_bounds(const Rat& base, const Rat& expo, unsigned bits = 96);

// floor(x^(1/k)) for x >= 0, k >= 1.
Int iroot_floor(const Int& x, unsigned long k);

// sign of base_a^exp_a - base_b^exp_b for positive rational bases and rational
// exponents; exact, by cross-raising both sides to the lcm denominator. Returns -1, 0, 1.
int compare_pow(const Rat& base_a, const Rat& exp_a, const Rat& base_b, const Rat& exp_b);

}  // namespace diag
