#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <compare>
#include <stdexcept>
#include <string>

namespace diag {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Rat rat(long num, long den = 1) { return Rat(Int(num), Int(den)); }

// q^e for integer e (e may be negative; q != 0 then).
inline Rat pow_rat(const Rat& q, const Int& e) {
  if (e == 0) return Rat(1);
  Int n = boost::multiprecision::numerator(q);
  Int d = boost::multiprecision::denominator(q);
  unsigned long k = static_cast<unsigned long>(abs(e));
  Int np = pow(n, k), dp = pow(d, k);
  if (e > 0) return Rat(np, dp);
  if (n == 0) throw std::domain_error("pow_rat: zero base, negative exponent");
  return Rat(dp, np);
}

inline bool is_integer(const Rat& q) { return boost::multiprecision::denominator(q) == 1; }

// floor(q), correct for negative q.
inline Int rat_floor(const Rat& q) {
  Int n = boost::multiprecision::numerator(q);
  Int d = boost::multiprecision::denominator(q);
  Int f = n / d;
  if (n < 0 && f * d != n) --f;
  return f;
}

// Extended natural: a count in N ∪ {∞}. Arithmetic saturates at ∞.
struct XNat {
  bool inf = false;
  Int v = 0;  // meaningful only when !inf

  XNat() = default;
  XNat(long n) : inf(false), v(n) {
    if (n < 0) throw std::domain_error("XNat: negative");
  }
  XNat(Int n) : inf(false), v(std::move(n)) {
    if (v < 0) throw std::domain_error("XNat: negative");
  }
  static XNat infinity() { XNat x; x.inf = true; return x; }

  bool is_inf() const { return inf; }
  const Int& value() const {
    if (inf) throw std::domain_error("XNat: value of infinity");
    return v;
  }

  friend XNat operator+(const XNat& a, const XNat& b) {
    if (a.inf || b.inf) return infinity();
    return XNat(a.v + b.v);
  }
  // Truncated subtraction; a - ∞ is only valid when a is ∞ (result 0 by convention not needed; forbid).
  friend XNat operator-(const XNat& a, const XNat& b) {
    if (b.inf) throw std::domain_error("XNat: subtracting infinity");
    if (a.inf) return infinity();
    if (a.v < b.v) throw std::domain_error("XNat: negative difference");
    return XNat(a.v - b.v);
  }
  friend bool operator==(const XNat& a, const XNat& b) {
    if (a.inf || b.inf) return a.inf && b.inf;
    return a.v == b.v;
  }
  friend bool operator<(const XNat& a, const XNat& b) {
    if (a.inf) return false;
    if (b.inf) return true;
    return a.v < b.v;
  }
  friend bool operator<=(const XNat& a, const XNat& b) { return a < b || a == b; }
  friend bool operator>(const XNat& a, const XNat& b) { return b < a; }
  friend bool operator>=(const XNat& a, const XNat& b) { return b <= a; }

  std::string str() const { return inf ? "inf" : v.str(); }
};

inline XNat xmin(const XNat& a, const XNat& b) { return a < b ? a : b; }

// Three-valued logic for certified predicates.
enum class Tri { False, True, Unknown };

inline Tri tri_of(bool b) { return b ? Tri::True : Tri::False; }
inline Tri tri_and(Tri a, Tri b) {
  if (a == Tri::False || b == Tri::False) return Tri::False;
  if (a == Tri::Unknown || b == Tri::Unknown) return Tri::Unknown;
  return Tri::True;
}
inline Tri tri_not(Tri a) {
  if (a == Tri::Unknown) return Tri::Unknown;
  return a == Tri::True ? Tri::False : Tri::True;
}
inline const char* tri_name(Tri t) {
  switch (t) {
    case Tri::True: return "holds";
    case Tri::False: return "fails";
    default: return "unknown";
  }
}

std::string rat_str(const Rat& q);
Rat parse_rat(const std::string& s);

}  // namespace diag
