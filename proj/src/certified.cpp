#include "diag/certified.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace diag {

std::string rat_str(const Rat& q) {
  Int n = numerator(q), d = denominator(q);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

Rat parse_rat(const std::string& s) {
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.empty()) throw std::invalid_argument("parse_rat: empty");
  auto slash = t.find('/');
  if (slash != std::string::npos) {
    Int n(t.substr(0, slash)), d(t.substr(slash + 1));
    if (d == 0) throw std::invalid_argument("parse_rat: zero denominator");
    return Rat(n, d);
  }
  auto dot = t.find('.');
  if (dot == std::string::npos) return Rat(Int(t));
  std::string head = t.substr(0, dot), frac = t.substr(dot + 1);
  bool neg = !head.empty() && head[0] == '-';
  if (neg) head = head.substr(1);
  if (head.empty()) head = "0";
  if (frac.empty()) frac = "0";
  Int den = pow(Int(10), static_cast<unsigned long>(frac.size()));
  Int num = Int(head) * den + Int(frac);
  Rat r(num, den);
  return neg ? Rat(-r) : r;
}

std::string CertifiedValue::str() const {
  switch (kind) {
    case Kind::PlusInf: return "+inf";
    case Kind::MinusInf: return "-inf";
    case Kind::Exact: return rat_str(lo);
    default: return "[" + rat_str(lo) + ", " + rat_str(hi) + "]";
  }
}

CertifiedValue operator+(const CertifiedValue& a, const CertifiedValue& b) {
  using K = CertifiedValue::Kind;
  if (a.kind == K::PlusInf || b.kind == K::PlusInf) {
    if (a.kind == K::MinusInf || b.kind == K::MinusInf)
      throw std::domain_error("CertifiedValue: inf - inf");
    return CertifiedValue::plus_inf();
  }
  if (a.kind == K::MinusInf || b.kind == K::MinusInf) return CertifiedValue::minus_inf();
  return CertifiedValue::interval(a.lo + b.lo, a.hi + b.hi);
}

CertifiedValue operator-(const CertifiedValue& a) {
  using K = CertifiedValue::Kind;
  if (a.kind == K::PlusInf) return CertifiedValue::minus_inf();
  if (a.kind == K::MinusInf) return CertifiedValue::plus_inf();
  return CertifiedValue::interval(-a.hi, -a.lo);
}

CertifiedValue operator-(const CertifiedValue& a, const CertifiedValue& b) { return a + (-b); }

CertifiedValue operator*(const Rat& c, const CertifiedValue& a) {
  using K = CertifiedValue::Kind;
  if (c == 0) return CertifiedValue::exact(Rat(0));
  if (a.kind == K::PlusInf) return c > 0 ? CertifiedValue::plus_inf() : CertifiedValue::minus_inf();
  if (a.kind == K::MinusInf) return c > 0 ? CertifiedValue::minus_inf() : CertifiedValue::plus_inf();
  if (c > 0) return CertifiedValue::interval(c * a.lo, c * a.hi);
  return CertifiedValue::interval(c * a.hi, c * a.lo);
}

Tri cv_ge(const CertifiedValue& a, const CertifiedValue& b) {
  using K = CertifiedValue::Kind;
  if (a.kind == K::PlusInf) return Tri::True;
  if (b.kind == K::MinusInf) return Tri::True;
  if (a.kind == K::MinusInf) return tri_of(b.kind == K::MinusInf);
  if (b.kind == K::PlusInf) return Tri::False;
  if (a.lo >= b.hi) return Tri::True;
  if (a.hi < b.lo) return Tri::False;
  return Tri::Unknown;
}

Tri cv_gt(const CertifiedValue& a, const CertifiedValue& b) {
  using K = CertifiedValue::Kind;
  if (a.kind == K::PlusInf) return tri_of(b.kind != K::PlusInf);
  if (a.kind == K::MinusInf) return Tri::False;
  if (b.kind == K::PlusInf) return Tri::False;
  if (b.kind == K::MinusInf) return Tri::True;
  if (a.lo > b.hi) return Tri::True;
  if (a.hi <= b.lo) return Tri::False;
  return Tri::Unknown;
}

Tri cv_eq(const CertifiedValue& a, const CertifiedValue& b) {
  using K = CertifiedValue::Kind;
  bool ai = !a.is_finite(), bi = !b.is_finite();
  if (ai || bi) return tri_of(a.kind == b.kind);
  if (a.is_exact() && b.is_exact()) return tri_of(a.lo == b.lo);
  if (a.hi < b.lo || b.hi < a.lo) return Tri::False;
  return Tri::Unknown;
}

bool cv_consistent(const CertifiedValue& a, const CertifiedValue& b) {
  if (!a.is_finite() || !b.is_finite()) return a.kind == b.kind;
  return !(a.hi < b.lo || b.hi < a.lo);
}

Int iroot_floor(const Int& x, unsigned long k) {
  if (x < 0) throw std::domain_error("iroot_floor: negative");
  if (k == 0) throw std::domain_error("iroot_floor: zeroth root");
  if (k == 1 || x <= 1) return x;
  // Newton iteration from an overestimate; k-th root by bit length.
  unsigned long bits = msb(x) + 1;
  Int r = Int(1) << (bits / k + 1);
  while (true) {
    Int rk1 = pow(r, static_cast<unsigned long>(k - 1));
    Int next = ((k - 1) * r + x / rk1) / k;
    if (next >= r) break;
    r = next;
  }
  while (pow(r, k) > x) --r;
  while (pow(r + 1, k) <= x) ++r;
  return r;
}

RatInterval pow_bounds(const Rat& base, const Rat& expo, unsigned bits) {
  if (base <= 0) throw std::domain_error("pow_bounds: base must be positive");
  Int p = numerator(expo), q = denominator(expo);
  if (q == 1) {
    Rat v = pow_rat(base, p);
    return {v, v};
  }
  // base^(p/q) = (base^p)^(1/q); bracket the integer q-th root at scale 2^bits.
  Rat y = pow_rat(base, p);
  unsigned long qq = static_cast<unsigned long>(q);
  Int S = Int(1) << bits;
  Int num = numerator(y) * pow(S, qq);
  Int X = num / denominator(y);
  Int z = iroot_floor(X, qq);
  return {Rat(z, S), Rat(z + 1, S)};
}

int compare_pow(const Rat& base_a, const Rat& exp_a, const Rat& base_b, const Rat& exp_b) {
  if (base_a <= 0 || base_b <= 0) throw std::domain_error("compare_pow: bases must be positive");
  Int qa = denominator(exp_a), qb = denominator(exp_b);
  Int L = lcm(qa, qb);
  Rat va = pow_rat(base_a, numerator(exp_a) * (L / qa));
  Rat vb = pow_rat(base_b, numerator(exp_b) * (L / qb));
  if (va < vb) return -1;
  if (va > vb) return 1;
  return 0;
}

}  // namespace diag
