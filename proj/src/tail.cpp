#include "diag/tail.hpp"

#include <cmath>
#include <stdexcept>

namespace diag {

namespace {

// Interval helpers local to the certified summation code.
RatInterval iv(const Rat& v) { return {v, v}; }
RatInterval iv_add(const RatInterval& a, const RatInterval& b) { return {a.lo + b.lo, a.hi + b.hi}; }
RatInterval iv_sub(const RatInterval& a, const RatInterval& b) { return {a.lo - b.hi, a.hi - b.lo}; }
RatInterval iv_scale(const Rat& c, const RatInterval& a) {
  if (c >= 0) return {c * a.lo, c * a.hi};
  return {c * a.hi, c * a.lo};
}

Rat geo_head(const Rat& f, const Rat& r, const Int& n) {
  // f + f r + ... + f r^(n-1)
  if (n <= 0) return Rat(0);
  return f * (1 - pow_rat(r, n)) / (1 - r);
}

// Echo tail internals. g_k = f r^(k-1); dips sit at k = j^2 for j >= 3.
bool echo_is_dip(const Int& k) {
  if (k < 9) return false;
  Int j = iroot_floor(k, 2);
  return j * j == k && j >= 3;
}

Rat echo_eta(const Rat& f, const Rat& r, const Int& j) {
  // eta_j = g_{j^2+1} * 2^-j = f r^(j^2) 2^-j
  return f * pow_rat(r, j * j) * pow_rat(Rat(1, 2), j);
}

// Running deficit t_k = sum(g, 1..k) - sum(echo, 1..k).
Rat echo_deficit(const Rat& f, const Rat& r, const Int& k) {
  if (k <= 0) return Rat(0);
  if (k == 1) return f / 2;
  Rat gk = f * pow_rat(r, k - 1);
  if (echo_is_dip(k)) return gk - echo_eta(f, r, iroot_floor(k, 2));
  return gk;
}

Rat echo_term(const Rat& f, const Rat& r, const Int& k) {
  if (k <= 0) throw std::domain_error("echo term: k >= 1 required");
  if (k <= 2) return f / 2;
  Rat prev = f * pow_rat(r, k - 2);  // g_{k-1}
  if (echo_is_dip(k)) return prev + echo_eta(f, r, iroot_floor(k, 2));
  Int j = iroot_floor(k - 1, 2);
  if (j * j == k - 1 && j >= 3) return prev - echo_eta(f, r, j);
  return prev;
}

// Symbolic positive value c * base^e with integer base >= 1 and rational e <= 0.
struct TermSym {
  Rat c;
  Int base;
  Rat e;
};

TermSym term_sym(const TailComp& comp, const Int& k) {
  if (std::holds_alternative<GeometricTail>(comp)) {
    const auto& g = std::get<GeometricTail>(comp);
    return {g.first * pow_rat(g.ratio, k - 1), Int(1), Rat(0)};
  }
  if (std::holds_alternative<PowerTail>(comp)) {
    const auto& p = std::get<PowerTail>(comp);
    if (is_integer(p.exponent)) {
      return {p.coefficient * pow_rat(Rat(k + p.offset), -numerator(p.exponent)), Int(1), Rat(0)};
    }
    return {p.coefficient, k + p.offset, -p.exponent};
  }
  if (std::holds_alternative<EchoGeoTail>(comp)) {
    const auto& t = std::get<EchoGeoTail>(comp);
    return {echo_term(t.first, t.ratio, k), Int(1), Rat(0)};
  }
  throw std::domain_error("term of a zero tail");
}

int sym_cmp(const TermSym& a, const TermSym& b) {
  if (is_integer(a.e) && is_integer(b.e)) {
    Rat va = a.c * pow_rat(Rat(a.base), numerator(a.e));
    Rat vb = b.c * pow_rat(Rat(b.base), numerator(b.e));
    return va < vb ? -1 : (va > vb ? 1 : 0);
  }
  Int L = lcm(denominator(a.e), denominator(b.e));
  unsigned long l = static_cast<unsigned long>(L);
  Rat va = pow_rat(a.c, L) * pow_rat(Rat(a.base), numerator(a.e) * (L / denominator(a.e)));
  Rat vb = pow_rat(b.c, L) * pow_rat(Rat(b.base), numerator(b.e) * (L / denominator(b.e)));
  (void)l;
  return va < vb ? -1 : (va > vb ? 1 : 0);
}

}  // namespace

Precision Precision::level(int lvl) {
  Precision p;
  switch (lvl) {
    case 1:
      p.n_work = 10000;
      p.k_tail = 64;
      break;
    case 2:
      p.n_work = 100000;
      p.k_tail = 512;
      break;
    case 3:
      p.n_work = 1000000;
      p.k_tail = 16384;
      break;
    default:
      throw std::domain_error("precision level must be 1, 2 or 3");
  }
  return p;
}

void validate_comp(const TailComp& c) {
  if (std::holds_alternative<GeometricTail>(c)) {
    const auto& g = std::get<GeometricTail>(c);
    if (!(g.first > 0)) throw std::domain_error("geometric tail: first must be positive");
    if (!(g.ratio > 0 && g.ratio < 1)) throw std::domain_error("geometric tail: ratio in (0,1) required");
  } else if (std::holds_alternative<PowerTail>(c)) {
    const auto& p = std::get<PowerTail>(c);
    if (!(p.coefficient > 0)) throw std::domain_error("power tail: coefficient must be positive");
    if (!(p.exponent > 0)) throw std::domain_error("power tail: exponent must be positive");
    if (p.offset < 0) throw std::domain_error("power tail: offset must be nonnegative");
  } else if (std::holds_alternative<EchoGeoTail>(c)) {
    const auto& t = std::get<EchoGeoTail>(c);
    if (!(t.first > 0)) throw std::domain_error("echo tail: first must be positive");
    if (!(t.ratio > 0 && t.ratio <= Rat(1, 2)))
      throw std::domain_error("echo tail: ratio in (0,1/2] required");
  }
}

XNat comp_positive_count(const TailComp& c) {
  if (std::holds_alternative<ZeroTail>(c)) return XNat(0L);
  return XNat::infinity();
}

XNat comp_zero_count(const TailComp& c) {
  if (std::holds_alternative<ZeroTail>(c)) return std::get<ZeroTail>(c).count;
  return XNat(0L);
}

bool comp_summable(const TailComp& c) {
  if (std::holds_alternative<PowerTail>(c)) return std::get<PowerTail>(c).exponent > 1;
  return true;
}

bool comp_exact_terms(const TailComp& c) {
  if (std::holds_alternative<PowerTail>(c)) return is_integer(std::get<PowerTail>(c).exponent);
  return true;
}

Rat comp_term(const TailComp& c, const Int& k) {
  if (k < 1) throw std::domain_error("comp_term: k >= 1 required");
  if (!comp_exact_terms(c)) throw std::domain_error("comp_term: term is irrational");
  TermSym s = term_sym(c, k);
  return s.c * pow_rat(Rat(s.base), numerator(s.e));
}

RatInterval comp_term_bounds(const TailComp& c, const Int& k, unsigned bits) {
  if (comp_exact_terms(c)) {
    Rat v = comp_term(c, k);
    return {v, v};
  }
  const auto& p = std::get<PowerTail>(c);
  RatInterval b = pow_bounds(Rat(k + p.offset), -p.exponent, bits);
  return iv_scale(p.coefficient, b);
}

int comp_term_cmp(const TailComp& a, const Int& k, const TailComp& b, const Int& m) {
  return sym_cmp(term_sym(a, k), term_sym(b, m));
}

int comp_term_cmp_rat(const TailComp& a, const Int& k, const Rat& q) {
  if (q <= 0) return 1;
  return sym_cmp(term_sym(a, k), TermSym{q, Int(1), Rat(0)});
}

namespace {

// Largest k with pred(k) true, where pred is monotone (true then false); 0 if pred(1) false.
template <class Pred>
Int monotone_last(Pred pred) {
  if (!pred(Int(1))) return 0;
  Int lo = 1, hi = 2;
  while (pred(hi)) {
    lo = hi;
    hi *= 2;
    if (hi > (Int(1) << 256)) throw std::domain_error("count search: no boundary found");
  }
  // pred(lo) true, pred(hi) false
  while (hi - lo > 1) {
    Int mid = (lo + hi) / 2;
    if (pred(mid)) lo = mid;
    else hi = mid;
  }
  return lo;
}

}  // namespace

Int comp_count_ge(const TailComp& c, const Rat& q) {
  if (q <= 0) throw std::domain_error("count_ge: threshold must be positive");
  if (std::holds_alternative<ZeroTail>(c)) return 0;
  return monotone_last([&](const Int& k) { return comp_term_cmp_rat(c, k, q) >= 0; });
}

Int comp_count_gt(const TailComp& c, const Rat& q) {
  if (q <= 0) throw std::domain_error("count_gt: threshold must be positive");
  if (std::holds_alternative<ZeroTail>(c)) return 0;
  return monotone_last([&](const Int& k) { return comp_term_cmp_rat(c, k, q) > 0; });
}

Int comp_count_ge_term(const TailComp& c, const TailComp& ref, const Int& m) {
  if (std::holds_alternative<ZeroTail>(c)) return 0;
  return monotone_last([&](const Int& k) { return comp_term_cmp(c, k, ref, m) >= 0; });
}

Int comp_count_gt_term(const TailComp& c, const TailComp& ref, const Int& m) {
  if (std::holds_alternative<ZeroTail>(c)) return 0;
  return monotone_last([&](const Int& k) { return comp_term_cmp(c, k, ref, m) > 0; });
}

RatInterval ln_bounds(const Rat& x, unsigned terms) {
  if (x <= 0) throw std::domain_error("ln_bounds: positive argument required");
  // Reduce to [1, 2) by powers of two, then atanh series.
  long s = 0;
  Rat y = x;
  while (y >= 2) {
    y /= 2;
    ++s;
  }
  while (y < 1) {
    y *= 2;
    --s;
  }
  auto atanh_series = [&](const Rat& u) -> RatInterval {
    // 2 * sum u^(2k+1)/(2k+1), k < terms; remainder in [0, 2 u^(2T+1) / ((2T+1)(1-u^2))]
    Rat u2 = u * u, p = u, sum = 0;
    for (unsigned k = 0; k < terms; ++k) {
      sum += p / (2 * k + 1);
      p *= u2;
    }
    Rat rem = 2 * p / ((2 * terms + 1) * (1 - u2));
    return {2 * sum, 2 * sum + rem};
  };
  RatInterval ln_y = atanh_series((y - 1) / (y + 1));
  if (s == 0) return ln_y;
  RatInterval ln2 = atanh_series(Rat(1, 3));
  return iv_add(ln_y, iv_scale(Rat(s), ln2));
}

Rat sum_tree(std::vector<Rat> xs) {
  if (xs.empty()) return Rat(0);
  while (xs.size() > 1) {
    std::vector<Rat> next;
    next.reserve(xs.size() / 2 + 1);
    for (size_t i = 0; i + 1 < xs.size(); i += 2) next.push_back(xs[i] + xs[i + 1]);
    if (xs.size() % 2) next.push_back(xs.back());
    xs = std::move(next);
  }
  return xs[0];
}

CertifiedValue power_interval_sum(const Rat& c, const Rat& e, const Int& a,
                                  const std::optional<Int>& b, const Precision& prec) {
  if (a < 1) throw std::domain_error("power_interval_sum: a >= 1 required");
  if (!(e > 0)) throw std::domain_error("power_interval_sum: exponent must be positive");
  if (b && *b < a) return CertifiedValue::exact(Rat(0));
  if (!b && e <= 1) return CertifiedValue::plus_inf();

  const bool exact_terms = is_integer(e);
  unsigned bits = 72;

  // Point where the Euler-Maclaurin envelope (~ c e(e+1)(e+2) x^-(e+3) / 720) meets tol.
  double cd = c.convert_to<double>(), ed = e.convert_to<double>(), td = prec.tol.convert_to<double>();
  double scale = cd * ed * (ed + 1) * (ed + 2) / (720.0 * td);
  double m0d = scale > 1 ? std::pow(scale, 1.0 / (ed + 3.0)) : 1.0;
  long cap = std::max<long>(prec.k_tail, 512);
  long head_len = m0d > static_cast<double>(cap) ? cap : static_cast<long>(m0d) + 2;

  Int m = a - 1 + head_len;
  if (b && *b <= m) m = *b;

  // Exact (or per-term certified) head over x = a..m.
  RatInterval head{Rat(0), Rat(0)};
  {
    std::vector<Rat> los, his;
    for (Int x = a; x <= m; ++x) {
      if (exact_terms) {
        Rat t = pow_rat(Rat(x), -numerator(e));
        los.push_back(t);
        his.push_back(t);
      } else {
        RatInterval t = pow_bounds(Rat(x), -e, bits);
        los.push_back(t.lo);
        his.push_back(t.hi);
      }
    }
    head = {sum_tree(std::move(los)), sum_tree(std::move(his))};
  }

  RatInterval total = head;
  if (!b || *b > m) {
    // Euler-Maclaurin over x = A..B with f(x) = x^-e, f completely monotone:
    //   sum = I + (f(A)+f(B))/2 + (f'(B)-f'(A))/12 + R,  R in [T4, 0],
    //   T4 = -(f'''(B)-f'''(A))/720.
    Int A = m + 1;
    auto powiv = [&](const Int& x, const Rat& expo) -> RatInterval {
      if (is_integer(expo)) {
        Rat v = pow_rat(Rat(x), numerator(expo));
        return {v, v};
      }
      return pow_bounds(Rat(x), expo, bits);
    };
    RatInterval I{Rat(0), Rat(0)};
    RatInterval fA = powiv(A, -e);
    RatInterval fB{Rat(0), Rat(0)}, d1A = powiv(A, -e - 1), d1B{Rat(0), Rat(0)};
    RatInterval d3A = powiv(A, -e - 3), d3B{Rat(0), Rat(0)};
    if (b) {
      const Int& B = *b;
      fB = powiv(B, -e);
      d1B = powiv(B, -e - 1);
      d3B = powiv(B, -e - 3);
      if (e == 1) {
        I = ln_bounds(Rat(B) / Rat(A));
      } else {
        // (A^(1-e) - B^(1-e)) / (e-1)
        I = iv_scale(Rat(1) / (e - 1), iv_sub(powiv(A, 1 - e), powiv(B, 1 - e)));
      }
    } else {
      I = iv_scale(Rat(1) / (e - 1), powiv(A, 1 - e));
    }
    RatInterval em = iv_add(I, iv_scale(Rat(1, 2), iv_add(fA, fB)));
    em = iv_add(em, iv_scale(e / 12, iv_sub(d1A, d1B)));
    RatInterval t4 = iv_scale(-e * (e + 1) * (e + 2) / 720, iv_sub(d3A, d3B));
    em = iv_add(em, RatInterval{t4.lo < 0 ? t4.lo : Rat(0), t4.hi > 0 ? t4.hi : Rat(0)});
    total = iv_add(total, em);
  }
  RatInterval scaled = iv_scale(c, total);
  return CertifiedValue::interval(scaled.lo, scaled.hi);
}

CertifiedValue comp_head_sum(const TailComp& c, const Int& n, const Precision& prec) {
  if (n < 0) throw std::domain_error("comp_head_sum: n >= 0 required");
  if (n == 0) return CertifiedValue::exact(Rat(0));
  if (std::holds_alternative<ZeroTail>(c))
    throw std::domain_error("comp_head_sum: zero tail has no positive terms");
  if (std::holds_alternative<GeometricTail>(c)) {
    const auto& g = std::get<GeometricTail>(c);
    return CertifiedValue::exact(geo_head(g.first, g.ratio, n));
  }
  if (std::holds_alternative<EchoGeoTail>(c)) {
    const auto& t = std::get<EchoGeoTail>(c);
    return CertifiedValue::exact(geo_head(t.first, t.ratio, n) - echo_deficit(t.first, t.ratio, n));
  }
  const auto& p = std::get<PowerTail>(c);
  return power_interval_sum(p.coefficient, p.exponent, 1 + p.offset, Int(n + p.offset), prec);
}

CertifiedValue comp_total(const TailComp& c, const Precision& prec) {
  if (std::holds_alternative<ZeroTail>(c)) return CertifiedValue::exact(Rat(0));
  if (std::holds_alternative<GeometricTail>(c)) {
    const auto& g = std::get<GeometricTail>(c);
    return CertifiedValue::exact(g.first / (1 - g.ratio));
  }
  if (std::holds_alternative<EchoGeoTail>(c)) {
    const auto& t = std::get<EchoGeoTail>(c);
    return CertifiedValue::exact(t.first / (1 - t.ratio));
  }
  const auto& p = std::get<PowerTail>(c);
  return power_interval_sum(p.coefficient, p.exponent, 1 + p.offset, std::nullopt, prec);
}

bool comp_can_drop_head(const TailComp& c) {
  if (std::holds_alternative<GeometricTail>(c)) return true;
  if (std::holds_alternative<PowerTail>(c)) return is_integer(std::get<PowerTail>(c).exponent);
  return false;
}

TailComp comp_drop_head(const TailComp& c) {
  if (std::holds_alternative<GeometricTail>(c)) {
    const auto& g = std::get<GeometricTail>(c);
    return GeometricTail{g.first * g.ratio, g.ratio};
  }
  if (std::holds_alternative<PowerTail>(c)) {
    const auto& p = std::get<PowerTail>(c);
    if (!is_integer(p.exponent)) throw std::domain_error("drop_head: irrational head");
    return PowerTail{p.coefficient, p.exponent, p.offset + 1};
  }
  throw std::domain_error("drop_head: component is position-locked");
}

bool comp_equal(const TailComp& a, const TailComp& b) {
  if (a.index() != b.index()) return false;
  if (std::holds_alternative<ZeroTail>(a))
    return std::get<ZeroTail>(a).count == std::get<ZeroTail>(b).count;
  if (std::holds_alternative<GeometricTail>(a)) {
    const auto &x = std::get<GeometricTail>(a), &y = std::get<GeometricTail>(b);
    return x.first == y.first && x.ratio == y.ratio;
  }
  if (std::holds_alternative<PowerTail>(a)) {
    const auto &x = std::get<PowerTail>(a), &y = std::get<PowerTail>(b);
    return x.coefficient == y.coefficient && x.exponent == y.exponent && x.offset == y.offset;
  }
  const auto &x = std::get<EchoGeoTail>(a), &y = std::get<EchoGeoTail>(b);
  return x.first == y.first && x.ratio == y.ratio;
}

std::optional<TailComp> comp_rebase(const TailComp& c, const Int& consumed) {
  if (consumed == 0) return c;
  if (std::holds_alternative<GeometricTail>(c)) {
    const auto& g = std::get<GeometricTail>(c);
    return TailComp{GeometricTail{g.first * pow_rat(g.ratio, consumed), g.ratio}};
  }
  if (std::holds_alternative<PowerTail>(c)) {
    const auto& p = std::get<PowerTail>(c);
    return TailComp{PowerTail{p.coefficient, p.exponent, p.offset + consumed}};
  }
  return std::nullopt;
}

}  // namespace diag
