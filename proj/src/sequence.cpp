#include "diag/sequence.hpp"

#include <algorithm>
#include <stdexcept>

namespace diag {

namespace {

bool comp_has_positive_terms(const TailComp& c) { return !std::holds_alternative<ZeroTail>(c); }

XNat tail_zero_comps(const TailSpec& t) {
  XNat z(0L);
  for (const auto& c : t.comps) z = z + comp_zero_count(c);
  return z;
}

long nonzero_comp_count(const TailSpec& t) {
  long n = 0;
  for (const auto& c : t.comps)
    if (comp_has_positive_terms(c)) ++n;
  return n;
}

// A selection source: either the sorted prefix or one tail component.
struct Src {
  const std::vector<Rat>* pre = nullptr;
  const TailComp* comp = nullptr;
};

std::vector<Src> sources(const PosStream& ps) {
  std::vector<Src> out;
  if (!ps.prefix.empty()) out.push_back({&ps.prefix, nullptr});
  for (const auto& c : ps.comps)
    if (comp_has_positive_terms(c)) out.push_back({nullptr, &c});
  return out;
}

XNat src_count(const Src& s) {
  if (s.pre) return XNat(Int(s.pre->size()));
  return XNat::infinity();
}

// sign of (ia-th term of a) - (ib-th term of b); 1-based indices.
int src_cmp(const Src& a, const Int& ia, const Src& b, const Int& ib) {
  if (a.pre && b.pre) {
    const Rat& x = (*a.pre)[ia.convert_to<size_t>() - 1];
    const Rat& y = (*b.pre)[ib.convert_to<size_t>() - 1];
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  if (a.pre) return -comp_term_cmp_rat(*b.comp, ib, (*a.pre)[ia.convert_to<size_t>() - 1]);
  if (b.pre) return comp_term_cmp_rat(*a.comp, ia, (*b.pre)[ib.convert_to<size_t>() - 1]);
  return comp_term_cmp(*a.comp, ia, *b.comp, ib);
}

// Count of terms of s that are >= (resp. >) the ref term; prefix is nonincreasing.
Int pre_count_rel(const std::vector<Rat>& pre, const Src& ref, const Int& ridx, bool strict) {
  Src ps{&pre, nullptr};
  // largest i with pre[i] >= / > ref
  Int lo = 0, hi = Int(pre.size()) + 1;
  while (hi - lo > 1) {
    Int mid = (lo + hi) / 2;
    int c = src_cmp(ps, mid, ref, ridx);
    if (strict ? c > 0 : c >= 0) lo = mid;
    else hi = mid;
  }
  return lo;
}

Int src_count_rel(const Src& s, const Src& ref, const Int& ridx, bool strict) {
  if (s.pre) return pre_count_rel(*s.pre, ref, ridx, strict);
  if (ref.pre) {
    const Rat& q = (*ref.pre)[ridx.convert_to<size_t>() - 1];
    return strict ? comp_count_gt(*s.comp, q) : comp_count_ge(*s.comp, q);
  }
  return strict ? comp_count_gt_term(*s.comp, *ref.comp, ridx)
                : comp_count_ge_term(*s.comp, *ref.comp, ridx);
}

CertifiedValue src_head_sum(const Src& s, const Int& m, const Precision& prec) {
  if (m <= 0) return CertifiedValue::exact(Rat(0));
  if (s.pre) {
    std::vector<Rat> head(s.pre->begin(), s.pre->begin() + m.convert_to<size_t>());
    return CertifiedValue::exact(sum_tree(std::move(head)));
  }
  return comp_head_sum(*s.comp, m, prec);
}

RatInterval src_term_bounds(const Src& s, const Int& i) {
  if (s.pre) {
    const Rat& v = (*s.pre)[i.convert_to<size_t>() - 1];
    return {v, v};
  }
  return comp_term_bounds(*s.comp, i);
}

struct Ref {
  size_t si = 0;
  Int idx = 0;
};

// The n-th largest term of the merged stream, as (source, index). n within range.
Ref select_nth(const std::vector<Src>& srcs, const Int& n) {
  auto total_ge = [&](const Src& ref, const Int& ridx) {
    Int t = 0;
    for (const auto& s : srcs) t += src_count_rel(s, ref, ridx, false);
    return t;
  };
  bool have = false;
  Ref best;
  for (size_t si = 0; si < srcs.size(); ++si) {
    const Src& s = srcs[si];
    Int cap = n;
    XNat c = src_count(s);
    if (!c.is_inf() && c.value() < cap) cap = c.value();
    if (cap < 1) continue;
    if (total_ge(s, cap) < n) continue;
    Int lo = 0, hi = cap;  // smallest i in [1,cap] with total_ge >= n
    while (hi - lo > 1) {
      Int mid = (lo + hi) / 2;
      if (total_ge(s, mid) >= n) hi = mid;
      else lo = mid;
    }
    Ref cand{si, hi};
    if (!have || src_cmp(srcs[cand.si], cand.idx, srcs[best.si], best.idx) > 0) {
      best = cand;
      have = true;
    }
  }
  if (!have) throw std::logic_error("select_nth: rank out of range");
  return best;
}

}  // namespace

ExtendedSequence seq_fin(std::vector<Rat> prefix, XNat zeros) {
  ExtendedSequence s;
  s.prefix = std::move(prefix);
  s.zero_count = std::move(zeros);
  return normalize(std::move(s));
}

ExtendedSequence seq_tail(TailSpec pos, XNat zeros) {
  ExtendedSequence s;
  s.positive_tail = std::move(pos);
  s.zero_count = std::move(zeros);
  return s;
}

ExtendedSequence seq_mixed(std::vector<Rat> prefix, TailSpec pos, TailSpec neg, XNat zeros) {
  ExtendedSequence s;
  s.prefix = std::move(prefix);
  s.positive_tail = std::move(pos);
  s.negative_tail = std::move(neg);
  s.zero_count = std::move(zeros);
  return s;
}

void validate_sequence(const ExtendedSequence& s) {
  for (const Rat& x : s.prefix)
    if (x == 0) throw std::domain_error("sequence: explicit zeros belong in zero_count");
  for (const auto& c : s.positive_tail.comps) validate_comp(c);
  for (const auto& c : s.negative_tail.comps) validate_comp(c);
  if (nonzero_comp_count(s.positive_tail) > 4 || nonzero_comp_count(s.negative_tail) > 4)
    throw std::domain_error("sequence: at most 4 tail components per sign");
}

PosStream positive_stream(const ExtendedSequence& s) {
  PosStream ps;
  for (const Rat& x : s.prefix)
    if (x > 0) ps.prefix.push_back(x);
  std::sort(ps.prefix.begin(), ps.prefix.end(), std::greater<Rat>());
  for (const auto& c : s.positive_tail.comps)
    if (comp_has_positive_terms(c)) ps.comps.push_back(c);
  return ps;
}

PosStream negative_stream(const ExtendedSequence& s) {
  PosStream ps;
  for (const Rat& x : s.prefix)
    if (x < 0) ps.prefix.push_back(-x);
  std::sort(ps.prefix.begin(), ps.prefix.end(), std::greater<Rat>());
  for (const auto& c : s.negative_tail.comps)
    if (comp_has_positive_terms(c)) ps.comps.push_back(c);
  return ps;
}

XNat zeros_total(const ExtendedSequence& s) {
  return s.zero_count + tail_zero_comps(s.positive_tail) + tail_zero_comps(s.negative_tail);
}

XNat positive_count(const ExtendedSequence& s) { return ps_count(positive_stream(s)); }
XNat negative_count(const ExtendedSequence& s) { return ps_count(negative_stream(s)); }

XNat sequence_length(const ExtendedSequence& s) {
  return positive_count(s) + negative_count(s) + zeros_total(s);
}

bool is_normalized(const ExtendedSequence& s) {
  // prefix order: positives nonincreasing, then negatives by nonincreasing magnitude
  size_t i = 0;
  while (i < s.prefix.size() && s.prefix[i] > 0) ++i;
  size_t split = i;
  for (; i < s.prefix.size(); ++i)
    if (s.prefix[i] > 0) return false;
  for (size_t j = 1; j < split; ++j)
    if (s.prefix[j] > s.prefix[j - 1]) return false;
  for (size_t j = split + 1; j < s.prefix.size(); ++j)
    if (-s.prefix[j] > -s.prefix[j - 1]) return false;
  auto dominated = [](const std::vector<Rat>& mags, const TailSpec& tail) {
    if (mags.empty()) return true;
    Rat mn = *std::min_element(mags.begin(), mags.end());
    for (const auto& c : tail.comps)
      if (comp_has_positive_terms(c) && comp_term_cmp_rat(c, 1, mn) > 0) return false;
    return true;
  };
  std::vector<Rat> pos, neg;
  for (const Rat& x : s.prefix) (x > 0 ? pos : neg).push_back(abs(x));
  return dominated(pos, s.positive_tail) && dominated(neg, s.negative_tail);
}

namespace {

// Absorb tail heads into `mags` while some entry sits strictly below a head.
void absorb_sign(std::vector<Rat>& mags, TailSpec& tail) {
  for (long guard = 0; guard < 100000; ++guard) {
    if (mags.empty()) return;
    Rat mn = *std::min_element(mags.begin(), mags.end());
    long best = -1;
    for (size_t ci = 0; ci < tail.comps.size(); ++ci) {
      const auto& c = tail.comps[ci];
      if (!comp_has_positive_terms(c)) continue;
      if (comp_term_cmp_rat(c, 1, mn) <= 0) continue;  // head <= min entry: dominated
      if (best < 0 || comp_term_cmp(c, 1, tail.comps[best], 1) > 0) best = static_cast<long>(ci);
    }
    if (best < 0) return;
    TailComp& c = tail.comps[best];
    if (!comp_can_drop_head(c))
      throw std::domain_error("normalize: tail head cannot be absorbed exactly");
    mags.push_back(comp_term(c, 1));
    c = comp_drop_head(c);
  }
  throw std::domain_error("normalize: absorption budget exceeded");
}

}  // namespace

ExtendedSequence normalize(ExtendedSequence s) {
  validate_sequence(s);
  std::vector<Rat> pos, neg;
  for (const Rat& x : s.prefix) (x > 0 ? pos : neg).push_back(abs(x));
  absorb_sign(pos, s.positive_tail);
  absorb_sign(neg, s.negative_tail);
  std::sort(pos.begin(), pos.end(), std::greater<Rat>());
  std::sort(neg.begin(), neg.end(), std::greater<Rat>());
  s.prefix.clear();
  for (const Rat& x : pos) s.prefix.push_back(x);
  for (const Rat& x : neg) s.prefix.push_back(-x);
  // drop empty zero components
  auto prune = [](TailSpec& t) {
    std::vector<TailComp> keep;
    for (auto& c : t.comps) {
      if (std::holds_alternative<ZeroTail>(c) && std::get<ZeroTail>(c).count == XNat(0L)) continue;
      keep.push_back(std::move(c));
    }
    t.comps = std::move(keep);
  };
  prune(s.positive_tail);
  prune(s.negative_tail);
  return s;
}

ExtendedSequence negate(const ExtendedSequence& s) {
  ExtendedSequence r;
  for (const Rat& x : s.prefix) r.prefix.push_back(-x);
  r.positive_tail = s.negative_tail;
  r.negative_tail = s.positive_tail;
  r.zero_count = s.zero_count;
  return r;
}

ExtendedSequence positive_part(const ExtendedSequence& s) {
  ExtendedSequence r;
  for (const Rat& x : s.prefix)
    if (x > 0) r.prefix.push_back(x);
  std::sort(r.prefix.begin(), r.prefix.end(), std::greater<Rat>());
  r.positive_tail = s.positive_tail;
  r.zero_count = s.zero_count + tail_zero_comps(s.negative_tail) + negative_count(s);
  return r;
}

ExtendedSequence negative_part(const ExtendedSequence& s) { return positive_part(negate(s)); }

ExtendedSequence decreasing_rearrangement(const ExtendedSequence& s) {
  if (!(negative_count(s) == XNat(0L)))
    throw std::domain_error("decreasing_rearrangement: sequence has negative terms");
  ExtendedSequence t = s;
  t.negative_tail = TailSpec::none();
  t.zero_count = t.zero_count + tail_zero_comps(s.negative_tail);
  return normalize(std::move(t));
}

XNat ps_count(const PosStream& ps) {
  XNat n(Int(ps.prefix.size()));
  for (const auto& c : ps.comps) n = n + comp_positive_count(c);
  return n;
}

bool ps_summable(const PosStream& ps) {
  for (const auto& c : ps.comps)
    if (!comp_summable(c)) return false;
  return true;
}

bool ps_exact_terms(const PosStream& ps) {
  for (const auto& c : ps.comps)
    if (!comp_exact_terms(c)) return false;
  return true;
}

Int ps_count_ge(const PosStream& ps, const Rat& q) {
  if (q <= 0) throw std::domain_error("ps_count_ge: threshold must be positive");
  Int n = 0;
  for (const Rat& x : ps.prefix)
    if (x >= q) ++n;
  for (const auto& c : ps.comps)
    if (comp_has_positive_terms(c)) n += comp_count_ge(c, q);
  return n;
}

Int ps_count_gt(const PosStream& ps, const Rat& q) {
  if (q <= 0) throw std::domain_error("ps_count_gt: threshold must be positive");
  Int n = 0;
  for (const Rat& x : ps.prefix)
    if (x > q) ++n;
  for (const auto& c : ps.comps)
    if (comp_has_positive_terms(c)) n += comp_count_gt(c, q);
  return n;
}

CertifiedValue ps_total(const PosStream& ps, const Precision& prec) {
  CertifiedValue t = CertifiedValue::exact(sum_tree(ps.prefix));
  for (const auto& c : ps.comps) t = t + comp_total(c, prec);
  return t;
}

CertifiedValue ps_head_sum(const PosStream& ps, const Int& n, const Precision& prec) {
  if (n <= 0) return CertifiedValue::exact(Rat(0));
  XNat cnt = ps_count(ps);
  if (!cnt.is_inf() && cnt.value() <= n) return ps_total(ps, prec);
  auto srcs = sources(ps);
  Ref r = select_nth(srcs, n);
  Int taken = 0;
  CertifiedValue sum = CertifiedValue::exact(Rat(0));
  for (const auto& s : srcs) {
    Int m = src_count_rel(s, srcs[r.si], r.idx, true);
    sum = sum + src_head_sum(s, m, prec);
    taken += m;
  }
  Int fill = n - taken;  // >= 1: copies of the cut value
  RatInterval v = src_term_bounds(srcs[r.si], r.idx);
  RatInterval f{Rat(fill) * v.lo, Rat(fill) * v.hi};
  return sum + CertifiedValue::interval(f.lo, f.hi);
}

CertifiedValue ps_sum_ge(const PosStream& ps, const Rat& q, const Precision& prec) {
  CertifiedValue sum = CertifiedValue::exact(Rat(0));
  std::vector<Rat> pre;
  for (const Rat& x : ps.prefix)
    if (x >= q) pre.push_back(x);
  sum = sum + CertifiedValue::exact(sum_tree(std::move(pre)));
  for (const auto& c : ps.comps)
    if (comp_has_positive_terms(c)) sum = sum + comp_head_sum(c, comp_count_ge(c, q), prec);
  return sum;
}

CertifiedValue ps_sum_gt(const PosStream& ps, const Rat& q, const Precision& prec) {
  CertifiedValue sum = CertifiedValue::exact(Rat(0));
  std::vector<Rat> pre;
  for (const Rat& x : ps.prefix)
    if (x > q) pre.push_back(x);
  sum = sum + CertifiedValue::exact(sum_tree(std::move(pre)));
  for (const auto& c : ps.comps)
    if (comp_has_positive_terms(c)) sum = sum + comp_head_sum(c, comp_count_gt(c, q), prec);
  return sum;
}

Rat ps_nth(const PosStream& ps, const Int& n) {
  if (n < 1) throw std::domain_error("ps_nth: n >= 1 required");
  XNat cnt = ps_count(ps);
  if (!cnt.is_inf() && cnt.value() < n) throw std::domain_error("ps_nth: rank out of range");
  auto srcs = sources(ps);
  Ref r = select_nth(srcs, n);
  if (srcs[r.si].pre) return (*srcs[r.si].pre)[r.idx.convert_to<size_t>() - 1];
  return comp_term(*srcs[r.si].comp, r.idx);  // throws if irrational
}

PosIter::PosIter(const PosStream& ps) : ps_(&ps) {
  for (const auto& c : ps.comps) {
    if (!comp_has_positive_terms(c)) continue;
    if (!comp_exact_terms(c)) throw std::domain_error("enumeration requires exact terms");
    CompState st;
    st.comp = &c;
    st.k = 1;
    st.cur = comp_term(c, 1);
    if (std::holds_alternative<EchoGeoTail>(c)) st.base = std::get<EchoGeoTail>(c).first;
    cs_.push_back(std::move(st));
  }
}

bool PosIter::has_next() const { return pi_ < ps_->prefix.size() || !cs_.empty(); }

std::vector<std::pair<const TailComp*, Int>> PosIter::comp_positions() const {
  std::vector<std::pair<const TailComp*, Int>> out;
  for (const auto& st : cs_) out.emplace_back(st.comp, st.k);
  return out;
}

Rat PosIter::next() {
  long best = -1;  // -1: prefix
  for (size_t i = 0; i < cs_.size(); ++i) {
    if (best == -1) {
      if (pi_ >= ps_->prefix.size() || cs_[i].cur > ps_->prefix[pi_]) best = static_cast<long>(i);
    } else if (cs_[i].cur > cs_[best].cur) {
      best = static_cast<long>(i);
    }
  }
  if (best == -1) {
    if (pi_ >= ps_->prefix.size()) throw std::logic_error("PosIter: exhausted");
    return ps_->prefix[pi_++];
  }
  CompState& st = cs_[best];
  Rat out = st.cur;
  st.k += 1;
  const Int& k = st.k;
  if (std::holds_alternative<GeometricTail>(*st.comp)) {
    st.cur *= std::get<GeometricTail>(*st.comp).ratio;
  } else if (std::holds_alternative<EchoGeoTail>(*st.comp)) {
    const auto& e = std::get<EchoGeoTail>(*st.comp);
    if (k == 2) {
      st.cur = e.first / 2;
    } else {
      // base tracks g_{k-1}
      st.base = k == 3 ? Rat(e.first * e.ratio) : Rat(st.base * e.ratio);
      Int j = iroot_floor(k, 2);
      if (j * j == k && j >= 3) {
        st.cur = st.base * (1 + e.ratio * e.ratio * pow_rat(Rat(1, 2), j));
      } else {
        Int jp = iroot_floor(k - 1, 2);
        if (jp * jp == k - 1 && jp >= 3) st.cur = st.base * (1 - e.ratio * pow_rat(Rat(1, 2), jp));
        else st.cur = st.base;
      }
    }
  } else {
    st.cur = comp_term(*st.comp, k);
  }
  return out;
}

CertifiedValue partial_sum(const ExtendedSequence& s, const Int& n, const Precision& prec) {
  if (!(negative_count(s) == XNat(0L)))
    throw std::domain_error("partial_sum: sequence has negative terms");
  PosStream ps = positive_stream(s);
  Int m = n;
  XNat cnt = ps_count(ps);
  if (!cnt.is_inf() && cnt.value() < m) m = cnt.value();
  return ps_head_sum(ps, m, prec);
}

CertifiedValue total_sum(const ExtendedSequence& s, const Precision& prec) {
  if (!(negative_count(s) == XNat(0L)))
    throw std::domain_error("total_sum: sequence has negative terms");
  return ps_total(positive_stream(s), prec);
}

ExtendedSequence concat(const ExtendedSequence& a, const ExtendedSequence& b) {
  ExtendedSequence r;
  r.prefix = a.prefix;
  r.prefix.insert(r.prefix.end(), b.prefix.begin(), b.prefix.end());
  r.positive_tail.comps = a.positive_tail.comps;
  r.positive_tail.comps.insert(r.positive_tail.comps.end(), b.positive_tail.comps.begin(),
                               b.positive_tail.comps.end());
  r.negative_tail.comps = a.negative_tail.comps;
  r.negative_tail.comps.insert(r.negative_tail.comps.end(), b.negative_tail.comps.begin(),
                               b.negative_tail.comps.end());
  r.zero_count = a.zero_count + b.zero_count;
  validate_sequence(r);
  return r;
}

std::vector<Rat> materialize(const ExtendedSequence& s, long n) {
  PosStream pos = positive_stream(s), neg = negative_stream(s);
  PosIter ip(pos), in(neg);
  std::vector<Rat> out;
  Rat pv, nv;
  bool hp = ip.has_next(), hn = in.has_next();
  if (hp) pv = ip.next();
  if (hn) nv = in.next();
  while (static_cast<long>(out.size()) < n && (hp || hn)) {
    bool take_pos;
    if (hp && hn) take_pos = pv >= nv;
    else take_pos = hp;
    if (take_pos) {
      out.push_back(pv);
      hp = ip.has_next();
      if (hp) pv = ip.next();
    } else {
      out.push_back(-nv);
      hn = in.has_next();
      if (hn) nv = in.next();
    }
  }
  XNat z = zeros_total(s);
  while (static_cast<long>(out.size()) < n && (z.is_inf() || z.value() > 0)) {
    out.push_back(Rat(0));
    if (!z.is_inf()) z = z - XNat(1L);
  }
  return out;
}


namespace {

// Positional view of a stream tail: for positions i > p the term is the (i-p)-th term
// of a single closed-form component. Valid only when the prefix is nonincreasing and
// dominates the component head, so the merged enumeration is prefix-first.
struct TailView {
  enum Kind { Finite, Geo, Pow, Echo } kind = Finite;
  Rat c, r, e;
  Int off;
  long p = 0;
  const TailComp* comp = nullptr;
  bool ok = false;
};

TailView tail_view(const PosStream& s) {
  TailView v;
  v.p = static_cast<long>(s.prefix.size());
  const TailComp* only = nullptr;
  int live = 0;
  for (const auto& c : s.comps) {
    if (std::holds_alternative<ZeroTail>(c)) continue;
    ++live;
    only = &c;
  }
  if (live == 0) {
    v.kind = TailView::Finite;
    v.ok = true;
    return v;
  }
  if (live > 1) return v;
  for (size_t i = 1; i < s.prefix.size(); ++i)
    if (s.prefix[i] > s.prefix[i - 1]) return v;
  if (!s.prefix.empty() && comp_term_cmp_rat(*only, 1, s.prefix.back()) > 0) return v;
  v.comp = only;
  if (const auto* g = std::get_if<GeometricTail>(only)) {
    v.kind = TailView::Geo;
    v.c = g->first;
    v.r = g->ratio;
  } else if (const auto* pw = std::get_if<PowerTail>(only)) {
    v.kind = TailView::Pow;
    v.c = pw->coefficient;
    v.e = pw->exponent;
    v.off = pw->offset;
  } else {
    v.kind = TailView::Echo;
  }
  v.ok = true;
  return v;
}

// sign of a_i - b_i at stream position i (both views non-finite).
int view_term_cmp(const TailView& a, const TailView& b, long i) {
  return comp_term_cmp(*a.comp, Int(i - a.p), *b.comp, Int(i - b.p));
}

// ((k+off)/(k+1+off))^e >= r, exactly: cross-raise by the exponent denominator.
bool pow_step_at_least(const Rat& e, const Int& off, const Int& k, const Rat& r) {
  Int p = numerator(e), q = denominator(e);
  Rat lhs = pow_rat(Rat(Int(k + off)), p);
  Rat rhs = Rat(pow_rat(r, q) * pow_rat(Rat(Int(k + Int(1) + off)), p));
  return lhs >= rhs;
}

}  // namespace

EvCmpResult eventual_term_cmp(const PosStream& a, const PosStream& b,
                              const Precision& prec) {
  auto identical = [&]() {
    if (a.prefix != b.prefix || a.comps.size() != b.comps.size()) return false;
    for (size_t i = 0; i < a.comps.size(); ++i)
      if (!comp_equal(a.comps[i], b.comps[i])) return false;
    return true;
  };
  if (identical()) return {EvCmp::Equal, 0};

  TailView va = tail_view(a), vb = tail_view(b);
  if (!va.ok || !vb.ok) return {};
  if (va.kind == TailView::Echo || vb.kind == TailView::Echo) return {};
  long m0 = std::max(va.p, vb.p);
  long cap = m0 + prec.n_work;

  if (va.kind == TailView::Finite && vb.kind == TailView::Finite)
    return {EvCmp::Equal, m0};
  if (va.kind == TailView::Finite) return {EvCmp::Lt, m0};
  if (vb.kind == TailView::Finite) return {EvCmp::Gt, m0};

  // scan for the first index where the comparison flips to `want` and stays
  auto scan_for = [&](int want) -> EvCmpResult {
    for (long m = m0 + 1; m <= cap; ++m)
      if (view_term_cmp(va, vb, m) == want)
        return {want > 0 ? EvCmp::Gt : EvCmp::Lt, m - 1};
    return {};
  };

  if (va.kind == TailView::Geo && vb.kind == TailView::Geo) {
    if (va.r == vb.r) {
      int c = view_term_cmp(va, vb, m0 + 1);  // constant term ratio: one compare settles all
      return {c == 0 ? EvCmp::Equal : (c > 0 ? EvCmp::Gt : EvCmp::Lt), m0};
    }
    // the slower-decaying side wins from the first overtake on
    return scan_for(va.r > vb.r ? +1 : -1);
  }

  if (va.kind == TailView::Geo && vb.kind == TailView::Pow) {
    // the power tail decays slower; certified once its per-step ratio clears r and
    // the terms have crossed
    for (long m = m0 + 1; m <= cap; ++m) {
      if (view_term_cmp(va, vb, m) < 0 &&
          pow_step_at_least(vb.e, vb.off, Int(m - vb.p), va.r))
        return {EvCmp::Lt, m - 1};
    }
    return {};
  }
  if (va.kind == TailView::Pow && vb.kind == TailView::Geo) {
    for (long m = m0 + 1; m <= cap; ++m) {
      if (view_term_cmp(va, vb, m) > 0 &&
          pow_step_at_least(va.e, va.off, Int(m - va.p), vb.r))
        return {EvCmp::Gt, m - 1};
    }
    return {};
  }

  // both power tails
  Rat sa = Rat(Rat(va.off) - va.p), sb = Rat(Rat(vb.off) - vb.p);
  if (va.e == vb.e) {
    if (sa == sb) {
      int c = va.c == vb.c ? 0 : (va.c > vb.c ? +1 : -1);
      return {c == 0 ? EvCmp::Equal : (c > 0 ? EvCmp::Gt : EvCmp::Lt), m0};
    }
    // the term ratio is monotone in i with limit va.c/vb.c, so it crosses 1 at most once
    if (sb > sa) {
      // ratio decreases toward the limit: above it everywhere
      if (va.c >= vb.c) return {EvCmp::Gt, m0};
      return scan_for(-1);
    }
    if (va.c <= vb.c) return {EvCmp::Lt, m0};
    return scan_for(+1);
  }
  // distinct exponents: the term ratio is monotone beyond i* = (ea*sb - eb*sa)/(eb - ea)
  // in favor of the slower-decaying side
  bool a_wins = va.e < vb.e;
  Rat istar = a_wins ? Rat((va.e * sb - vb.e * sa) / (vb.e - va.e))
                     : Rat((vb.e * sa - va.e * sb) / (va.e - vb.e));
  long lo = m0;
  Int fl = rat_floor(istar);
  if (fl > Int(lo)) {
    if (fl > Int(cap)) return {};
    lo = static_cast<long>(fl);
  }
  for (long m = lo + 1; m <= cap; ++m)
    if (view_term_cmp(va, vb, m) == (a_wins ? +1 : -1))
      return {a_wins ? EvCmp::Gt : EvCmp::Lt, m - 1};
  return {};
}

CertifiedValue ps_rest_total(const PosStream& ps, const PosIter& it, const Precision& prec) {
  Rat head(0);
  for (size_t i = it.prefix_position(); i < ps.prefix.size(); ++i) head += ps.prefix[i];
  CertifiedValue acc = CertifiedValue::exact(head);
  for (const auto& [comp, k] : it.comp_positions()) {
    CertifiedValue rest = comp_total(*comp, prec) - comp_head_sum(*comp, k - 1, prec);
    acc = acc + rest;
  }
  return acc;
}

bool ps_residual_equal(const PosStream& a, const PosIter& ia, const PosStream& b,
                       const PosIter& ib) {
  std::vector<Rat> ap(a.prefix.begin() + ia.prefix_position(), a.prefix.end());
  std::vector<Rat> bp(b.prefix.begin() + ib.prefix_position(), b.prefix.end());
  if (ap != bp) return false;
  auto rebased = [](const PosIter& it) -> std::optional<std::vector<TailComp>> {
    std::vector<TailComp> out;
    for (const auto& [comp, k] : it.comp_positions()) {
      if (std::holds_alternative<EchoGeoTail>(*comp)) {
        if (k != 1) return std::nullopt;  // position-locked
        out.push_back(*comp);
      } else {
        auto r = comp_rebase(*comp, k - 1);
        if (!r) return std::nullopt;
        out.push_back(*r);
      }
    }
    return out;
  };
  auto ac = rebased(ia), bc = rebased(ib);
  if (!ac || !bc || ac->size() != bc->size()) return false;
  std::vector<bool> used(bc->size(), false);
  for (const auto& c : *ac) {
    bool found = false;
    for (size_t j = 0; j < bc->size(); ++j) {
      if (!used[j] && comp_equal(c, (*bc)[j])) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace diag
