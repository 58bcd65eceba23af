#include "diag/decision.hpp"

#include <sstream>

#include "diag/json_io.hpp"

namespace diag {

namespace {

const CertifiedValue kZero = CertifiedValue::exact(Rat(0));

Tri implies(Tri premise, Tri conclusion) {
  if (premise == Tri::False) return Tri::True;
  if (conclusion == Tri::True) return Tri::True;
  if (premise == Tri::True) return conclusion;
  return Tri::Unknown;
}

// Strictly positive part of s with a prescribed zero count, for the per-side kernel
// inputs of a splitting.
ExtendedSequence strict_side(const PosStream& ps, const XNat& zeros) {
  ExtendedSequence s;
  s.prefix = ps.prefix;
  s.positive_tail.comps = ps.comps;
  s.zero_count = zeros;
  return s;
}

}  // namespace

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Diagonal: return "Diagonal";
    case Outcome::NotDiagonal: return "NotDiagonal";
    case Outcome::KernelInconclusive: return "KernelInconclusive";
    default: return "PrecisionUnknown";
  }
}

NecessityTrace check_necessity(const ExtendedSequence& lambda, const ExtendedSequence& d,
                               const Precision& prec) {
  NecessityTrace tr;
  tr.excess = excess(lambda, d, prec);

  RiemannResult r1 =
      riemann_majorizes(positive_part(lambda), positive_part(d), Int(prec.n_work), prec);
  tr.p[0].status = r1.status;
  if (r1.status == Tri::False && r1.witness_n)
    tr.p[0].witness = "positive parts, n = " + r1.witness_n->str();

  RiemannResult r2 = riemann_majorizes(positive_part(negate(lambda)),
                                       positive_part(negate(d)), Int(prec.n_work), prec);
  tr.p[1].status = r2.status;
  if (r2.status == Tri::False && r2.witness_n)
    tr.p[1].witness = "negative parts, n = " + r2.witness_n->str();

  bool sig_ok = tr.excess.sigma_plus_known && tr.excess.sigma_minus_known;
  const CertifiedValue& sp = tr.excess.sigma_plus;
  const CertifiedValue& sm = tr.excess.sigma_minus;

  if (sig_ok) {
    tr.p[2].status = implies(tr.excess.d_plus_summable, cv_ge(sm, sp));
    if (tr.p[2].status == Tri::False)
      tr.p[2].witness = "sigma- = " + sm.str() + " < sigma+ = " + sp.str();
    tr.p[3].status = implies(tr.excess.d_minus_summable, cv_ge(sp, sm));
    if (tr.p[3].status == Tri::False)
      tr.p[3].witness = "sigma+ = " + sp.str() + " < sigma- = " + sm.str();
  }

  XNat lz = zeros_total(lambda), dz = zeros_total(d);
  XNat lpos = positive_count(lambda), dpos = positive_count(d);
  XNat lneg = negative_count(lambda), dneg = negative_count(d);
  bool zge = dz.is_inf() ? lz.is_inf() : (lz.is_inf() || lz.v >= dz.v);
  XNat l_ge0 = lz + lpos, d_ge0 = dz + dpos;
  XNat l_le0 = lz + lneg, d_le0 = dz + dneg;

  if (sig_ok) {
    Tri card5 = tri_of(zge && l_ge0 >= d_ge0);
    tr.p[4].status = implies(cv_zero(sp), card5);
    if (tr.p[4].status == Tri::False)
      tr.p[4].witness = zge ? "nonnegative counts: " + l_ge0.str() + " < " + d_ge0.str()
                            : "zero counts: " + lz.str() + " < " + dz.str();
    Tri card6 = tri_of(zge && l_le0 >= d_le0);
    tr.p[5].status = implies(cv_zero(sm), card6);
    if (tr.p[5].status == Tri::False)
      tr.p[5].witness = zge ? "nonpositive counts: " + l_le0.str() + " < " + d_le0.str()
                            : "zero counts: " + lz.str() + " < " + dz.str();
  }
  return tr;
}

namespace {

Verdict decide_once(const ExtendedSequence& lambda, const ExtendedSequence& d,
                    const Precision& prec) {
  Verdict v;
  v.trace = check_necessity(lambda, d, prec);
  for (int i = 0; i < 6; ++i) {
    if (v.trace.p[i].status == Tri::False) {
      v.outcome = Outcome::NotDiagonal;
      v.note = "necessary condition " + std::to_string(i + 1) + " fails: " +
               v.trace.p[i].witness;
      return v;
    }
  }
  bool necessity_known = true;
  for (int i = 0; i < 6; ++i)
    if (v.trace.p[i].status != Tri::True) necessity_known = false;

  const ExcessReport& ex = v.trace.excess;
  if (!ex.sigma_plus_known || !ex.sigma_minus_known) {
    v.outcome = Outcome::PrecisionUnknown;
    v.note = "excess values not certified";
    return v;
  }
  if ((ex.sigma_plus.is_plus_inf() && ex.sigma_minus.is_minus_inf()) ||
      (ex.sigma_plus.is_minus_inf() && ex.sigma_minus.is_plus_inf())) {
    v.outcome = Outcome::PrecisionUnknown;
    v.note = "opposite infinite excesses";
    return v;
  }
  CertifiedValue sum = ex.sigma_plus + ex.sigma_minus;
  if (cv_gt(sum, kZero) == Tri::True) {
    if (necessity_known) {
      v.outcome = Outcome::Diagonal;
      v.note = "strictly positive combined excess";
      return v;
    }
    v.outcome = Outcome::PrecisionUnknown;
    v.note = "positive excess but a necessity condition is uncertified";
    return v;
  }
  if (cv_zero(sum) != Tri::True) {
    v.outcome = Outcome::PrecisionUnknown;
    v.note = "combined excess not separated from zero";
    return v;
  }

  // zero-excess branch: split the zero eigenvalues and run both one-sided tests
  std::vector<Splitting> splits = enumerate_splittings(lambda, d);
  if (splits.empty()) {
    XNat lz = zeros_total(lambda), dz = zeros_total(d);
    v.outcome = Outcome::NotDiagonal;
    v.note = "no feasible zero splitting: lambda has " + lz.str() + " zeros, candidate has " +
             dz.str();
    return v;
  }
  PosStream lpos = positive_stream(lambda), dpos = positive_stream(d);
  PosStream lneg = negative_stream(lambda), dneg = negative_stream(d);
  bool any_yes = false, all_no = true, any_inc = false, any_unknown = false;
  for (const Splitting& s : splits) {
    SplitOutcome so;
    so.split = s;
    so.pos = kernel_test(strict_side(lpos, s.z2), strict_side(dpos, XNat(0L)), prec);
    so.neg = kernel_test(strict_side(lneg, s.z1), strict_side(dneg, XNat(0L)), prec);
    using O = KernelResult::Out;
    bool yes = so.pos.out == O::Yes && so.neg.out == O::Yes;
    bool no = so.pos.out == O::No || so.neg.out == O::No;
    if (yes) any_yes = true;
    if (!no) all_no = false;
    if (!no && (so.pos.out == O::Inconclusive || so.neg.out == O::Inconclusive))
      any_inc = true;
    if (!no && (so.pos.out == O::Unknown || so.neg.out == O::Unknown)) any_unknown = true;
    v.splittings_examined.push_back(std::move(so));
  }
  if (any_yes) {
    v.outcome = necessity_known ? Outcome::Diagonal : Outcome::PrecisionUnknown;
    v.note = necessity_known ? "a zero splitting passes both one-sided kernel tests"
                             : "kernel tests pass but a necessity condition is uncertified";
  } else if (all_no) {
    v.outcome = Outcome::NotDiagonal;
    v.note = "every zero splitting fails a one-sided kernel test";
  } else if (any_inc && !any_unknown) {
    v.outcome = Outcome::KernelInconclusive;
    v.note = "a splitting lands on the open boundary case";
  } else if (any_unknown) {
    v.outcome = Outcome::PrecisionUnknown;
    v.note = "a one-sided kernel test exhausted its budget";
  } else {
    v.outcome = Outcome::KernelInconclusive;
    v.note = "mixed one-sided results without a decisive splitting";
  }
  return v;
}

int precision_rank(const Precision& p) {
  if (p.n_work >= Precision::level(3).n_work) return 3;
  if (p.n_work >= Precision::level(2).n_work) return 2;
  return 1;
}

}  // namespace

Verdict decide(const ExtendedSequence& lambda, const ExtendedSequence& d,
               const Precision& prec) {
  Verdict v = decide_once(lambda, d, prec);
  v.precision_level = precision_rank(prec);
  for (int lvl = precision_rank(prec) + 1;
       lvl <= 3 && v.outcome == Outcome::PrecisionUnknown; ++lvl) {
    v = decide_once(lambda, d, Precision::level(lvl));
    v.precision_level = lvl;
  }
  return v;
}

ExplainReport explain(const ExtendedSequence& lambda, const ExtendedSequence& d,
                      const Precision& prec) {
  ExplainReport rep;
  rep.verdict = decide(lambda, d, prec);
  rep.json = verdict_to_json(rep.verdict).dump(2);

  std::ostringstream os;
  const Verdict& v = rep.verdict;
  os << "outcome: " << outcome_name(v.outcome) << "\n";
  if (!v.note.empty()) os << "  " << v.note << "\n";
  static const char* kCond[6] = {
      "positive partial-sum dominance", "negative partial-sum dominance",
      "summable d+ forces sigma- >= sigma+", "summable d- forces sigma+ >= sigma-",
      "zero excess+ forces count dominance", "zero excess- forces count dominance"};
  for (int i = 0; i < 6; ++i) {
    os << "condition " << i + 1 << " (" << kCond[i]
       << "): " << tri_name(v.trace.p[i].status);
    if (!v.trace.p[i].witness.empty()) os << "  [" << v.trace.p[i].witness << "]";
    os << "\n";
  }
  os << "sigma+ = " << v.trace.excess.sigma_plus.str()
     << (v.trace.excess.sigma_plus_known ? "" : " (uncertified)")
     << ", sigma- = " << v.trace.excess.sigma_minus.str()
     << (v.trace.excess.sigma_minus_known ? "" : " (uncertified)") << "\n";

  // delta samples at the leading knots of each side
  for (int dir : {1, -1}) {
    KnotList kl = knots(lambda, dir, prec);
    size_t shown = 0;
    for (const Rat& a : kl.values) {
      if (shown++ >= 8) break;
      CertifiedValue dv = delta(a, lambda, d, prec);
      os << "  delta(" << rat_str(a) << ") = " << dv.str() << "\n";
    }
  }
  if (!v.splittings_examined.empty()) {
    os << "zero splittings:\n";
    for (const auto& so : v.splittings_examined) {
      os << "  (z0=" << so.split.z0.str() << ", z1=" << so.split.z1.str()
         << ", z2=" << so.split.z2.str() << "): positive side "
         << kernel_out_name(so.pos.out) << ", negative side "
         << kernel_out_name(so.neg.out);
      if (!so.pos.witness.empty()) os << "  [+: " << so.pos.witness << "]";
      if (!so.neg.witness.empty()) os << "  [-: " << so.neg.witness << "]";
      os << "\n";
    }
  }
  rep.text = os.str();
  return rep;
}

}  // namespace diag
