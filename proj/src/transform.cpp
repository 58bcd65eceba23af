#include "diag/transform.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace diag {

namespace {

Rat pow2_inv(long k) {
  return Rat(Int(1), pow(Int(2), static_cast<unsigned long>(k)));
}

// Internal signal: the materialized window is too short to pin the quantity being
// computed. grow_window doubles the window and retries, up to the work bound.
struct NeedWindow {
  std::string what;
};

template <typename Build>
auto grow_window(const Precision& prec, Build&& build) {
  long W = std::min<long>(64, prec.n_work);
  for (;;) {
    try {
      return build(W);
    } catch (const NeedWindow& nw) {
      if (W >= prec.n_work)
        throw std::domain_error("window exhausted at the current work bound: " + nw.what);
      W = std::min<long>(W * 2, prec.n_work);
    }
  }
}

PosStream stream_of(const ExtendedSequence& s, const char* who) {
  if (!(negative_count(s) == XNat(0L)))
    throw std::domain_error(std::string(who) + " must be nonnegative");
  return positive_stream(s);
}

// Materialized prefix of the paired gap profile delta_k = sum_{i<=k}(lam_i - d_i),
// with the tail relation between the two streams and the gap limit certified from the
// closed tail forms. Entries are 1-based; exhausted streams are padded with zeros.
struct GapWindow {
  std::vector<Rat> lam, dd;
  std::vector<Rat> delta;
  EvCmpResult cmp;
  bool sigma_known = false;
  CertifiedValue sigma;  // limit of delta_k (equals the liminf when cmp is decisive)
  long W = 0;
};

GapWindow gap_window(const PosStream& l, const PosStream& d, long W, const Precision& prec) {
  GapWindow g;
  g.W = W;
  g.lam.assign(W + 1, Rat(0));
  g.dd.assign(W + 1, Rat(0));
  g.delta.assign(W + 1, Rat(0));
  PosIter il(l), id(d);
  for (long k = 1; k <= W; ++k) {
    if (il.has_next()) g.lam[k] = il.next();
    if (id.has_next()) g.dd[k] = id.next();
    g.delta[k] = Rat(g.delta[k - 1] + g.lam[k] - g.dd[k]);
  }
  g.cmp = eventual_term_cmp(l, d, prec);
  if (g.cmp.rel == EvCmp::Unknown || g.cmp.from >= W) return g;
  long F = g.cmp.from;
  if (g.cmp.rel == EvCmp::Equal) {
    g.sigma = CertifiedValue::exact(g.delta[F]);
    g.sigma_known = true;
    return g;
  }
  // strict per-term order beyond F: the profile is monotone there, so its limit is
  // delta_F plus the difference of the remaining stream masses
  PosIter jl(l), jd(d);
  for (long t = 0; t < F; ++t) {
    if (jl.has_next()) jl.next();
    if (jd.has_next()) jd.next();
  }
  CertifiedValue rl = ps_rest_total(l, jl, prec);
  CertifiedValue rd = ps_rest_total(d, jd, prec);
  if (rl.is_finite() || rd.is_finite()) {
    g.sigma = CertifiedValue::exact(g.delta[F]) + rl - rd;
    g.sigma_known = true;
  }
  return g;
}

// Shared precondition: lam_i >= d_i at every position, certified from the window plus
// the tail relation. Returns the certified relation; throws on violation.
void require_dominance(const GapWindow& g, const char* who) {
  if (g.cmp.rel == EvCmp::Unknown)
    throw std::domain_error(std::string(who) +
                            ": tail relation not certifiable for these tail shapes");
  if (g.cmp.rel == EvCmp::Lt)
    throw std::domain_error(std::string(who) + ": dominance fails beyond position " +
                            std::to_string(g.cmp.from));
  if (g.cmp.from >= g.W) throw NeedWindow{"tail relation settles past the window"};
  for (long k = 1; k <= g.W; ++k)
    if (g.lam[k] < g.dd[k])
      throw std::domain_error(std::string(who) + ": dominance fails at n=" + std::to_string(k));
}

Rat exact_sigma(const GapWindow& g, const char* who) {
  if (!g.sigma_known)
    throw std::domain_error(std::string(who) + ": excess not computable for these tail shapes");
  if (g.sigma.is_plus_inf())
    throw std::domain_error(std::string(who) + ": excess is infinite");
  if (!g.sigma.is_exact())
    throw std::domain_error(std::string(who) + ": excess not exactly computable");
  return g.sigma.exact_value();
}

}  // namespace

std::vector<Rat> convmove(const std::vector<Rat>& lambda, const Rat& delta) {
  if (lambda.empty()) throw std::domain_error("convmove: empty sequence");
  for (size_t i = 1; i < lambda.size(); ++i)
    if (lambda[i] > lambda[i - 1])
      throw std::domain_error("convmove: sequence must be nonincreasing");
  if (delta < 0 || delta > Rat(lambda.front() - lambda.back()))
    throw std::domain_error("convmove: delta outside [0, first - last]");
  std::vector<Rat> out = lambda;
  out.front() = Rat(out.front() - delta);
  out.back() = Rat(out.back() + delta);
  // the decreasing rearrangement of the result stays below lambda in partial sums
  std::vector<Rat> sorted = out;
  std::sort(sorted.rbegin(), sorted.rend());
  Rat ps_in(0), ps_out(0);
  for (size_t k = 0; k < lambda.size(); ++k) {
    ps_in += lambda[k];
    ps_out += sorted[k];
    if (ps_out > ps_in) throw std::logic_error("convmove: partial-sum dominance failed");
  }
  if (ps_out != ps_in) throw std::logic_error("convmove: total changed");
  return out;
}

OneNegPlan one_neg_transform(const ExtendedSequence& lambda, const ExtendedSequence& d,
                             int max_cuts, const Precision& prec) {
  if (max_cuts < 2) throw std::domain_error("one_neg_transform: max_cuts must be >= 2");
  PosStream l = stream_of(lambda, "one_neg_transform: lambda");
  PosStream ds = stream_of(d, "one_neg_transform: d");
  return grow_window(prec, [&](long W) -> OneNegPlan {
    GapWindow g = gap_window(l, ds, W, prec);
    require_dominance(g, "one_neg_transform");
    Rat T = exact_sigma(g, "one_neg_transform");
    if (!(T > 0)) throw std::domain_error("one_neg_transform: excess must be positive");

    // shave position: first entry strictly above d and strictly above its successor
    long n0 = 0;
    for (long n = 1; n < W; ++n)
      if (g.lam[n] > g.dd[n] && g.lam[n] > g.lam[n + 1]) {
        n0 = n;
        break;
      }
    if (n0 == 0)
      throw NeedWindow{
          "no shave position yet; a positive excess over a vanishing sequence guarantees one"};

    // cut points with strictly widening spacing; cut k requires lam_{n+1} < 2^-k
    std::vector<long> cuts;
    long prev2 = n0, prev = n0;
    for (int k = 1; k <= max_cuts; ++k) {
      long lo = (k == 1) ? n0 : std::max(prev, 2 * prev - prev2);
      Rat thr = pow2_inv(k);
      long nk = 0;
      for (long n = lo + 1; n < W; ++n)
        if (g.lam[n + 1] < thr) {
          nk = n;
          break;
        }
      if (nk == 0) {
        if (cuts.size() >= 2) break;
        throw NeedWindow{"fewer than two cut points fit the window"};
      }
      cuts.push_back(nk);
      prev2 = prev;
      prev = nk;
    }
    long K = static_cast<long>(cuts.size());
    long nK = cuts.back();

    std::vector<Rat> gamma_block(K);
    for (long k = 0; k < K; ++k) {
      long left = (k == 0) ? n0 : cuts[k - 1];
      gamma_block[k] = Rat(pow2_inv(k + 1) / Rat(cuts[k] - left));
    }
    // alpha: half the tighter of the two slack bounds at the shave position
    Rat cap_d = Rat(g.lam[n0] - g.dd[n0]);
    Rat cap_step = Rat(Rat(g.lam[n0] - g.lam[n0 + 1]) / Rat(1 + gamma_block[0]));
    Rat alpha = Rat(std::min(cap_d, cap_step) / 2);
    if (!(alpha > 0)) throw std::logic_error("one_neg_transform: alpha must be positive");

    std::vector<Rat> lt(nK + 1);
    for (long i = 1; i <= nK; ++i) lt[i] = g.lam[i];
    lt[n0] = Rat(lt[n0] - alpha);
    for (long k = 0; k < K; ++k) {
      long left = (k == 0) ? n0 : cuts[k - 1];
      for (long i = left + 1; i <= cuts[k]; ++i) lt[i] = Rat(lt[i] + alpha * gamma_block[k]);
    }

    OneNegPlan plan;
    plan.n0 = n0;
    plan.alpha = alpha;
    // block interiors satisfy the 2/alpha + 1 ratio; positions up to the first cut
    // keep remaining excess >= alpha/2, so 2*lt_1/alpha covers the head
    plan.c1 = std::max(Rat(Rat(2) / alpha + 1), Rat(Rat(2) * lt[1] / alpha));
    plan.total = T;
    plan.cuts = cuts;
    plan.gamma_block = gamma_block;
    plan.lambda_tilde.assign(lt.begin() + 1, lt.end());
    plan.window = nK;

    // exact sweep: order, dominance over d, nonnegative running gap, and the residual
    // bound lt_n <= c1 * (T - sum_{i<=n}(lt_i - d_i))
    Rat run(0), run_td(0);
    long ci = 0;
    for (long n = 1; n <= nK; ++n) {
      if (n < nK && lt[n] < lt[n + 1])
        throw std::logic_error("one_neg_transform: rewrite not nonincreasing at n=" +
                               std::to_string(n));
      if (lt[n] < g.dd[n])
        throw std::logic_error("one_neg_transform: rewrite dips below d at n=" +
                               std::to_string(n));
      run = Rat(run + g.lam[n] - lt[n]);
      if (run < 0)
        throw std::logic_error("one_neg_transform: running gap negative at n=" +
                               std::to_string(n));
      run_td = Rat(run_td + lt[n] - g.dd[n]);
      if (lt[n] > Rat(plan.c1 * Rat(T - run_td)))
        throw std::logic_error("one_neg_transform: residual bound fails at n=" +
                               std::to_string(n));
      if (ci < K && n == cuts[ci]) {
        if (run != Rat(alpha * pow2_inv(ci + 1)))
          throw std::logic_error("one_neg_transform: cut identity fails at cut " +
                                 std::to_string(ci + 1));
        ++ci;
      }
    }
    return plan;
  });
}

MidseqPlan midseq_transform(const ExtendedSequence& lambda, const ExtendedSequence& d,
                            int max_blocks, const Precision& prec) {
  if (max_blocks < 2) throw std::domain_error("midseq_transform: max_blocks must be >= 2");
  PosStream l = stream_of(lambda, "midseq_transform: lambda");
  PosStream ds = stream_of(d, "midseq_transform: d");
  return grow_window(prec, [&](long W) -> MidseqPlan {
    GapWindow g = gap_window(l, ds, W, prec);
    if (g.cmp.rel == EvCmp::Unknown)
      throw std::domain_error(
          "midseq_transform: tail relation not certifiable for these tail shapes");
    if (g.cmp.from >= W) throw NeedWindow{"tail relation settles past the window"};
    for (long k = 1; k <= W; ++k)
      if (g.delta[k] < 0)
        throw std::domain_error("midseq_transform: gap profile negative at k=" +
                                std::to_string(k));
    Rat sigma = exact_sigma(g, "midseq_transform");
    if (!(sigma > 0))
      throw std::domain_error("midseq_transform: gap liminf must be positive");
    long F = g.cmp.from;

    MidseqPlan plan;
    plan.sigma = sigma;
    std::vector<Rat> lt;

    if (g.cmp.rel == EvCmp::Lt || g.cmp.rel == EvCmp::Equal) {
      // the profile sits at or above its liminf from F on: finitely many low positions
      plan.case_tag = 1;
      long M = 0, Z = 0;
      for (long k = 1; k <= W; ++k) {
        if (g.delta[k] < sigma) M = k;
        if (g.delta[k] == 0) Z = k;
      }
      if (M > F || Z > F)
        throw std::logic_error("midseq_transform: window contradicts the tail certificate");
      plan.M = M;
      plan.Z = Z;
      if (Z + 1 > W) throw NeedWindow{"zero marker at the window edge"};
      Rat d_Z = (Z == 0) ? Rat(g.lam[1] + 1) : g.dd[Z];
      Rat alpha = Rat(d_Z - g.dd[Z + 1]);
      if (!(alpha > 0))
        throw std::logic_error("midseq_transform: step at the last zero must be positive");
      Rat beta = sigma;
      for (long k = Z + 1; k <= W; ++k) beta = std::min(beta, g.delta[k]);
      if (!(beta > 0))
        throw std::logic_error("midseq_transform: post-zero infimum must be positive");
      plan.alpha = alpha;
      plan.beta = beta;
      long N = M + 1;
      {
        Int a = rat_floor(Rat(sigma / alpha)) + 1;
        Int b = rat_floor(Rat(Rat(M) * sigma / beta)) + 1;
        Int cand = a > b ? a : b;
        if (cand > N) N = static_cast<long>(cand);
      }
      plan.N = N;
      if (Z + N + 1 > W) throw NeedWindow{"lift block exceeds the window"};
      lt.assign(W + 1, Rat(0));
      for (long i = 1; i <= W; ++i) lt[i] = g.dd[i];
      Rat lift = Rat(sigma / N);
      for (long i = Z + 1; i <= Z + N; ++i) lt[i] = Rat(lt[i] + lift);
      plan.window = W;
      // exact transfer identity: the lift moves sigma in total
      Rat moved(0);
      for (long i = 1; i <= W; ++i) moved = Rat(moved + lt[i] - g.dd[i]);
      if (moved != sigma)
        throw std::logic_error("midseq_transform: transferred mass differs from sigma");
    } else {
      // the profile increases strictly toward its liminf: infinitely many low positions
      plan.case_tag = 2;
      std::vector<long> m, Nj;
      std::vector<Rat> slopes;
      long m_prev = 0;
      for (int j = 0; j < max_blocks; ++j) {
        long hi = std::max(F, m_prev) + 1;
        if (hi > W) {
          if (Nj.size() >= 2) break;
          throw NeedWindow{"marker beyond the window"};
        }
        long mj = m_prev + 1;
        for (long k = m_prev + 1; k <= hi; ++k)
          if (g.delta[k] <= g.delta[mj]) mj = k;  // keep the last attainment
        Rat base = m.empty() ? Rat(0) : g.delta[m.back()];
        if (!(g.delta[mj] > base)) {
          if (m.empty())
            throw std::domain_error(
                "midseq_transform: gap profile touches zero in the oscillating regime; "
                "not supported");
          throw std::logic_error("midseq_transform: marker gaps must strictly increase");
        }
        Rat diff = Rat(g.delta[mj] - base);
        long Nprev = Nj.empty() ? 0 : Nj.back();
        long nj;
        Rat s;
        if (Nj.empty()) {
          nj = mj;
          s = Rat(diff / Rat(nj));
        } else {
          Rat sprev = slopes.back();
          Int low = Int(Nprev) + rat_floor(Rat(diff / sprev)) + 1;
          long lo_l = static_cast<long>(low);
          nj = std::max<long>(std::max<long>(Nprev + 1, mj), lo_l);
          s = Rat(diff / Rat(nj - Nprev));
          if (!(s < sprev))
            throw std::logic_error("midseq_transform: slope must strictly decrease");
        }
        if (nj > W) {
          if (Nj.size() >= 2) break;
          throw NeedWindow{"block end beyond the window"};
        }
        m.push_back(mj);
        Nj.push_back(nj);
        slopes.push_back(s);
        m_prev = mj;
      }
      if (Nj.size() < 2) throw NeedWindow{"fewer than two blocks fit the window"};
      plan.m = m;
      plan.blocks = Nj;
      plan.slopes = slopes;
      long WJ = Nj.back();
      lt.assign(WJ + 1, Rat(0));
      size_t bi = 0;
      for (long i = 1; i <= WJ; ++i) {
        if (i > Nj[bi]) ++bi;
        lt[i] = Rat(g.dd[i] + slopes[bi]);
      }
      plan.window = WJ;
      // the window transfer closes at the last marker's gap value exactly
      Rat moved(0);
      for (long i = 1; i <= WJ; ++i) moved = Rat(moved + lt[i] - g.dd[i]);
      if (moved != g.delta[m.back()])
        throw std::logic_error("midseq_transform: window transfer does not close");
    }

    long WP = plan.window;
    // shared exact sweep: order, dominance over d, nonnegative gap profile
    Rat run(0);
    for (long k = 1; k <= WP; ++k) {
      if (k < WP && lt[k] < lt[k + 1])
        throw std::logic_error("midseq_transform: rewrite not nonincreasing at k=" +
                               std::to_string(k));
      if (lt[k] < g.dd[k])
        throw std::logic_error("midseq_transform: rewrite dips below d at k=" +
                               std::to_string(k));
      run = Rat(run + g.lam[k] - lt[k]);
      if (run < 0)
        throw std::logic_error("midseq_transform: rewritten gap negative at k=" +
                               std::to_string(k));
    }

    // strictness pass: dent i0 by eps, return eps * 2^(i0-i) beyond it
    long i0 = 0;
    for (long i = 1; i < WP; ++i)
      if (lt[i] > g.dd[i] && lt[i] > lt[i + 1]) {
        i0 = i;
        break;
      }
    if (i0 == 0) throw std::logic_error("midseq_transform: no strictness position found");
    Rat eps = std::min(Rat(lt[i0] - g.dd[i0]), Rat(Rat(lt[i0] - lt[i0 + 1]) / 2));
    plan.i0 = i0;
    plan.eps = eps;
    std::vector<Rat> lc(lt);
    lc[i0] = Rat(lc[i0] - eps);
    for (long i = i0 + 1; i <= WP; ++i) lc[i] = Rat(lc[i] + eps * pow2_inv(i - i0));
    // the dent keeps the order, the dominance, and strict positivity of the gap beyond i0
    Rat runc(0);
    for (long k = 1; k <= WP; ++k) {
      if (k < WP && lc[k] < lc[k + 1])
        throw std::logic_error("midseq_transform: strictness pass breaks the order");
      if (lc[k] < g.dd[k])
        throw std::logic_error("midseq_transform: strictness pass dips below d");
      if (k > i0 && !(lc[k] > g.dd[k]))
        throw std::logic_error("midseq_transform: strictness fails beyond i0");
      runc = Rat(runc + g.lam[k] - lc[k]);
      if (k >= i0 && !(runc > 0))
        throw std::logic_error("midseq_transform: dented gap not strictly positive");
      if (runc < 0)
        throw std::logic_error("midseq_transform: dented gap negative at k=" +
                               std::to_string(k));
    }
    plan.lambda_tilde.assign(lt.begin() + 1, lt.end());
    plan.lambda_check.assign(lc.begin() + 1, lc.end());
    return plan;
  });
}

ExequalPlan exequal_transform(const ExtendedSequence& lambda_pos,
                              const ExtendedSequence& lambda_neg,
                              const ExtendedSequence& d_pos,
                              const ExtendedSequence& d_neg, int max_blocks,
                              const Precision& prec) {
  if (max_blocks < 1) throw std::domain_error("exequal_transform: max_blocks must be >= 1");
  PosStream lp = stream_of(lambda_pos, "exequal_transform: lambda_pos");
  PosStream ln = stream_of(lambda_neg, "exequal_transform: lambda_neg");
  PosStream dp = stream_of(d_pos, "exequal_transform: d_pos");
  PosStream dn = stream_of(d_neg, "exequal_transform: d_neg");
  return grow_window(prec, [&](long W) -> ExequalPlan {
    GapWindow gp = gap_window(lp, dp, W, prec);
    GapWindow gn = gap_window(ln, dn, W, prec);
    require_dominance(gp, "exequal_transform: positive side");
    require_dominance(gn, "exequal_transform: negative side");
    // strictness must recur forever on both sides; a tail of equalities kills it
    if (gp.cmp.rel == EvCmp::Equal)
      throw std::domain_error(
          "exequal_transform: positive side is eventually equal; strictness must recur");
    if (gn.cmp.rel == EvCmp::Equal)
      throw std::domain_error(
          "exequal_transform: negative side is eventually equal; strictness must recur");
    if (!gp.sigma_known || !gn.sigma_known)
      throw std::domain_error(
          "exequal_transform: two-sided excess not computable for these tail shapes");
    Tri eq = cv_eq(gp.sigma, gn.sigma);
    if (eq == Tri::False)
      throw std::domain_error("exequal_transform: the two-sided excesses differ");
    if (eq == Tri::Unknown)
      throw std::domain_error("exequal_transform: excess equality not certifiable");

    ExequalPlan plan;
    plan.sigma_pos = gp.sigma;
    plan.sigma_neg = gn.sigma;
    std::vector<Rat> lt(W + 1);
    for (long i = 1; i <= W; ++i) lt[i] = gp.lam[i];

    long M_cur = 0, m_prev = 0;
    for (int k = 0; k < max_blocks; ++k) {
      if (M_cur + 1 > W) throw NeedWindow{"next block start beyond the window"};
      Rat thr = gp.delta[M_cur + 1];
      long mk = 0;
      for (long i = m_prev + 1; i <= W; ++i)
        if (gn.delta[i] > thr) {
          mk = i;
          break;
        }
      if (mk == 0) throw NeedWindow{"negative-side marker beyond the window"};
      long nk = 0;
      for (long i = M_cur + 1; i <= W; ++i)
        if (gp.delta[i] >= gn.delta[mk]) {
          nk = i;
          break;
        }
      if (nk == 0) throw NeedWindow{"positive-side marker beyond the window"};
      Rat eta = Rat(gp.delta[nk] - gn.delta[mk]);
      if (eta < 0) throw std::logic_error("exequal_transform: marker mismatch");
      Rat dnk = gp.dd[nk];
      if (!(dnk > 0))
        throw std::domain_error(
            "exequal_transform: candidate exhausted at the positive-side marker");
      long r = 0;
      for (long i = nk + 1; i <= W; ++i)
        if (gp.lam[i] < dnk) {
          r = i;
          break;
        }
      if (r == 0) throw NeedWindow{"spread start beyond the window"};
      long N = static_cast<long>(rat_floor(Rat(eta / Rat(dnk - gp.lam[r])))) + 1;
      long end = r + N - 1;
      if (end > W) throw NeedWindow{"block end beyond the window"};

      lt[nk] = Rat(lt[nk] - eta);
      Rat add = Rat(eta / Rat(N));
      for (long i = r; i <= end; ++i) lt[i] = Rat(lt[i] + add);

      ExequalBlock blk;
      blk.begin = M_cur + 1;
      blk.end = end;
      blk.m = mk;
      blk.n = nk;
      blk.r = r;
      blk.N = N;
      blk.eta = eta;

      // the rewritten block stays majorized by the original block, exactly
      {
        std::vector<Rat> a, b;
        for (long i = blk.begin; i <= end; ++i) {
          a.push_back(gp.lam[i]);
          b.push_back(lt[i]);
        }
        std::sort(a.rbegin(), a.rend());
        std::sort(b.rbegin(), b.rend());
        Rat pa(0), pb(0);
        for (size_t t = 0; t < a.size(); ++t) {
          pa = Rat(pa + a[t]);
          pb = Rat(pb + b[t]);
          if (pb > pa)
            throw std::logic_error("exequal_transform: block majorization fails");
        }
        if (pa != pb) throw std::logic_error("exequal_transform: block totals differ");
      }
      for (long i = blk.begin; i <= end; ++i)
        if (lt[i] < gp.dd[i])
          throw std::logic_error("exequal_transform: rewrite dips below the candidate");
      // gap alignment: the rewritten positive gap at n_k equals the negative gap at m_k
      Rat s(0);
      for (long i = 1; i <= nk; ++i) s = Rat(s + lt[i] - gp.dd[i]);
      if (s != gn.delta[mk])
        throw std::logic_error("exequal_transform: gap alignment fails at the marker");

      plan.blocks.push_back(blk);
      M_cur = end;
      m_prev = mk;
    }
    plan.lambda_tilde.assign(lt.begin() + 1, lt.end());
    plan.window = W;
    return plan;
  });
}

FisPlan fis_transform(const ExtendedSequence& lambda, const std::vector<Rat>& d,
                      const Precision& prec) {
  if (d.empty()) throw std::domain_error("fis_transform: d must be nonempty");
  for (size_t i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0)) throw std::domain_error("fis_transform: d must be positive");
    if (i && d[i] > d[i - 1])
      throw std::domain_error("fis_transform: d must be nonincreasing");
  }
  PosStream l = stream_of(lambda, "fis_transform: lambda");
  long N = static_cast<long>(d.size());
  return grow_window(prec, [&](long W) -> FisPlan {
    if (W < N + 1) throw NeedWindow{"window shorter than the target"};
    std::vector<Rat> lam(W + 1, Rat(0));
    PosIter il(l);
    for (long k = 1; k <= W; ++k) {
      if (!il.has_next()) break;
      lam[k] = il.next();
    }
    Rat ps(0);
    for (long k = 1; k <= N; ++k) {
      ps = Rat(ps + lam[k] - d[k - 1]);
      if (ps < 0)
        throw std::domain_error("fis_transform: partial-sum dominance fails at k=" +
                                std::to_string(k));
    }
    // closing index: smallest M with sum(lam, 1..M) - sum(d) - (M - N) d_N <= 0
    Rat dN = d.back();
    Rat f = ps;
    long M = 0;
    for (long k = N;; ++k) {
      if (f <= 0) {
        M = k;
        break;
      }
      if (k + 1 > W) throw NeedWindow{"closing index beyond the window"};
      f = Rat(f + lam[k + 1] - dN);
    }

    FisPlan plan;
    plan.M = M;
    std::vector<Rat> lt(W + 1);
    for (long i = 1; i <= W; ++i) lt[i] = lam[i];
    for (long i = 1; i <= N && i <= W; ++i) lt[i] = d[i - 1];
    if (M > N) {
      for (long i = N + 1; i < M; ++i) lt[i] = dN;
      Rat lamM = Rat(f + dN);
      if (!(lamM > 0) || lamM > dN)
        throw std::logic_error("fis_transform: closing entry out of range");
      lt[M] = lamM;
    }
    // exact conclusions: dominance on [1, M] with equality at M; order on the window
    Rat a(0), b(0);
    for (long k = 1; k <= M; ++k) {
      a = Rat(a + lam[k]);
      b = Rat(b + lt[k]);
      if (b > a)
        throw std::logic_error("fis_transform: majorization fails at k=" + std::to_string(k));
    }
    if (a != b) throw std::logic_error("fis_transform: totals differ on the closed block");
    for (long k = 1; k < W; ++k)
      if (lt[k] < lt[k + 1])
        throw std::logic_error("fis_transform: rewrite not nonincreasing at k=" +
                               std::to_string(k));
    plan.lambda_tilde.assign(lt.begin() + 1, lt.end());
    plan.window = W;
    return plan;
  });
}

FizPlan fiz_transform(const ExtendedSequence& lambda, long M, const Precision& prec) {
  if (M < 0) throw std::domain_error("fiz_transform: M must be >= 0");
  if (!(zeros_total(lambda) == XNat(0L)))
    throw std::domain_error("fiz_transform: sequence must have no zero terms");
  if (!positive_count(lambda).is_inf() || !negative_count(lambda).is_inf())
    throw std::domain_error(
        "fiz_transform: infinitely many terms of each sign are required");
  return grow_window(prec, [&](long W) -> FizPlan {
    std::vector<Rat> v = materialize(lambda, W);
    // canonical order is decreasing in magnitude, so the first positive is the largest
    long i0 = 0;
    for (long i = 0; i < W; ++i)
      if (v[i] > 0) {
        i0 = i + 1;
        break;
      }
    if (i0 == 0) throw NeedWindow{"no positive entry in the window"};
    std::vector<long> negs;
    for (long i = 0; i < W; ++i)
      if (v[i] < 0) negs.push_back(i + 1);
    if (static_cast<long>(negs.size()) < M)
      throw NeedWindow{"fewer than M negative entries in the window"};
    // smallest magnitudes sit at the end of the window
    std::vector<long> pick(negs.end() - M, negs.end());
    Rat total = v[i0 - 1];
    for (long p : pick) total = Rat(total + v[p - 1]);
    if (!(total > 0)) throw NeedWindow{"selected block sum not positive yet"};

    FizPlan plan;
    plan.J = pick;
    plan.J.push_back(i0);
    std::sort(plan.J.begin(), plan.J.end());
    plan.i0 = i0;
    plan.lambda_i0 = total;
    plan.lambda_window = v;
    std::vector<Rat> w = v;
    for (long p : pick) w[p - 1] = Rat(0);
    w[i0 - 1] = total;
    plan.lambda_tilde_window = w;
    plan.window = W;

    // exact conclusions on the touched set: majorization with equal totals, M new zeros
    std::vector<Rat> a, b;
    for (long p : plan.J) {
      a.push_back(v[p - 1]);
      b.push_back(w[p - 1]);
    }
    std::sort(a.rbegin(), a.rend());
    std::sort(b.rbegin(), b.rend());
    Rat pa(0), pb(0);
    for (size_t t = 0; t < a.size(); ++t) {
      pa = Rat(pa + a[t]);
      pb = Rat(pb + b[t]);
      if (pb > pa)
        throw std::logic_error("fiz_transform: majorization fails on the touched set");
    }
    if (pa != pb) throw std::logic_error("fiz_transform: touched-set totals differ");
    long zeros = 0;
    for (const Rat& x : w)
      if (x == 0) ++zeros;
    if (zeros != M) throw std::logic_error("fiz_transform: zero count mismatch");
    return plan;
  });
}

}  // namespace diag
