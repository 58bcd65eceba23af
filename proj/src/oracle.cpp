#include "diag/oracle.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "diag/decision.hpp"
#include "diag/majorization.hpp"
#include "diag/rotation.hpp"
#include "diag/build.hpp"
#include "diag/transform.hpp"

namespace diag {

namespace {

struct Rng {
  std::mt19937_64 g;
  explicit Rng(std::uint64_t seed) : g(seed) {}
  long u(long a, long b) { return std::uniform_int_distribution<long>(a, b)(g); }
  Rat pos(long maxnum, long maxden) { return Rat(u(1, maxnum), u(1, maxden)); }
  Rat ratio() {
    switch (u(0, 2)) {
      case 0: return Rat(1, 2);
      case 1: return Rat(1, 3);
      default: return Rat(2, 5);
    }
  }
};

void record(OracleReport& rep, const std::string& what) {
  ++rep.violations;
  if (rep.note.empty()) rep.note = what;
}

std::vector<Rat> random_desc_positive(Rng& rng, long len, long maxnum, long maxden) {
  std::vector<Rat> v;
  for (long i = 0; i < len; ++i) v.push_back(rng.pos(maxnum, maxden));
  std::sort(v.rbegin(), v.rend());
  return v;
}

// Strictly decreasing prefix sitting above the tail head c: c + step*(L-i+1).
std::vector<Rat> prefix_above(Rng& rng, long L, const Rat& c) {
  Rat step = rng.pos(4, 4);
  std::vector<Rat> p;
  for (long i = 1; i <= L; ++i) p.push_back(Rat(c + Rat(L - i + 1) * step));
  return p;
}

ExtendedSequence random_signed_sequence(Rng& rng) {
  ExtendedSequence s;
  bool pos_tail = rng.u(0, 3) > 0;
  bool neg_tail = rng.u(0, 3) > 1;
  Rat ph = rng.pos(6, 3), nh = rng.pos(6, 3);
  if (pos_tail) s.positive_tail = TailSpec::geo(ph, rng.ratio());
  if (neg_tail) s.negative_tail = TailSpec::geo(nh, rng.ratio());
  long L = rng.u(0, 3);
  for (long i = 0; i < L; ++i) {
    bool neg = rng.u(0, 2) == 0;
    Rat base = neg ? (neg_tail ? nh : Rat(0)) : (pos_tail ? ph : Rat(0));
    Rat mag = Rat(base + rng.pos(8, 4));
    s.prefix.push_back(neg ? Rat(-mag) : mag);
  }
  long zmode = rng.u(0, 9);
  if (zmode >= 7) s.zero_count = XNat(zmode - 6L);
  else if (zmode == 6) s.zero_count = XNat::infinity();
  return normalize(s);
}

}  // namespace

OracleReport oracle_lr_equivalence(std::uint64_t seed, long trials, const Precision& prec) {
  Rng rng(seed);
  OracleReport rep;
  for (long t = 0; t < trials; ++t) {
    ++rep.trials;
    auto lam = random_desc_positive(rng, rng.u(1, 30), 24, 6);
    auto d = random_desc_positive(rng, rng.u(1, 30), 24, 6);
    try {
      LRReport r = lr_equivalence_check(seq_fin(lam), seq_fin(d), 40, prec);
      if (!r.equivalent)
        record(rep, "dominance and step-functional verdicts disagree at trial " +
                        std::to_string(t));
      if (!r.gap_equal)
        record(rep, "step-functional limit differs from the eventual gap at trial " +
                        std::to_string(t));
    } catch (const std::exception& e) {
      record(rep, std::string("throw: ") + e.what());
    }
  }
  return rep;
}

OracleReport oracle_schur_horn_roundtrip(std::uint64_t seed, int dim, long trials,
                                         double tol) {
  Rng rng(seed);
  OracleReport rep;
  for (long t = 0; t < trials; ++t) {
    ++rep.trials;
    std::vector<Rat> lam;
    for (int i = 0; i < dim; ++i) lam.push_back(Rat(rng.u(-8, 16), rng.u(1, 4)));
    std::sort(lam.rbegin(), lam.rend());
    std::vector<Rat> d = lam;
    for (int m = 0; m < 2 * dim; ++m) {
      long i = rng.u(0, dim - 2), j = rng.u(i + 1, dim - 1);
      Rat tt(rng.u(0, 8), 8);
      Rat di = d[i], dj = d[j];
      d[i] = Rat(Rat(Rat(1) - tt) * di + tt * dj);
      d[j] = Rat(tt * di + Rat(Rat(1) - tt) * dj);
    }
    try {
      SymMat m = schur_horn_build(lam, d);
      std::vector<double> lam_d, d_d;
      for (const Rat& x : lam) lam_d.push_back(static_cast<double>(x));
      for (const Rat& x : d) d_d.push_back(static_cast<double>(x));
      RealizationReport r = verify_realization(m, lam_d, d_d, tol);
      rep.max_residual = std::max({rep.max_residual, r.eigen_residual, r.diag_residual});
      if (!r.ok(tol))
        record(rep, "roundtrip residual above tolerance at dim " + std::to_string(dim) +
                        " trial " + std::to_string(t));
    } catch (const std::exception& e) {
      record(rep, std::string("throw: ") + e.what());
    }
  }
  return rep;
}

namespace {

void trial_convmove(Rng& rng) {
  long n = rng.u(1, 10);
  auto v = random_desc_positive(rng, n, 24, 6);
  Rat delta = Rat(Rat(rng.u(0, 8), 8) * Rat(v.front() - v.back()));
  convmove(v, delta);
}

void trial_one_neg(Rng& rng, const Precision& prec) {
  Rat r = rng.ratio();
  Rat cd = rng.pos(8, 4);
  Rat cl = Rat(cd + rng.pos(6, 3) * Rat(Rat(1) - r));
  one_neg_transform(seq_tail(TailSpec::geo(cl, r)), seq_tail(TailSpec::geo(cd, r)),
                    static_cast<int>(rng.u(2, 8)), prec);
}

void trial_midseq(Rng& rng, const Precision& prec) {
  int mode = static_cast<int>(rng.u(0, 2));
  int max_blocks = static_cast<int>(rng.u(2, 10));
  if (mode == 2) {
    Rat r = rng.ratio();
    Rat cd = rng.pos(8, 4);
    Rat cl = Rat(cd + rng.pos(6, 3) * Rat(Rat(1) - r));
    MidseqPlan plan = midseq_transform(seq_tail(TailSpec::geo(cl, r)),
                                       seq_tail(TailSpec::geo(cd, r)), max_blocks, prec);
    if (plan.case_tag != 2) throw std::logic_error("expected the oscillating case");
    return;
  }
  Rat r = rng.ratio();
  Rat c = rng.pos(6, 4);
  long L = mode == 1 ? rng.u(2, 4) : rng.u(1, 4);
  long Z = mode == 1 ? rng.u(1, L - 1) : 0;
  auto d_prefix = prefix_above(rng, L, c);
  std::vector<Rat> lam_prefix = d_prefix;
  Rat b(0);
  for (long i = Z; i < L; ++i) {
    if (i == Z) {
      Rat cap = (Z == 0) ? rng.pos(4, 3)
                         : Rat(d_prefix[Z - 1] - d_prefix[Z]);  // keeps lambda nonincreasing
      b = Rat(cap * Rat(rng.u(1, 4), 4));
    } else {
      b = Rat(b * Rat(rng.u(1, 4), 4));
    }
    lam_prefix[i] = Rat(lam_prefix[i] + b);
  }
  MidseqPlan plan = midseq_transform(
      seq_mixed(lam_prefix, TailSpec::geo(c, r), TailSpec::none()),
      seq_mixed(d_prefix, TailSpec::geo(c, r), TailSpec::none()), max_blocks, prec);
  if (plan.case_tag != 1) throw std::logic_error("expected the settled case");
  if (plan.Z != Z) throw std::logic_error("last-zero marker mismatch");
}

void trial_fis(Rng& rng, const Precision& prec) {
  Rat r = rng.ratio();
  Rat c = rng.pos(6, 3);
  long L = rng.u(0, 3);
  ExtendedSequence lam =
      seq_mixed(prefix_above(rng, L, c), TailSpec::geo(c, r), TailSpec::none());
  long N = rng.u(1, 6);
  auto lv = materialize(lam, N);
  std::vector<Rat> d;
  for (long i = 0; i < N; ++i) {
    Rat cand = Rat(lv[i] * Rat(rng.u(1, 8), 8));
    if (!d.empty()) cand = std::min(cand, d.back());
    d.push_back(cand);
  }
  fis_transform(lam, d, prec);
}

void trial_fiz(Rng& rng, const Precision& prec) {
  ExtendedSequence lam = seq_mixed({}, TailSpec::geo(rng.pos(8, 4), rng.ratio()),
                                   TailSpec::geo(rng.pos(8, 4), rng.ratio()));
  fiz_transform(lam, rng.u(0, 40), prec);
}

void trial_exequal(Rng& rng, const Precision& prec) {
  Rat sig = rng.pos(6, 3);
  Rat rp = rng.ratio(), rn = rng.ratio();
  Rat cdp = rng.pos(8, 4), cdn = rng.pos(8, 4);
  Rat clp = Rat(cdp + sig * Rat(Rat(1) - rp));
  Rat cln = Rat(cdn + sig * Rat(Rat(1) - rn));
  exequal_transform(seq_tail(TailSpec::geo(clp, rp)), seq_tail(TailSpec::geo(cln, rn)),
                    seq_tail(TailSpec::geo(cdp, rp)), seq_tail(TailSpec::geo(cdn, rn)),
                    static_cast<int>(rng.u(1, 8)), prec);
}

}  // namespace

OracleReport oracle_transformer_postconditions(std::uint64_t seed, const std::string& kind,
                                               long trials, const Precision& prec) {
  OracleReport rep;
  auto run = [&](const std::string& name, auto&& trial) {
    if (kind != "all" && kind != name) return;
    Rng rng(seed);
    for (long t = 0; t < trials; ++t) {
      ++rep.trials;
      try {
        trial(rng);
      } catch (const std::exception& e) {
        record(rep, name + " trial " + std::to_string(t) + ": " + e.what());
      }
    }
  };
  run("convmove", [&](Rng& r) { trial_convmove(r); });
  run("one_neg", [&](Rng& r) { trial_one_neg(r, prec); });
  run("midseq", [&](Rng& r) { trial_midseq(r, prec); });
  run("fis", [&](Rng& r) { trial_fis(r, prec); });
  run("fiz", [&](Rng& r) { trial_fiz(r, prec); });
  run("exequal", [&](Rng& r) { trial_exequal(r, prec); });
  if (rep.trials == 0) throw std::invalid_argument("unknown transformer kind: " + kind);
  return rep;
}

OracleReport oracle_decision_metamorphic(std::uint64_t seed, long trials,
                                         const Precision& prec) {
  Rng rng(seed);
  OracleReport rep;
  Precision up = Precision::level(2);
  for (long t = 0; t < trials; ++t) {
    ++rep.trials;
    try {
      ExtendedSequence lam = random_signed_sequence(rng);
      ExtendedSequence d = rng.u(0, 1) ? random_signed_sequence(rng) : lam;
      Verdict v1 = decide(lam, d, prec);
      Verdict vm = decide(negate(lam), negate(d), prec);
      if (v1.outcome != vm.outcome)
        record(rep, "negation flipped the outcome at trial " + std::to_string(t));
      if (v1.outcome == Outcome::Diagonal || v1.outcome == Outcome::NotDiagonal) {
        Verdict v2 = decide(lam, d, up);
        if (v2.outcome != v1.outcome)
          record(rep, "higher precision flipped a definite outcome at trial " +
                          std::to_string(t));
      }
    } catch (const std::exception& e) {
      record(rep, std::string("throw: ") + e.what());
    }
  }
  return rep;
}

}  // namespace diag
