#pragma once

#include "diag/majorization.hpp"

namespace diag {

// One way to split the zero eigenvalues between the two halves of a decoupled
// operator: z0 zeros matched against the candidate's zeros, z1 absorbed into the
// negative half, z2 into the positive half. z0 + z1 + z2 = #{i: lambda_i = 0}.
struct Splitting {
  XNat z0, z1, z2;
};

// All splittings consistent with the zero-count bookkeeping. Empty means no
// splitting exists and the zero-excess branch fails outright.
std::vector<Splitting> enumerate_splittings(const ExtendedSequence& lambda,
                                            const ExtendedSequence& d);

// One-sided kernel test (nonnegative lists): can a positive compact operator with
// eigenvalue list lambda_pos (zeros included) have diagonal d_pos?
//   Yes          all necessary conditions certified, sufficiency reached
//   No           a condition fails with a re-checkable witness
//   Inconclusive the epsilon-relaxed dominance holds for every epsilon while the
//                unrelaxed version fails: the genuinely open boundary case
//   Unknown      certification budget exhausted
struct KernelResult {
  enum class Out { Yes, No, Inconclusive, Unknown };
  Out out = Out::Unknown;
  std::string witness;  // set for No
  Tri zero_counts = Tri::Unknown;   // #{lambda=0} >= #{d=0}
  Tri dominance = Tri::Unknown;     // partial-sum dominance at every n
  Tri total_equality = Tri::Unknown;  // equal totals (infinite = infinite allowed)
  XNat z{0L};  // shift budget: zeros of lambda unmatched by zeros of d
  std::string note;
};

const char* kernel_out_name(KernelResult::Out o);

KernelResult kernel_test(const ExtendedSequence& lambda_pos, const ExtendedSequence& d_pos,
                         const Precision& prec);

// Eventual shifted dominance sum(lambda,1..n) >= sum(d,1..n+p) for all large n,
// in both the unrelaxed (b) and epsilon-relaxed (a) forms. `uniform` marks
// certificates valid for every shift p at once.
struct ShiftedDom {
  Tri b = Tri::Unknown;  // unrelaxed, for this p
  Tri a = Tri::Unknown;  // relaxed: holds for every epsilon > 0
  std::optional<Rat> eps_witness;  // failing epsilon when a == False
  bool uniform = false;
  std::string note;
};

ShiftedDom eventual_shifted(const PosStream& lambda, const PosStream& d, const Int& p,
                            const Precision& prec);

}  // namespace diag
