#pragma once

#include <optional>
#include <string>

#include "diag/sequence.hpp"

namespace diag {

// Candidate minimizer abscissas for the step functional on one side of zero:
// distinct prefix values plus the first k_tail terms of each exact tail component,
// sorted by decreasing magnitude. Signed: negative direction yields negative values.
struct KnotList {
  std::vector<Rat> values;
};

// g(q) = sum over terms >= q of (term - q), on one sign class given as a stream.
CertifiedValue step_mass(const PosStream& ps, const Rat& q, const Precision& prec);

// The two-branch comparison functional: for alpha > 0,
//   sum_{lambda_i >= alpha} (lambda_i - alpha) - sum_{d_i >= alpha} (d_i - alpha);
// for alpha < 0 the mirror over terms <= alpha. alpha = 0 is rejected.
CertifiedValue delta(const Rat& alpha, const ExtendedSequence& lambda,
                     const ExtendedSequence& d, const Precision& prec);

KnotList knots(const ExtendedSequence& lambda, int direction, const Precision& prec);

struct MajResult {
  Tri status = Tri::Unknown;
  std::optional<Rat> witness_alpha;  // set when status == False
  std::string note;
};

// delta(alpha) >= 0 for every alpha != 0, decided via knot checks plus certified
// deep-tail bounds; "fails" carries an explicit witness alpha.
MajResult lebesgue_majorizes(const ExtendedSequence& lambda, const ExtendedSequence& d,
                             const Precision& prec);

struct RiemannResult {
  Tri status = Tri::Unknown;
  std::optional<Int> witness_n;  // set when status == False
  std::string note;
};

// Partial-sum dominance sum(d,1..n) <= sum(lambda,1..n) for every n: exact merged scan
// up to `horizon` (capped by the scan budget), then closed-form tail certification.
RiemannResult riemann_majorizes(const ExtendedSequence& lambda_pos,
                                const ExtendedSequence& d_pos, const Int& horizon,
                                const Precision& prec);

struct ExcessReport {
  CertifiedValue sigma_plus;
  CertifiedValue sigma_minus;
  bool sigma_plus_known = true;   // false: value is an uncertified probe range
  bool sigma_minus_known = true;
  Tri lambda_plus_summable = Tri::Unknown;
  Tri lambda_minus_summable = Tri::Unknown;
  Tri d_plus_summable = Tri::Unknown;
  Tri d_minus_summable = Tri::Unknown;
};

// liminf of the one-sided partial-sum gaps between the rearranged positive
// (resp. negative) parts.
ExcessReport excess(const ExtendedSequence& lambda, const ExtendedSequence& d,
                    const Precision& prec);

// One-sided excess on raw streams; `known` is false when only a probe range is
// available (unsupported nonsummable mixtures).
struct StreamExcess {
  CertifiedValue value;
  bool known = true;
  Tri lambda_summable = Tri::Unknown;
  Tri d_summable = Tri::Unknown;
};

StreamExcess stream_excess(const PosStream& lam, const PosStream& d, const Precision& prec);

struct LRReport {
  Tri riemann = Tri::Unknown;
  Tri lebesgue = Tri::Unknown;
  Rat liminf_delta;    // limit of delta(alpha) as alpha drops to 0 (finite truncation)
  Rat liminf_gap;      // eventual partial-sum gap (finite truncation)
  bool equivalent = false;   // riemann and lebesgue verdicts agree
  bool gap_equal = false;    // the two liminfs coincide
};

// Diagnostic oracle on finitely supported truncations: checks that partial-sum
// dominance and the step-functional criterion agree, and that the small-alpha limit of
// delta equals the eventual partial-sum gap.
LRReport lr_equivalence_check(const ExtendedSequence& lambda_pos,
                              const ExtendedSequence& d_pos, long samples,
                              const Precision& prec);

}  // namespace diag
