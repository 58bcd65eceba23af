#pragma once

#include <vector>

#include "diag/tail.hpp"

namespace diag {

// A real sequence converging to zero: explicit rational prefix + closed-form tails +
// zero count. negative_tail holds magnitudes and is read with a minus sign.
// Normalized form: prefix positives nonincreasing, then negatives by nonincreasing
// magnitude; no prefix entry of either sign sits strictly below a same-sign tail head.
struct ExtendedSequence {
  std::vector<Rat> prefix;
  TailSpec positive_tail;
  TailSpec negative_tail;
  XNat zero_count;

  ExtendedSequence() : zero_count(0L) {}
};

ExtendedSequence seq_fin(std::vector<Rat> prefix, XNat zeros = XNat(0L));
ExtendedSequence seq_tail(TailSpec pos, XNat zeros = XNat(0L));
ExtendedSequence seq_mixed(std::vector<Rat> prefix, TailSpec pos, TailSpec neg,
                           XNat zeros = XNat(0L));

// Structural validity: no zero prefix entries, valid tail components, at most 4
// components per sign.
void validate_sequence(const ExtendedSequence& s);

bool is_normalized(const ExtendedSequence& s);
// Sorts the prefix and absorbs tail heads until no same-sign prefix entry is strictly
// below a tail head. Term multiset is preserved. Throws when an absorption would need an
// irrational or position-locked head.
ExtendedSequence normalize(ExtendedSequence s);

ExtendedSequence negate(const ExtendedSequence& s);
ExtendedSequence positive_part(const ExtendedSequence& s);
ExtendedSequence negative_part(const ExtendedSequence& s);
// Nonnegative sequences only.
ExtendedSequence decreasing_rearrangement(const ExtendedSequence& s);

// Counts over the whole sequence.
XNat zeros_total(const ExtendedSequence& s);
XNat positive_count(const ExtendedSequence& s);
XNat negative_count(const ExtendedSequence& s);
XNat sequence_length(const ExtendedSequence& s);

// Sum of the n largest terms of a nonnegative sequence (n past the end clamps).
CertifiedValue partial_sum(const ExtendedSequence& s, const Int& n, const Precision& prec);
// Total of a nonnegative sequence; PlusInfinity when a nonsummable tail is present.
CertifiedValue total_sum(const ExtendedSequence& s, const Precision& prec);

// Term-multiset union; prefixes and components concatenate, zero counts add.
ExtendedSequence concat(const ExtendedSequence& a, const ExtendedSequence& b);

// First n terms in canonical order: decreasing absolute value, ties positive before
// negative, prefix before tail, earlier component first; zeros after all nonzero terms.
// Shorter when the sequence itself is. Requires exact (rational) terms throughout.
std::vector<Rat> materialize(const ExtendedSequence& s, long n);

// One sign class of a sequence as a merged nonincreasing stream of positive magnitudes.
struct PosStream {
  std::vector<Rat> prefix;  // nonincreasing
  std::vector<TailComp> comps;
};

PosStream positive_stream(const ExtendedSequence& s);
PosStream negative_stream(const ExtendedSequence& s);

XNat ps_count(const PosStream& ps);
bool ps_summable(const PosStream& ps);
bool ps_exact_terms(const PosStream& ps);
Int ps_count_ge(const PosStream& ps, const Rat& q);  // q > 0
Int ps_count_gt(const PosStream& ps, const Rat& q);
// Sum of the n largest terms (clamps at the total count).
CertifiedValue ps_head_sum(const PosStream& ps, const Int& n, const Precision& prec);
CertifiedValue ps_total(const PosStream& ps, const Precision& prec);
// Sum and count of terms >= q (resp. > q), q > 0.
CertifiedValue ps_sum_ge(const PosStream& ps, const Rat& q, const Precision& prec);
CertifiedValue ps_sum_gt(const PosStream& ps, const Rat& q, const Precision& prec);
// n-th largest term, 1-based; exact. Throws on irrational terms or n past the end.
Rat ps_nth(const PosStream& ps, const Int& n);

enum class EvCmp { Equal, Gt, Lt, Unknown };

struct EvCmpResult {
  EvCmp rel = EvCmp::Unknown;
  long from = 0;  // the relation holds at every position i > from
};

// Certified per-position comparison of two streams beyond a computed depth, with
// exhausted streams read as identically zero. Gt/Lt are strict. Handles streams whose
// tail reduces to a single closed-form component (plus structurally identical streams);
// anything else returns Unknown.
EvCmpResult eventual_term_cmp(const PosStream& a, const PosStream& b,
                              const Precision& prec);

// Incremental enumeration of a PosStream in nonincreasing order (exact terms only).
class PosIter {
 public:
  explicit PosIter(const PosStream& ps);
  bool has_next() const;
  Rat next();
  // Consumption state, for residual-stream analysis.
  size_t prefix_position() const { return pi_; }
  std::vector<std::pair<const TailComp*, Int>> comp_positions() const;

 private:
  struct CompState {
    const TailComp* comp;
    Int k;
    Rat cur;      // current term value
    Rat base;     // echo: g_{k-1} bookkeeping
  };
  const PosStream* ps_;
  size_t pi_ = 0;
  std::vector<CompState> cs_;
};

// Certified total of the not-yet-consumed part of a stream.
CertifiedValue ps_rest_total(const PosStream& ps, const PosIter& it, const Precision& prec);

// Structural equality of the not-yet-consumed parts (exact parameter comparison after
// rebasing; position-locked echo tails match only while both sit at their start).
bool ps_residual_equal(const PosStream& a, const PosIter& ia, const PosStream& b,
                       const PosIter& ib);

}  // namespace diag
