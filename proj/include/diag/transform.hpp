#pragma once

#include <vector>

#include "diag/sequence.hpp"

namespace diag {

// Sequence transformers: exact rational rewrites of an eigenvalue list that keep it
// majorizing a target while normalizing the partial-sum gap profile. Each transformer
// verifies its own postconditions in exact arithmetic on the emitted window and throws
// std::logic_error if any fails; precondition violations throw std::domain_error.

// Single trade between the extremes of a finite nonincreasing list:
// (l1, ..., lN) -> (l1 - delta, l2, ..., l(N-1), lN + delta), returned unsorted.
// Requires 0 <= delta <= l1 - lN. The decreasing rearrangement of the result stays
// below the input in the partial-sum order; verified exactly before returning.
std::vector<Rat> convmove(const std::vector<Rat>& lambda, const Rat& delta);

// Plan produced by one_neg_transform. The rewrite takes alpha off the entry at n0 and
// sprinkles it beyond n0 with weights gamma summing to one, so the running
// sum(lambda - lambda_tilde) stays in [0, alpha] and collapses to alpha * 2^-k at each
// cut point. c1 = max(2/alpha + 1, 2*lambda_tilde_1/alpha) bounds lambda_tilde_n / t_{n+1}
// on the window, where t_{n+1} = total - sum_{i<=n}(lambda_tilde_i - d_i).
struct OneNegPlan {
  long n0 = 0;
  Rat alpha;
  Rat c1;
  Rat total;                     // sum(lambda - d), exact
  std::vector<long> cuts;        // n_1 < n_2 < ...; cut k pins the running gap to alpha*2^-k
  std::vector<Rat> gamma_block;  // gamma value on (n_{k-1}, n_k], one entry per cut
  std::vector<Rat> lambda_tilde; // positions 1..window
  long window = 0;               // equals cuts.back()
};

// Requires nonincreasing positive lambda, d with lambda_i >= d_i at every position and
// sum(lambda - d) in (0, inf) computable exactly. max_cuts bounds the emitted cut list.
OneNegPlan one_neg_transform(const ExtendedSequence& lambda, const ExtendedSequence& d,
                             int max_cuts = 8, const Precision& prec = Precision{});

// Plan produced by midseq_transform. Flattens the gap profile delta_k = sum(lambda - d)
// so that the rewritten profile stays nonnegative with liminf zero, total transfer
// sigma = liminf delta_k, and lambda_tilde >= d. Two regimes:
//   case 1: delta_k < sigma only finitely often; lift d by sigma/N on a block of N
//           positions starting after the last zero of delta (Z).
//   case 2: delta_k < sigma for all large k; lift d by a decreasing slope s_j on
//           consecutive blocks (N_{j-1}, N_j] chosen so the profile stays sandwiched
//           between delta_k - delta_{m_{j-1}} and delta_k - delta_{m_j}.
// lambda_check is the final strictness pass: it dents position i0 by eps and returns
// eps * 2^(i0-i) to every later position, making the gap profile strictly positive
// from i0 on while keeping every other conclusion.
struct MidseqPlan {
  int case_tag = 0;  // 1 or 2
  Rat sigma;
  long M = 0;   // case 1: last k with delta_k < sigma (0 if none)
  long Z = 0;   // case 1: last k with delta_k = 0 (0 if none)
  long N = 0;   // case 1: block length
  Rat alpha;    // case 1: d_Z - d_{Z+1} with d_0 := lambda_1 + 1
  Rat beta;     // case 1: inf of delta_k over k > Z
  std::vector<long> m;      // case 2: marker positions, delta there strictly increasing
  std::vector<long> blocks; // case 2: block right endpoints N_j
  std::vector<Rat> slopes;  // case 2: lift on block j, strictly decreasing
  long i0 = 0;
  Rat eps;
  std::vector<Rat> lambda_tilde;  // positions 1..window
  std::vector<Rat> lambda_check;  // positions 1..window
  long window = 0;
};

// Requires delta_k >= 0 everywhere and sigma = liminf delta_k in (0, inf), certified
// from the tail shapes; sigma must be exactly computable. Beyond the window,
// lambda_tilde equals d (case 1) or continues the block rule (case 2), and
// lambda_check adds eps * 2^(i0-i).
MidseqPlan midseq_transform(const ExtendedSequence& lambda, const ExtendedSequence& d,
                            int max_blocks = 12, const Precision& prec = Precision{});

// One block of an exequal plan: on I_k = [begin, end], the positive-side excess over d
// is pinned to the negative-side excess at m_k by shaving eta off position n_k and
// returning eta/N across [r, end].
struct ExequalBlock {
  long begin = 0, end = 0;
  long m = 0, n = 0;  // markers into the negative / positive gap profiles
  long r = 0;         // first position past n with lambda_r < d_n
  long N = 0;         // spread width; end = r + N - 1
  Rat eta;            // excess mismatch repaired by this block
};

// Positive-side rewrite aligning the two gap profiles block by block:
// after block k, sum_{i<=n_k}(lambda_tilde_i - d_i) equals the negative-side gap at
// m_k exactly, the block stays majorized by the original block, and lambda_tilde >= d.
struct ExequalPlan {
  std::vector<ExequalBlock> blocks;
  std::vector<Rat> lambda_tilde;  // positive side, positions 1..window
  long window = 0;
  CertifiedValue sigma_pos, sigma_neg;  // the matched two-sided excess (possibly +inf)
};

// All four inputs are nonnegative nonincreasing magnitude sequences; requires
// lambda >= d pointwise on both sides, strict infinitely often on both sides, and
// equal two-sided excesses (possibly both infinite).
ExequalPlan exequal_transform(const ExtendedSequence& lambda_pos,
                              const ExtendedSequence& lambda_neg,
                              const ExtendedSequence& d_pos,
                              const ExtendedSequence& d_neg, int max_blocks = 8,
                              const Precision& prec = Precision{});

// Plan produced by fis_transform: prepend the finite target d as the first N entries,
// level the stretch (N, M) at d_N, and close the books at position M with the exact
// remainder, so positions 1..M of the rewrite are majorized by lambda with equal totals
// and everything past M is untouched.
struct FisPlan {
  long M = 0;
  std::vector<Rat> lambda_tilde;  // positions 1..window, window >= M
  long window = 0;
};

// lambda: positive nonincreasing (list + tails); d: finite positive nonincreasing with
// sum_{i<=k}(lambda_i - d_i) >= 0 for k <= len(d).
FisPlan fis_transform(const ExtendedSequence& lambda, const std::vector<Rat>& d,
                      const Precision& prec = Precision{});

// Plan produced by fiz_transform: plant exactly M zeros into a nowhere-zero signed
// sequence by zeroing M small negative entries and absorbing their mass into the
// largest positive entry, keeping the touched index set J majorized by its original
// values.
struct FizPlan {
  std::vector<long> J;  // touched positions (1-based, increasing), |J| = M + 1
  long i0 = 0;          // the unique positive position in J
  Rat lambda_i0;        // new value at i0: the exact sum over J
  std::vector<Rat> lambda_window;        // original terms, positions 1..window
  std::vector<Rat> lambda_tilde_window;  // rewritten terms, positions 1..window
  long window = 0;
};

// lambda: signed sequence with no zero terms and infinitely many terms of each sign
// (certified from the tails). M >= 0.
FizPlan fiz_transform(const ExtendedSequence& lambda, long M,
                      const Precision& prec = Precision{});

}  // namespace diag
