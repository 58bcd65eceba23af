#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "diag/certified.hpp"

namespace diag {

// Work bounds shared by every certified computation.
// Level 1/2/3 per the CLI: (n_work, k_tail) = (1e4, 64), (1e5, 512), (1e6, 2^14).
struct Precision {
  long n_work = 10000;
  long k_tail = 64;
  Rat tol = Rat(Int(1), pow(Int(10), 12));
  long scan_cap = 4096;    // exact merged-scan budget for partial-sum dominance
  int p_max = 8;           // kernel test p range when z is infinite

  static Precision level(int lvl);
};

// `count` zero terms. A tail of zeros contributes no positive mass.
struct ZeroTail {
  XNat count;
};

// first * ratio^(k-1), k = 1, 2, ...; 0 < ratio < 1, first > 0.
struct GeometricTail {
  Rat first;
  Rat ratio;
};

// coefficient * (k + offset)^(-exponent), k = 1, 2, ...; summable iff exponent > 1.
struct PowerTail {
  Rat coefficient;
  Rat exponent;
  Int offset;
};

// The geometric sequence geo(first, ratio) delayed by one step, with a sparse schedule
// of trace-neutral dips. With g_k = first*ratio^(k-1) the running deficit
// t_k = sum(g,1..k) - sum(echo,1..k) equals g_1/2 at k=1, g_k off schedule, and
// g_k - eta_j at k = j^2 (j >= 3) where eta_j = g_{j^2+1} * 2^-j. Terms are nonincreasing
// for ratio <= 1/2 (ties only within the first three) and total mass equals the
// geometric total. This is the
// minimal closed-form family exhibiting partial-sum violations that are positive on a
// sparse set yet o(term size): the kernel-problem demonstration family.
struct EchoGeoTail {
  Rat first;
  Rat ratio;  // in (0, 1/2]
};

using TailComp = std::variant<ZeroTail, GeometricTail, PowerTail, EchoGeoTail>;

// A tail is a small bag of components; at most 4 positive-term components per sign.
struct TailSpec {
  std::vector<TailComp> comps;

  static TailSpec none() { return {}; }
  static TailSpec geo(Rat first, Rat ratio) { return {{GeometricTail{std::move(first), std::move(ratio)}}}; }
  static TailSpec pow_tail(Rat c, Rat e, Int offset = 0) { return {{PowerTail{std::move(c), std::move(e), std::move(offset)}}}; }
  static TailSpec zeros(XNat n) { return {{ZeroTail{std::move(n)}}}; }
  static TailSpec echo(Rat first, Rat ratio) { return {{EchoGeoTail{std::move(first), std::move(ratio)}}}; }
};

void validate_comp(const TailComp& c);

// Number of strictly positive terms (0 for ZeroTail, infinite otherwise).
XNat comp_positive_count(const TailComp& c);
// Zero terms carried by the component (ZeroTail only).
XNat comp_zero_count(const TailComp& c);
bool comp_summable(const TailComp& c);
// Exact term enumeration is available unless the component is a PowerTail with a
// non-integer exponent (irrational terms).
bool comp_exact_terms(const TailComp& c);

// k-th term (k >= 1) of a positive-term component, exact. Throws if !comp_exact_terms.
Rat comp_term(const TailComp& c, const Int& k);
// Certified bounds on the k-th term (always available).
RatInterval comp_term_bounds(const TailComp& c, const Int& k, unsigned bits = 96);

// sign of (k-th term of a) - (m-th term of b); exact for every component mix.
int comp_term_cmp(const TailComp& a, const Int& k, const TailComp& b, const Int& m);
// sign of (k-th term of a) - q, q rational.
int comp_term_cmp_rat(const TailComp& a, const Int& k, const Rat& q);

// Number of terms >= q (resp. > q) for q > 0; exact, finite since terms -> 0.
Int comp_count_ge(const TailComp& c, const Rat& q);
Int comp_count_gt(const TailComp& c, const Rat& q);
// Number of terms >= resp. > (m-th term of ref) — exact even for irrational references.
Int comp_count_ge_term(const TailComp& c, const TailComp& ref, const Int& m);
Int comp_count_gt_term(const TailComp& c, const TailComp& ref, const Int& m);

// Sum of the first n terms; exact for Zero/Geometric/Echo, certified for Power.
CertifiedValue comp_head_sum(const TailComp& c, const Int& n, const Precision& prec);
CertifiedValue comp_total(const TailComp& c, const Precision& prec);

// Drops the leading term (normalization absorbs it into a prefix). Only legal when the
// head is exactly representable; EchoGeoTail is position-locked and refuses.
TailComp comp_drop_head(const TailComp& c);
bool comp_can_drop_head(const TailComp& c);

// Structural equality of components (exact parameter comparison).
bool comp_equal(const TailComp& a, const TailComp& b);

// The component with its first `consumed` terms removed, when that is closed-form
// (geometric, power). Echo tails are position-locked: only consumed == 0 succeeds.
std::optional<TailComp> comp_rebase(const TailComp& c, const Int& consumed);

// Certified sum of c*x^(-e) for integer x in [a, b] (b absent = infinity), via exact
// head enumeration plus Euler-Maclaurin bracketing with the B2 term and a B4-sized
// remainder envelope (valid: x^(-e) is completely monotone).
CertifiedValue power_interval_sum(const Rat& c, const Rat& e, const Int& a,
                                  const std::optional<Int>& b, const Precision& prec);

// Certified natural log bounds, for the exponent-one power sums.
RatInterval ln_bounds(const Rat& x, unsigned terms = 24);

// Balanced rational summation (keeps gcd work bounded).
Rat sum_tree(std::vector<Rat> xs);

}  // namespace diag
