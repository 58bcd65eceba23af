#pragma once

#include <vector>

#include "diag/matrix.hpp"
#include "diag/rotation.hpp"

namespace diag {

// Record of a truncated carrier-chain construction. The matrix carries the achieved
// diagonal; `target` is the exact intended diagonal including the residual slot.
// Mixing weights are computed in exact rationals (each step's off-diagonal coupling is
// zero by construction, so the secular solution degenerates to a linear one).
struct BuildTrace {
  SymMat matrix;
  RotationChain chain;
  std::vector<double> achieved_diagonal;
  double residual_entry = 0.0;  // value parked in the residual slot
  std::vector<Rat> alphas;      // exact per-step weights
  std::vector<Rat> target;      // exact intended diagonal, same length as the matrix
  Rat residual_exact;           // exact residual-slot value
  bool c_bound_finite = false;  // sup lambda_n / t_{n+1} over the window, when finite
  Rat c_bound;
};

// Turns diag(-lambda_neg1, lambda_1..lambda_N) into (d_1..d_N, -t_{N+1}) where
// t_n = lambda_neg1 - sum_{i<n}(lambda_i - d_i) is the excess still to absorb.
// A single carrier coordinate walks right, claiming each d_n and keeping -t_{n+1}.
// Requires both lists nonincreasing, lambda_i >= d_i >= 0, lambda_neg1 > 0, and
// t_{N+1} >= 0. Reports sup lambda_n/t_{n+1} (the hypothesis constant of the
// underlying estimate) when every t_{n+1} on the window is positive.
BuildTrace tbound_build(const std::vector<Rat>& lambda_pos, const std::vector<Rat>& d,
                        const Rat& lambda_neg1, long N);

// Turns diag(lambda1, -neg_1..-neg_N) into (achieved_first, eps/2, ..., eps 2^-N):
// the single positive entry absorbs the summable negatives, which are replaced by a
// dyadic epsilon schedule. neg_mags holds magnitudes (nonincreasing, positive);
// tail_sum declares the mass of the omitted tail. With s = sum(neg) + tail_sum the
// preconditions are s < lambda1 and 0 < epsilon < (2/3)(lambda1 - s); the achieved
// first entry then lies in [lambda1 - s - epsilon, lambda1 - s), which is verified.
// residual_exact reports achieved_first - (lambda1 - s - epsilon), the distance above
// the ideal floor (tail_sum + epsilon 2^-N); it vanishes as the truncation deepens.
BuildTrace infmove_build(const Rat& lambda1, const std::vector<Rat>& neg_mags,
                         const Rat& tail_sum, const Rat& epsilon);

struct RealizationReport {
  double eigen_residual = 0.0;  // max |sorted spectrum - sorted lambda|
  double diag_residual = 0.0;   // max |diagonal - d| entrywise, input order
  double off_residual = 0.0;    // eigensolver leftover off-diagonal mass
  int sweeps = 0;
  bool ok(double tol) const { return eigen_residual < tol && diag_residual < tol; }
};

// Diagonalizes `a` with the in-repo Jacobi solver and compares spectrum/diagonal
// against the stated lambda and d.
RealizationReport verify_realization(const SymMat& a, const std::vector<double>& lambda,
                                     const std::vector<double>& d, double tol = 1e-12);

}  // namespace diag
