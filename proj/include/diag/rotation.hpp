#pragma once

#include <cstddef>
#include <vector>

#include "diag/matrix.hpp"
#include "diag/rational.hpp"

namespace diag {

// One two-coordinate rotation with parameter alpha in [0,1] and sign +-1:
//   e_i = sqrt(alpha) f_i + sign sqrt(1-alpha) f_j
//   e_j = sqrt(1-alpha) f_i - sign sqrt(alpha) f_j
struct RotMove {
  std::size_t i = 0, j = 0;
  double alpha = 1.0;
  int sign = 1;
};

struct RotationChain {
  std::vector<RotMove> moves;
  SymMat basis;  // orthogonal; columns are the chain's vectors in the original frame
};

SymMat move_matrix(std::size_t n, const RotMove& mv);
// e <- G^T e G and, when given, basis <- basis G. O(n) per move.
void apply_move(SymMat& e, SymMat* basis, const RotMove& mv);

struct OffdiagResult {
  RotMove move;
  double achieved_i = 0.0;
  double achieved_j = 0.0;
};

// Rotates coordinates (i, j) so entry (i, i) becomes `target`; entry (j, j) receives
// the complementary value, preserving the 2x2 block trace. Requires the two diagonal
// entries to differ and to bracket the target; throws std::invalid_argument otherwise.
OffdiagResult offdiag_move(SymMat& e, std::size_t i, std::size_t j, double target,
                           SymMat* basis = nullptr);

struct LossChainReport {
  RotationChain chain;
  std::vector<double> achieved;  // diagonal of the conjugated operator
  Rat completeness_product;      // prod (1 - alpha_i), exact
};

// Forward rotation recursion e_k = sqrt(a_k) ee_k + sqrt(1-a_k) f_{k+1} applied to
// diag(f_diag); f_diag needs exactly alphas.size()+1 entries, alphas in [0,1].
LossChainReport loss_chain(const std::vector<double>& f_diag,
                           const std::vector<Rat>& alphas);

struct NolossChainReport {
  RotationChain chain;
  std::vector<std::vector<double>> tilde;  // ee_1 .. ee_{k+1} in the original frame
  Rat ratio_sum;                           // sum alpha_i/(1-alpha_i), exact
  double max_cauchy_residual = 0.0;  // worst | ||ee_a - ee_b||^2 - closed form |
};

// Same recursion with alphas in [0,1); every pairwise distance ||ee_a - ee_b||^2 is
// compared against the closed form 2(1 - sqrt(prod_{j=a}^{b-1}(1-alpha_j))).
NolossChainReport noloss_chain(std::size_t f_count, const std::vector<Rat>& alphas);

// Max-norm Gram defect of the chain's basis for the forward recursion, computed in
// streaming form (no dense basis), usable at chain lengths where the full matrix
// would not fit in memory.
double chain_orth_defect(const std::vector<Rat>& alphas);

// Finite Schur-Horn realization: a symmetric matrix with eigenvalue list `lambda` and
// diagonal `d` (in the given order), built as a chain of two-coordinate rotations on
// exact rational bookkeeping. Requires d majorized by lambda with equal totals; throws
// std::invalid_argument naming the first violated partial-sum index otherwise.
SymMat schur_horn_build(const std::vector<Rat>& lambda, const std::vector<Rat>& d);

}  // namespace diag
