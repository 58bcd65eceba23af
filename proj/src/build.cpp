#include "diag/build.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace diag {

namespace {

void require_nonincreasing(const std::vector<Rat>& xs, const char* who, const char* name) {
  for (size_t i = 1; i < xs.size(); ++i) {
    if (xs[i] > xs[i - 1]) {
      throw std::invalid_argument(std::string(who) + ": " + name +
                                  " must be nonincreasing (violated at position " +
                                  std::to_string(i + 1) + ")");
    }
  }
}

// One exact carrier step: rotate the pair (i, j), send position i to `target_i`,
// leave the complementary value at j. The off-diagonal coupling E[i][j] is zero at
// call time, so alpha solves the linear mean equation and sits in [0, 1] whenever
// target_i lies between the two diagonal values.
Rat exact_pair_step(SymMat& e, SymMat& basis, RotationChain& chain, size_t i, size_t j,
                    const Rat& val_i, const Rat& val_j, const Rat& target_i) {
  if (val_i == val_j) {
    // Degenerate pair: the target must coincide and no rotation is needed.
    if (target_i != val_i) throw std::logic_error("exact_pair_step: degenerate pair with moving target");
    chain.moves.push_back(RotMove{i, j, 1.0, +1});
    return Rat(1);
  }
  Rat alpha = Rat((target_i - val_j) / (val_i - val_j));
  if (alpha < 0 || alpha > 1) throw std::logic_error("exact_pair_step: target outside the pair bracket");
  RotMove mv{i, j, static_cast<double>(alpha), +1};
  apply_move(e, &basis, mv);
  // Pin the pair diagonal to the exact values; the float rotation already agrees to
  // rounding and the pin keeps the trace identity exact.
  e.at(i, i) = static_cast<double>(target_i);
  e.at(j, j) = static_cast<double>(Rat(val_i + val_j - target_i));
  chain.moves.push_back(mv);
  return alpha;
}

}  // namespace

BuildTrace tbound_build(const std::vector<Rat>& lambda_pos, const std::vector<Rat>& d,
                        const Rat& lambda_neg1, long N) {
  if (N < 1) throw std::invalid_argument("tbound_build: N must be >= 1");
  if (static_cast<long>(lambda_pos.size()) < N || static_cast<long>(d.size()) < N)
    throw std::invalid_argument("tbound_build: need at least N terms of lambda and d");
  if (!(lambda_neg1 > 0))
    throw std::invalid_argument("tbound_build: lambda_neg1 must be positive");
  require_nonincreasing(lambda_pos, "tbound_build", "lambda");
  require_nonincreasing(d, "tbound_build", "d");
  for (long n = 0; n < N; ++n) {
    if (d[n] < 0)
      throw std::invalid_argument("tbound_build: d must be nonnegative (position " +
                                  std::to_string(n + 1) + ")");
    if (lambda_pos[n] < d[n])
      throw std::invalid_argument("tbound_build: dominance fails at n=" + std::to_string(n + 1) +
                                  " (lambda_n < d_n)");
  }

  // Exact excess ladder: t_1 = lambda_neg1, t_{n+1} = t_n - (lambda_n - d_n).
  std::vector<Rat> t(N + 2);
  t[1] = lambda_neg1;
  for (long n = 1; n <= N; ++n) t[n + 1] = Rat(t[n] - (lambda_pos[n - 1] - d[n - 1]));
  if (t[N + 1] < 0)
    throw std::invalid_argument("tbound_build: window excess exceeds lambda_neg1 (t_{N+1} < 0)");

  BuildTrace tr;
  long dim = N + 1;
  std::vector<double> init(dim);
  init[0] = -static_cast<double>(lambda_neg1);
  for (long n = 1; n <= N; ++n) init[n] = static_cast<double>(lambda_pos[n - 1]);
  tr.matrix = SymMat::diag(init);
  tr.chain.basis = SymMat::identity(dim);

  // Step n rotates (carrier, n): carrier holds -t_n, position n holds lambda_n; the
  // carrier slot keeps d_n and the carrier advances holding -t_{n+1}.
  long carrier = 0;
  for (long n = 1; n <= N; ++n) {
    Rat alpha = exact_pair_step(tr.matrix, tr.chain.basis, tr.chain, static_cast<size_t>(carrier), static_cast<size_t>(n),
                                Rat(-t[n]), lambda_pos[n - 1], d[n - 1]);
    tr.alphas.push_back(alpha);
    carrier = n;
  }

  tr.target.assign(d.begin(), d.begin() + N);
  tr.target.push_back(Rat(-t[N + 1]));
  tr.achieved_diagonal = diagonal_of(tr.matrix);
  tr.residual_exact = Rat(-t[N + 1]);
  tr.residual_entry = tr.achieved_diagonal.back();

  // Hypothesis constant of the underlying estimate: sup lambda_n / t_{n+1}.
  tr.c_bound_finite = true;
  tr.c_bound = Rat(0);
  for (long n = 1; n <= N; ++n) {
    if (t[n + 1] == 0) {
      if (lambda_pos[n - 1] > 0) tr.c_bound_finite = false;
      continue;
    }
    Rat q = Rat(lambda_pos[n - 1] / t[n + 1]);
    if (q > tr.c_bound) tr.c_bound = q;
  }
  return tr;
}

BuildTrace infmove_build(const Rat& lambda1, const std::vector<Rat>& neg_mags,
                         const Rat& tail_sum, const Rat& epsilon) {
  long N = static_cast<long>(neg_mags.size());
  if (N < 1) throw std::invalid_argument("infmove_build: need at least one negative term");
  for (long n = 0; n < N; ++n) {
    if (!(neg_mags[n] > 0))
      throw std::invalid_argument("infmove_build: negative magnitudes must be positive");
  }
  require_nonincreasing(neg_mags, "infmove_build", "neg_mags");
  if (tail_sum < 0) throw std::invalid_argument("infmove_build: tail_sum must be >= 0");

  Rat s = tail_sum;
  for (const Rat& m : neg_mags) s = Rat(s + m);
  if (!(s < lambda1))
    throw std::invalid_argument("infmove_build: total negative mass must stay below lambda1");
  Rat eps_cap = Rat(Rat(2, 3) * (lambda1 - s));
  if (!(epsilon > 0) || !(epsilon < eps_cap))
    throw std::invalid_argument("infmove_build: epsilon must lie in (0, (2/3)(lambda1 - s))");

  BuildTrace tr;
  long dim = N + 1;
  std::vector<double> init(dim);
  init[0] = static_cast<double>(lambda1);
  for (long n = 1; n <= N; ++n) init[n] = -static_cast<double>(neg_mags[n - 1]);
  tr.matrix = SymMat::diag(init);
  tr.chain.basis = SymMat::identity(dim);

  // The positive entry stays at position 0 and absorbs each negative in turn; position
  // n is left holding the schedule value eps 2^-n.
  Rat carrier_val = lambda1;  // lambda_1^(n) before step n
  Rat half = Rat(1, 2);
  Rat sched = epsilon;
  for (long n = 1; n <= N; ++n) {
    sched = Rat(sched * half);  // eps 2^-n
    Rat next_val = Rat(carrier_val - neg_mags[n - 1] - sched);
    Rat alpha = exact_pair_step(tr.matrix, tr.chain.basis, tr.chain, static_cast<size_t>(n), 0,
                                Rat(-neg_mags[n - 1]), carrier_val, sched);
    tr.alphas.push_back(alpha);
    tr.target.push_back(sched);
    carrier_val = next_val;
  }
  // exact_pair_step pinned position 0 through the j-slot complement each time; the
  // running value carried here matches it by the trace identity.

  tr.target.insert(tr.target.begin(), carrier_val);
  tr.achieved_diagonal = diagonal_of(tr.matrix);
  Rat floor_val = Rat(lambda1 - s - epsilon);
  tr.residual_exact = Rat(carrier_val - floor_val);  // = tail_sum + eps 2^-N
  tr.residual_entry = static_cast<double>(tr.residual_exact);
  if (!(carrier_val >= floor_val && carrier_val < Rat(lambda1 - s)))
    throw std::invalid_argument(
        "infmove_build: truncation too coarse, achieved first entry misses "
        "[lambda1 - s - eps, lambda1 - s); deepen the window or lower tail_sum");
  tr.c_bound_finite = false;
  return tr;
}

RealizationReport verify_realization(const SymMat& a, const std::vector<double>& lambda,
                                     const std::vector<double>& d, double tol) {
  long n = a.n;
  if (static_cast<long>(lambda.size()) != n || static_cast<long>(d.size()) != n)
    throw std::invalid_argument("verify_realization: dimension mismatch");
  EigenResult eig = jacobi_eigen(a, tol);
  std::vector<double> want(lambda);
  std::sort(want.begin(), want.end(), std::greater<double>());
  RealizationReport rep;
  rep.off_residual = eig.off_residual;
  rep.sweeps = eig.sweeps;
  for (long i = 0; i < n; ++i) {
    rep.eigen_residual = std::max(rep.eigen_residual, std::fabs(eig.values[i] - want[i]));
    rep.diag_residual = std::max(rep.diag_residual, std::fabs(a.at(i, i) - d[i]));
  }
  return rep;
}

}  // namespace diag
