#pragma once

#include <cstddef>
#include <vector>

namespace diag {

// Dense real matrix, row-major full storage. Used for symmetric operators and for
// the orthogonal basis matrices accumulated by rotation chains.
struct SymMat {
  std::size_t n = 0;
  std::vector<double> a;

  SymMat() = default;
  explicit SymMat(std::size_t dim) : n(dim), a(dim * dim, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }

  static SymMat diag(const std::vector<double>& d);
  static SymMat identity(std::size_t dim);
};

double max_abs(const SymMat& m);
// max |a_ij - a_ji|
double sym_defect(const SymMat& m);
// sqrt of the off-diagonal squared mass
double off_frobenius(const SymMat& m);
// max-norm of B^T B - I
double orth_defect(const SymMat& b);

SymMat matmul(const SymMat& x, const SymMat& y);
SymMat transpose(const SymMat& m);
std::vector<double> diagonal_of(const SymMat& m);

struct EigenResult {
  std::vector<double> values;  // nonincreasing
  SymMat vectors;              // columns are eigenvectors: A = V diag(values) V^T
  int sweeps = 0;
  double off_residual = 0.0;
};

// Cyclic two-sided Jacobi rotation sweeps; converged when the off-diagonal Frobenius
// mass is below tol (relative to the matrix scale). Throws on non-symmetric input.
EigenResult jacobi_eigen(SymMat m, double tol = 1e-12, int max_sweeps = 96);

}  // namespace diag
