#include "diag/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace diag {

SymMat SymMat::diag(const std::vector<double>& d) {
  SymMat m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m.at(i, i) = d[i];
  return m;
}

SymMat SymMat::identity(std::size_t dim) {
  SymMat m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = 1.0;
  return m;
}

double max_abs(const SymMat& m) {
  double r = 0.0;
  for (double v : m.a) r = std::max(r, std::fabs(v));
  return r;
}

double sym_defect(const SymMat& m) {
  double r = 0.0;
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = i + 1; j < m.n; ++j)
      r = std::max(r, std::fabs(m.at(i, j) - m.at(j, i)));
  return r;
}

double off_frobenius(const SymMat& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j)
      if (i != j) s += m.at(i, j) * m.at(i, j);
  return std::sqrt(s);
}

double orth_defect(const SymMat& b) {
  double r = 0.0;
  for (std::size_t i = 0; i < b.n; ++i)
    for (std::size_t j = 0; j < b.n; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < b.n; ++k) dot += b.at(k, i) * b.at(k, j);
      r = std::max(r, std::fabs(dot - (i == j ? 1.0 : 0.0)));
    }
  return r;
}

SymMat matmul(const SymMat& x, const SymMat& y) {
  if (x.n != y.n) throw std::invalid_argument("matmul: size mismatch");
  SymMat z(x.n);
  for (std::size_t i = 0; i < x.n; ++i)
    for (std::size_t k = 0; k < x.n; ++k) {
      double xv = x.at(i, k);
      if (xv == 0.0) continue;
      for (std::size_t j = 0; j < x.n; ++j) z.at(i, j) += xv * y.at(k, j);
    }
  return z;
}

SymMat transpose(const SymMat& m) {
  SymMat t(m.n);
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) t.at(j, i) = m.at(i, j);
  return t;
}

std::vector<double> diagonal_of(const SymMat& m) {
  std::vector<double> d(m.n);
  for (std::size_t i = 0; i < m.n; ++i) d[i] = m.at(i, i);
  return d;
}

EigenResult jacobi_eigen(SymMat m, double tol, int max_sweeps) {
  const std::size_t n = m.n;
  double scale = std::max(1.0, max_abs(m));
  if (sym_defect(m) > 1e-9 * scale)
    throw std::invalid_argument("jacobi_eigen: matrix is not symmetric");
  // Symmetrize exactly so the sweep updates stay consistent.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = 0.5 * (m.at(i, j) + m.at(j, i));
      m.at(i, j) = m.at(j, i) = v;
    }

  EigenResult res;
  res.vectors = SymMat::identity(n);
  SymMat& v = res.vectors;

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double off = off_frobenius(m);
    res.off_residual = off;
    if (off <= tol * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = m.at(p, q);
        if (std::fabs(apq) <= 1e-300) {
          m.at(p, q) = m.at(q, p) = 0.0;
          continue;
        }
        double app = m.at(p, p), aqq = m.at(q, q);
        double theta = (aqq - app) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        double tau = s / (1.0 + c);

        m.at(p, p) = app - t * apq;
        m.at(q, q) = aqq + t * apq;
        m.at(p, q) = m.at(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          double akp = m.at(k, p), akq = m.at(k, q);
          m.at(k, p) = m.at(p, k) = akp - s * (akq + tau * akp);
          m.at(k, q) = m.at(q, k) = akq + s * (akp - tau * akq);
        }
        for (std::size_t k = 0; k < n; ++k) {
          double vkp = v.at(k, p), vkq = v.at(k, q);
          v.at(k, p) = vkp - s * (vkq + tau * vkp);
          v.at(k, q) = vkq + s * (vkp - tau * vkq);
        }
      }
    }
  }
  res.sweeps = sweep;
  res.off_residual = off_frobenius(m);

  res.values = diagonal_of(m);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return res.values[i] > res.values[j]; });
  std::vector<double> sorted(n);
  SymMat vs(n);
  for (std::size_t c2 = 0; c2 < n; ++c2) {
    sorted[c2] = res.values[order[c2]];
    for (std::size_t r2 = 0; r2 < n; ++r2) vs.at(r2, c2) = v.at(r2, order[c2]);
  }
  res.values = std::move(sorted);
  res.vectors = std::move(vs);
  return res;
}

}  // namespace diag
