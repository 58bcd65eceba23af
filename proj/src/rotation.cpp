#include "diag/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace diag {

namespace {

void check_alpha(double a) {
  if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("rotation: alpha outside [0,1]");
}

}  // namespace

SymMat move_matrix(std::size_t n, const RotMove& mv) {
  check_alpha(mv.alpha);
  SymMat g = SymMat::identity(n);
  double ca = std::sqrt(mv.alpha), cb = std::sqrt(1.0 - mv.alpha);
  double s = mv.sign >= 0 ? 1.0 : -1.0;
  g.at(mv.i, mv.i) = ca;
  g.at(mv.j, mv.i) = s * cb;
  g.at(mv.i, mv.j) = cb;
  g.at(mv.j, mv.j) = -s * ca;
  return g;
}

void apply_move(SymMat& e, SymMat* basis, const RotMove& mv) {
  check_alpha(mv.alpha);
  const std::size_t n = e.n, i = mv.i, j = mv.j;
  if (i >= n || j >= n || i == j) throw std::invalid_argument("apply_move: bad indices");
  double ca = std::sqrt(mv.alpha), cb = std::sqrt(1.0 - mv.alpha);
  double s = mv.sign >= 0 ? 1.0 : -1.0;

  double eii = e.at(i, i), ejj = e.at(j, j), eij = e.at(i, j);
  for (std::size_t r = 0; r < n; ++r) {
    if (r == i || r == j) continue;
    double eri = e.at(r, i), erj = e.at(r, j);
    double ni = ca * eri + s * cb * erj;
    double nj = cb * eri - s * ca * erj;
    e.at(r, i) = e.at(i, r) = ni;
    e.at(r, j) = e.at(j, r) = nj;
  }
  e.at(i, i) = mv.alpha * eii + (1.0 - mv.alpha) * ejj + 2.0 * s * ca * cb * eij;
  e.at(j, j) = (1.0 - mv.alpha) * eii + mv.alpha * ejj - 2.0 * s * ca * cb * eij;
  double cross = ca * cb * (eii - ejj) + s * (cb * cb - ca * ca) * eij;
  e.at(i, j) = e.at(j, i) = cross;

  if (basis) {
    for (std::size_t r = 0; r < basis->n; ++r) {
      double bi = basis->at(r, i), bj = basis->at(r, j);
      basis->at(r, i) = ca * bi + s * cb * bj;
      basis->at(r, j) = cb * bi - s * ca * bj;
    }
  }
}

OffdiagResult offdiag_move(SymMat& e, std::size_t i, std::size_t j, double target,
                           SymMat* basis) {
  if (i >= e.n || j >= e.n || i == j)
    throw std::invalid_argument("offdiag_move: bad indices");
  double a = e.at(i, i), c = e.at(j, j), b = e.at(i, j);
  if (a == c)
    throw std::invalid_argument("offdiag_move: degenerate (equal diagonal entries)");
  double lo = std::min(a, c), hi = std::max(a, c);
  if (!(target >= lo && target <= hi))
    throw std::invalid_argument("offdiag_move: target not bracketed by the entries");

  int s = b >= 0.0 ? 1 : -1;
  double sb = s * b;  // |b|
  double u = a - c;
  // alpha a + (1-alpha) c + 2 s sqrt(alpha(1-alpha)) b = target, squared:
  // (u^2 + 4 b^2) x^2 + (2(c-t)u - 4 b^2) x + (t-c)^2 = 0
  double qa = u * u + 4.0 * b * b;
  double qb = 2.0 * (c - target) * u - 4.0 * b * b;
  double qc = (target - c) * (target - c);
  double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) disc = 0.0;
  double root = std::sqrt(disc);
  double r1, r2;
  if (qb >= 0.0) {
    double q = -0.5 * (qb + root);
    r1 = q / qa;
    r2 = (q != 0.0) ? qc / q : 0.0;
  } else {
    double q = -0.5 * (qb - root);
    r1 = q / qa;
    r2 = (q != 0.0) ? qc / q : 0.0;
  }
  double scale = std::max({1.0, std::fabs(a), std::fabs(c), std::fabs(b)});
  // Objective with the sign chosen so the sqrt term contributes +|b|.
  auto g_val = [&](double x) {
    return x * a + (1.0 - x) * c + 2.0 * std::sqrt(std::max(0.0, x * (1.0 - x))) * sb;
  };
  double best = -1.0;
  for (double cand : {r1, r2}) {
    if (!(cand > -1e-12 && cand < 1.0 + 1e-12)) continue;
    double x = std::clamp(cand, 0.0, 1.0);
    if (std::fabs(g_val(x) - target) <= 1e-9 * scale)
      best = std::max(best, x);
  }
  if (best < 0.0) {
    // Fall back to a bisection on the exact objective; g_val is continuous with
    // g_val(1) = a and g_val(alpha*) >= target somewhere in [0,1].
    double xl = 0.0, xr = 1.0;
    double gl = g_val(xl) - target, gr = g_val(xr) - target;
    if (gl == 0.0) best = xl;
    else if (gr == 0.0) best = xr;
    else if (gl * gr < 0.0) {
      for (int it = 0; it < 200; ++it) {
        double xm = 0.5 * (xl + xr);
        double gm = g_val(xm) - target;
        if (gm == 0.0) { xl = xr = xm; break; }
        if (gl * gm < 0.0) { xr = xm; gr = gm; } else { xl = xm; gl = gm; }
      }
      best = 0.5 * (xl + xr);
    } else {
      throw std::runtime_error("offdiag_move: no admissible rotation parameter");
    }
  }

  RotMove mv{i, j, best, s};
  apply_move(e, basis, mv);
  // The 2x2 block trace is exact; pin the solved entry and its complement.
  e.at(i, i) = target;
  e.at(j, j) = a + c - target;

  OffdiagResult res;
  res.move = mv;
  res.achieved_i = e.at(i, i);
  res.achieved_j = e.at(j, j);
  return res;
}

LossChainReport loss_chain(const std::vector<double>& f_diag,
                           const std::vector<Rat>& alphas) {
  const std::size_t n = f_diag.size();
  if (n != alphas.size() + 1)
    throw std::invalid_argument("loss_chain: need one more diagonal entry than alphas");
  LossChainReport rep;
  rep.completeness_product = Rat(1);
  SymMat e = SymMat::diag(f_diag);
  rep.chain.basis = SymMat::identity(n);
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    const Rat& a = alphas[k];
    if (a < 0 || a > 1) throw std::invalid_argument("loss_chain: alpha outside [0,1]");
    rep.completeness_product = Rat(rep.completeness_product * (Rat(1) - a));
    RotMove mv{k, k + 1, static_cast<double>(a), 1};
    apply_move(e, &rep.chain.basis, mv);
    rep.chain.moves.push_back(mv);
  }
  rep.achieved = diagonal_of(e);
  return rep;
}

NolossChainReport noloss_chain(std::size_t f_count, const std::vector<Rat>& alphas) {
  if (f_count != alphas.size() + 1)
    throw std::invalid_argument("noloss_chain: need f_count == alphas.size() + 1");
  NolossChainReport rep;
  rep.ratio_sum = Rat(0);
  rep.chain.basis = SymMat::identity(f_count);
  SymMat dummy(f_count);  // operator content is irrelevant for the chain geometry

  std::vector<double> tilde(f_count, 0.0);
  tilde[0] = 1.0;
  rep.tilde.push_back(tilde);

  std::vector<Rat> prods;  // prods[k] = prod_{j<=k} (1 - alpha_j)
  Rat running(1);
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    const Rat& a = alphas[k];
    if (a < 0 || a >= 1) throw std::invalid_argument("noloss_chain: alpha outside [0,1)");
    rep.ratio_sum = Rat(rep.ratio_sum + Rat(a / (Rat(1) - a)));
    running = Rat(running * (Rat(1) - a));
    prods.push_back(running);

    RotMove mv{k, k + 1, static_cast<double>(a), 1};
    apply_move(dummy, &rep.chain.basis, mv);
    rep.chain.moves.push_back(mv);

    double ca = std::sqrt(mv.alpha), cb = std::sqrt(1.0 - mv.alpha);
    std::vector<double> next(f_count, 0.0);
    for (std::size_t r = 0; r < f_count; ++r) next[r] = cb * tilde[r];
    next[k + 1] -= ca;  // - sqrt(alpha) f_{k+2} on top of sqrt(1-alpha) ee_k
    tilde = std::move(next);
    rep.tilde.push_back(tilde);
  }

  // Closed-form distance check over every pair (a < b), 1-based vector indices.
  auto prod_range = [&](std::size_t a, std::size_t b) {
    // prod_{j=a}^{b-1} (1 - alpha_j) with 1-based a, b mapping to alphas[a-1..b-2]
    Rat p = prods[b - 2];
    if (a >= 2) p = Rat(p / prods[a - 2]);
    return p;
  };
  for (std::size_t a = 1; a <= rep.tilde.size(); ++a) {
    for (std::size_t b = a + 1; b <= rep.tilde.size(); ++b) {
      double dist2 = 0.0;
      for (std::size_t r = 0; r < f_count; ++r) {
        double dd = rep.tilde[a - 1][r] - rep.tilde[b - 1][r];
        dist2 += dd * dd;
      }
      double closed = 2.0 * (1.0 - std::sqrt(static_cast<double>(prod_range(a, b))));
      rep.max_cauchy_residual = std::max(rep.max_cauchy_residual, std::fabs(dist2 - closed));
    }
  }
  return rep;
}

double chain_orth_defect(const std::vector<Rat>& alphas) {
  const std::size_t k = alphas.size();
  const std::size_t n = k + 1;
  std::vector<double> te(n, 0.0);
  te[0] = 1.0;
  double te_norm2 = 1.0;
  std::vector<double> cs;  // <e_a, current ee> for each emitted vector
  cs.reserve(k);
  double defect = 0.0;

  for (std::size_t m = 0; m < k; ++m) {
    double a = static_cast<double>(alphas[m]);
    if (!(a >= 0.0 && a < 1.0))
      throw std::invalid_argument("chain_orth_defect: alpha outside [0,1)");
    double ca = std::sqrt(a), cb = std::sqrt(1.0 - a);
    // New vector e_m = ca*ee + cb*f_{m+2}; f_{m+2} is orthogonal to everything emitted
    // so far and has exact zero overlap with ee.
    double e_norm2 = ca * ca * te_norm2 + cb * cb;
    defect = std::max(defect, std::fabs(e_norm2 - 1.0));
    for (double& c : cs) {
      defect = std::max(defect, std::fabs(ca * c));  // <e_new, e_a>
      c = cb * c;                                    // <e_a, ee_next>
    }
    double c_new = ca * cb * (te_norm2 - 1.0);  // <e_new, ee_next>
    cs.push_back(c_new);
    for (double& v : te) v *= cb;
    te[m + 1] = -ca;
    te_norm2 = cb * cb * te_norm2 + ca * ca;
  }
  defect = std::max(defect, std::fabs(te_norm2 - 1.0));
  for (double c : cs) defect = std::max(defect, std::fabs(c));
  return defect;
}

SymMat schur_horn_build(const std::vector<Rat>& lambda, const std::vector<Rat>& d) {
  const std::size_t n = lambda.size();
  if (n == 0 || d.size() != n)
    throw std::invalid_argument("schur_horn_build: need equal nonzero lengths");

  std::vector<Rat> ls = lambda, ds = d;
  std::stable_sort(ls.begin(), ls.end(), std::greater<Rat>());
  std::vector<std::size_t> dpos(n);
  std::iota(dpos.begin(), dpos.end(), std::size_t{0});
  std::stable_sort(dpos.begin(), dpos.end(),
                   [&](std::size_t x, std::size_t y) { return d[x] > d[y]; });
  std::stable_sort(ds.begin(), ds.end(), std::greater<Rat>());

  Rat sl(0), sd(0);
  for (std::size_t kk = 0; kk < n; ++kk) {
    sl += ls[kk];
    sd += ds[kk];
    if (sd > sl)
      throw std::invalid_argument("schur_horn_build: majorization fails at n=" +
                                  std::to_string(kk + 1));
  }
  if (sl != sd)
    throw std::invalid_argument("schur_horn_build: total sums differ");

  // Active coordinates carry an exact rational value; every step either claims an
  // exactly matching coordinate or mixes the tight bracketing pair (Chan-Li step).
  struct Act {
    Rat val;
    std::size_t coord;
  };
  std::vector<Act> act(n);
  std::vector<double> init(n);
  for (std::size_t kk = 0; kk < n; ++kk) {
    act[kk] = {ls[kk], kk};
    init[kk] = static_cast<double>(ls[kk]);
  }
  SymMat e = SymMat::diag(init);
  std::vector<std::size_t> coord_of_sorted_target(n);

  for (std::size_t m = 0; m + 1 < n; ++m) {
    const Rat& t = ds[m];
    // exact claim
    std::size_t claim = act.size();
    for (std::size_t x = 0; x < act.size(); ++x)
      if (act[x].val == t) {
        claim = x;
        break;
      }
    if (claim < act.size()) {
      coord_of_sorted_target[m] = act[claim].coord;
      act.erase(act.begin() + static_cast<std::ptrdiff_t>(claim));
      continue;
    }
    // tight bracket: act is sorted nonincreasing; find last value >= t
    std::size_t kidx = act.size();
    for (std::size_t x = 0; x < act.size(); ++x)
      if (act[x].val > t) kidx = x;
    if (kidx == act.size() || kidx + 1 >= act.size() || act[kidx + 1].val > t)
      throw std::runtime_error("schur_horn_build: bracketing pair not found");
    Act hiv = act[kidx], lov = act[kidx + 1];
    Rat alpha = Rat((t - lov.val) / (hiv.val - lov.val));
    Rat comp = Rat(hiv.val + lov.val - t);

    RotMove mv{hiv.coord, lov.coord, static_cast<double>(alpha), 1};
    apply_move(e, nullptr, mv);
    e.at(hiv.coord, hiv.coord) = static_cast<double>(t);
    e.at(lov.coord, lov.coord) = static_cast<double>(comp);

    coord_of_sorted_target[m] = hiv.coord;
    act.erase(act.begin() + static_cast<std::ptrdiff_t>(kidx));
    act[kidx].val = comp;  // stays in place: lov.val <= comp <= hiv.val
  }
  if (act.size() != 1 || act[0].val != ds[n - 1])
    throw std::runtime_error("schur_horn_build: trace bookkeeping failed");
  coord_of_sorted_target[n - 1] = act[0].coord;
  e.at(act[0].coord, act[0].coord) = static_cast<double>(ds[n - 1]);

  // Permute so the diagonal appears in the caller's order of d.
  std::vector<std::size_t> coord_for_input(n);
  for (std::size_t m = 0; m < n; ++m) coord_for_input[dpos[m]] = coord_of_sorted_target[m];
  SymMat out(n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      out.at(p, q) = e.at(coord_for_input[p], coord_for_input[q]);
  return out;
}

}  // namespace diag
