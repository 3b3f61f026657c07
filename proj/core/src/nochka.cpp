#include "nevlab/nochka.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace nevlab {

namespace {

using RankFn = std::function<int(const std::vector<int>&)>;

std::vector<std::vector<int>> subsets_up_to(int q, int max_size) {
  std::vector<std::vector<int>> out;
  for (int s = 1; s <= std::min(q, max_size); ++s)
    for (auto& S : index_subsets(q, s)) out.push_back(std::move(S));
  return out;
}

std::string frac(const Rational& x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

// Tableau simplex on equality rows with x >= 0; rows already have b >= 0.
class Tableau {
 public:
  Tableau(std::vector<std::vector<Rational>> rows, std::vector<Rational> rhs, std::vector<int> basis)
      : a_(std::move(rows)), b_(std::move(rhs)), basis_(std::move(basis)) {}

  // Maximizes c.x over the current feasible basis; `allowed` masks entering columns.
  bool maximize(const std::vector<Rational>& c, const std::vector<bool>& allowed) {
    const size_t m = a_.size(), cols = c.size();
    for (;;) {
      // Reduced costs c_j - c_B B^{-1} A_j.
      int enter = -1;
      for (size_t j = 0; j < cols && enter < 0; ++j) {
        if (!allowed[j] || is_basic(static_cast<int>(j))) continue;
        Rational rc = c[j];
        for (size_t i = 0; i < m; ++i)
          if (a_[i][j] != 0) rc -= c[basis_[i]] * a_[i][j];
        if (rc > 0) enter = static_cast<int>(j);
      }
      if (enter < 0) return true;
      int leave = -1;
      Rational best;
      for (size_t i = 0; i < m; ++i) {
        if (a_[i][enter] <= 0) continue;
        Rational ratio = b_[i] / a_[i][enter];
        if (leave < 0 || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = static_cast<int>(i);
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

  void pivot(int row, int col) {
    Rational p = a_[row][col];
    for (auto& x : a_[row]) x /= p;
    b_[row] /= p;
    for (size_t i = 0; i < a_.size(); ++i) {
      if (static_cast<int>(i) == row || a_[i][col] == 0) continue;
      Rational f = a_[i][col];
      for (size_t j = 0; j < a_[i].size(); ++j)
        if (a_[row][j] != 0) a_[i][j] -= f * a_[row][j];
      b_[i] -= f * b_[row];
    }
    basis_[row] = col;
  }

  bool is_basic(int j) const { return std::find(basis_.begin(), basis_.end(), j) != basis_.end(); }
  void drop_row(size_t i) {
    a_.erase(a_.begin() + i);
    b_.erase(b_.begin() + i);
    basis_.erase(basis_.begin() + i);
  }

  std::vector<std::vector<Rational>> a_;
  std::vector<Rational> b_;
  std::vector<int> basis_;
};

// Exact Gaussian elimination rank over Q(i).
int rank_of(std::vector<Covector> rows) {
  int rank = 0;
  const size_t cols = rows.empty() ? 0 : rows.front().size();
  for (size_t c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
    size_t piv = rank;
    while (piv < rows.size() && rows[piv][c].is_zero()) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    for (size_t i = rank + 1; i < rows.size(); ++i) {
      if (rows[i][c].is_zero()) continue;
      GaussRational f = rows[i][c] / rows[rank][c];
      for (size_t j = c; j < cols; ++j) rows[i][j] -= f * rows[rank][j];
    }
    ++rank;
  }
  return rank;
}

RankFn exact_rank_fn(const std::vector<Covector>& normals) {
  return [&normals](const std::vector<int>& S) {
    std::vector<Covector> sub;
    for (int j : S) sub.push_back(normals[j]);
    return rank_of(sub);
  };
}

RankFn numeric_rank_fn(const std::vector<std::vector<cplx>>& normals) {
  return [&normals](const std::vector<int>& S) {
    std::vector<std::vector<cplx>> sub;
    for (int j : S) sub.push_back(normals[j]);
    return numeric_rank(sub);
  };
}

bool subgeneral_with(int q, int dim, int n, const RankFn& rank) {
  if (q < n + 1) fail(ErrorKind::PreconditionViolation, "subgeneral position needs q >= n + 1");
  for (const auto& S : index_subsets(q, n + 1))
    if (rank(S) != dim) return false;
  return true;
}

struct Problem {
  int q = 0, n = 0, k = 0;
  std::vector<std::vector<int>> B;
  std::vector<int> dims;
};

Problem make_problem(int q, int dim, int n, const RankFn& rank) {
  Problem p;
  p.q = q;
  p.n = n;
  p.k = dim - 1;
  if (dim < 1) fail(ErrorKind::PreconditionViolation, "empty normals");
  if (n < p.k) fail(ErrorKind::PreconditionViolation, "n must be at least k");
  if (q < 2 * n - p.k + 1) fail(ErrorKind::PreconditionViolation, "Nochka weights need q >= 2n - k + 1");
  if (!subgeneral_with(q, dim, n, rank))
    fail(ErrorKind::PreconditionViolation, "hyperplanes are not in n-subgeneral position");
  p.B = subsets_up_to(q, n + 1);
  for (const auto& S : p.B) p.dims.push_back(rank(S));
  return p;
}

// Variables: omega_0..omega_{q-1}, t. Rows: t - omega_j <= 0, omega_j <= 1/theta, subset sums.
std::optional<std::vector<Rational>> solve_at(const Problem& p, const Rational& theta) {
  const int q = p.q;
  const size_t nv = q + 1;
  std::vector<std::vector<Rational>> A;
  std::vector<Rational> b;
  for (int j = 0; j < q; ++j) {
    std::vector<Rational> row(nv, 0);
    row[q] = 1;
    row[j] = -1;
    A.push_back(row);
    b.push_back(0);
    std::vector<Rational> cap(nv, 0);
    cap[j] = 1;
    A.push_back(cap);
    b.push_back(1 / theta);
  }
  for (size_t s = 0; s < p.B.size(); ++s) {
    if (Rational(static_cast<int>(p.B[s].size())) <= p.dims[s] * theta) continue;  // implied by the caps
    std::vector<Rational> row(nv, 0);
    for (int j : p.B[s]) row[j] = 1;
    A.push_back(row);
    b.push_back(p.dims[s]);
  }
  std::vector<Rational> sum(nv, 1);
  sum[q] = 0;
  const Rational total = Rational(q - 2 * p.n + p.k - 1) / theta + p.k + 1;
  std::vector<std::vector<Rational>> Aeq{sum};
  std::vector<Rational> beq{total};

  std::vector<Rational> c(nv, 0);
  c[q] = 1;
  auto x = lp_maximize(c, A, b, Aeq, beq);
  if (!x || (*x)[q] <= 0) return std::nullopt;
  // Lexicographic tie-break with min omega fixed.
  Aeq.push_back(std::vector<Rational>(nv, 0));
  Aeq.back()[q] = 1;
  beq.push_back((*x)[q]);
  for (int j = 0; j < q; ++j) {
    std::vector<Rational> cj(nv, 0);
    cj[j] = 1;
    x = lp_maximize(cj, A, b, Aeq, beq);
    if (!x) fail(ErrorKind::PrecisionFailure, "tie-break LP lost feasibility");
    std::vector<Rational> fix(nv, 0);
    fix[j] = 1;
    Aeq.push_back(fix);
    beq.push_back((*x)[j]);
  }
  x->resize(q);
  return x;
}

std::vector<Rational> theta_scan(int n, int k) {
  const Rational lo(n + 1, k + 1), hi(2 * n - k + 1, k + 1);
  std::set<Rational> vals;
  for (int d = 1; d <= 64; ++d) {
    // numerators with lo <= p/d <= hi
    for (long p = static_cast<long>(std::floor(to_real(lo) * d)) - 1; Rational(p, d) <= hi; ++p)
      if (Rational(p, d) >= lo) vals.insert(Rational(p, d));
  }
  return {vals.rbegin(), vals.rend()};
}

std::vector<std::string> certify(const NochkaWeights& w, const Problem& p) {
  std::vector<std::string> cert;
  const Rational& th = w.theta;
  for (int j = 0; j < p.q; ++j) {
    if (!(w.omega[j] > 0) || w.omega[j] * th > 1)
      fail(ErrorKind::PreconditionViolation, "property (i) fails at index " + std::to_string(j));
  }
  cert.push_back("(i) 0 < omega_j theta <= 1 for all j");
  Rational sum = std::accumulate(w.omega.begin(), w.omega.end(), Rational(0));
  Rational lhs = p.q - 2 * p.n + p.k - 1, rhs = th * (sum - p.k - 1);
  if (lhs != rhs) fail(ErrorKind::PreconditionViolation, "property (ii) fails");
  cert.push_back("(ii) q - 2n + k - 1 = " + frac(lhs) + " = theta (sum omega - k - 1)");
  Rational worst = -1;
  for (size_t s = 0; s < p.B.size(); ++s) {
    Rational t = 0;
    for (int j : p.B[s]) t += w.omega[j];
    if (t > p.dims[s]) fail(ErrorKind::PreconditionViolation, "property (iii) fails");
    worst = std::max(worst, Rational(t - p.dims[s]));
  }
  cert.push_back("(iii) " + std::to_string(p.B.size()) + " subsets, max(sum - dim) = " + frac(worst));
  Rational lo(p.n + 1, p.k + 1), hi(2 * p.n - p.k + 1, p.k + 1);
  if (th < lo || th > hi) fail(ErrorKind::PreconditionViolation, "property (iv) fails");
  cert.push_back("(iv) " + frac(lo) + " <= theta = " + frac(th) + " <= " + frac(hi));
  return cert;
}

NochkaWeights weights_with(int q, int dim, int n, const RankFn& rank) {
  Problem p = make_problem(q, dim, n, rank);
  NochkaWeights w;
  w.n = n;
  w.k = p.k;
  for (const Rational& th : theta_scan(n, p.k)) {
    auto x = solve_at(p, th);
    if (!x) continue;
    w.omega = *x;
    w.theta = th;
    w.certificate = certify(w, p);
    return w;
  }
  fail(ErrorKind::InfeasibleAtScanResolution, "no feasible weights on the theta scan [" +
                                                  frac(Rational(n + 1, p.k + 1)) + ", " +
                                                  frac(Rational(2 * n - p.k + 1, p.k + 1)) + "], denominators <= 64");
}

}  // namespace

int exact_rank(const std::vector<Covector>& vecs) { return rank_of(vecs); }

bool subgeneral_check(const std::vector<Covector>& normals, int n) {
  if (normals.empty()) fail(ErrorKind::PreconditionViolation, "no normals");
  for (const auto& a : normals)
    if (std::all_of(a.begin(), a.end(), [](const GaussRational& x) { return x.is_zero(); }))
      fail(ErrorKind::PreconditionViolation, "zero normal");
  return subgeneral_with(static_cast<int>(normals.size()), static_cast<int>(normals.front().size()), n,
                         exact_rank_fn(normals));
}

bool subgeneral_check(const std::vector<std::vector<cplx>>& normals, int n) {
  if (normals.empty()) fail(ErrorKind::PreconditionViolation, "no normals");
  for (const auto& a : normals)
    if (std::all_of(a.begin(), a.end(), [](cplx x) { return x == cplx(0); }))
      fail(ErrorKind::PreconditionViolation, "zero normal");
  return subgeneral_with(static_cast<int>(normals.size()), static_cast<int>(normals.front().size()), n,
                         numeric_rank_fn(normals));
}

NochkaWeights nochka_weights(const std::vector<Covector>& normals, int n) {
  if (normals.empty()) fail(ErrorKind::PreconditionViolation, "no normals");
  return weights_with(static_cast<int>(normals.size()), static_cast<int>(normals.front().size()), n,
                      exact_rank_fn(normals));
}

NochkaWeights nochka_weights(const std::vector<std::vector<cplx>>& normals, int n) {
  if (normals.empty()) fail(ErrorKind::PreconditionViolation, "no normals");
  return weights_with(static_cast<int>(normals.size()), static_cast<int>(normals.front().size()), n,
                      numeric_rank_fn(normals));
}

std::vector<std::string> verify_nochka(const NochkaWeights& w, const std::vector<Covector>& normals) {
  const int q = static_cast<int>(normals.size());
  if (static_cast<int>(w.omega.size()) != q) fail(ErrorKind::PreconditionViolation, "weight count mismatch");
  Problem p;
  p.q = q;
  p.n = w.n;
  p.k = static_cast<int>(normals.front().size()) - 1;
  p.B = subsets_up_to(q, w.n + 1);
  for (const auto& S : p.B) p.dims.push_back(exact_rank_fn(normals)(S));
  return certify(w, p);
}

PropertyV verify_property_v(const NochkaWeights& w, const std::vector<Covector>& normals, const std::vector<real>& E,
                            const std::vector<int>& Y) {
  const int q = static_cast<int>(normals.size());
  if (static_cast<int>(E.size()) != q) fail(ErrorKind::PreconditionViolation, "E has the wrong length");
  if (Y.empty() || static_cast<int>(Y.size()) > w.n + 1) fail(ErrorKind::PreconditionViolation, "need 0 < #Y <= n + 1");
  for (real e : E)
    if (!(e >= 1)) fail(ErrorKind::PreconditionViolation, "E_j must be >= 1");
  auto rank = exact_rank_fn(normals);
  const int d = rank(Y);
  real lhs = 0;
  for (int j : Y) lhs += to_real(w.omega[j]) * std::log(E[j]);
  PropertyV best;
  real best_rhs = -kInf;
  for (const auto& idx : index_subsets(static_cast<int>(Y.size()), d)) {
    std::vector<int> M;
    for (int i : idx) M.push_back(Y[i]);
    if (rank(M) != d) continue;
    real rhs = 0;
    for (int j : M) rhs += std::log(E[j]);
    if (rhs > best_rhs) {
      best_rhs = rhs;
      best.M = M;
    }
  }
  best.ok = !best.M.empty() && lhs <= best_rhs + 1e-12L * std::max<real>(1, std::fabs(best_rhs));
  return best;
}

std::optional<std::vector<Rational>> lp_maximize(const std::vector<Rational>& c,
                                                 const std::vector<std::vector<Rational>>& A_ub,
                                                 const std::vector<Rational>& b_ub,
                                                 const std::vector<std::vector<Rational>>& A_eq,
                                                 const std::vector<Rational>& b_eq) {
  const size_t nv = c.size(), mu = A_ub.size(), me = A_eq.size(), m = mu + me;
  // Columns: x (nv), slacks (mu), artificials (m).
  const size_t art0 = nv + mu, cols = nv + mu + m;
  std::vector<std::vector<Rational>> rows(m, std::vector<Rational>(cols, 0));
  std::vector<Rational> rhs(m);
  std::vector<int> basis(m);
  std::vector<bool> needs_art(m, false);
  for (size_t i = 0; i < m; ++i) {
    const auto& a = i < mu ? A_ub[i] : A_eq[i - mu];
    Rational b = i < mu ? b_ub[i] : b_eq[i - mu];
    Rational sgn = b < 0 ? -1 : 1;
    for (size_t j = 0; j < nv; ++j) rows[i][j] = sgn * a[j];
    if (i < mu) rows[i][nv + i] = sgn;
    rhs[i] = sgn * b;
    needs_art[i] = i >= mu || sgn < 0;
    if (needs_art[i]) {
      rows[i][art0 + i] = 1;
      basis[i] = static_cast<int>(art0 + i);
    } else {
      basis[i] = static_cast<int>(nv + i);
    }
  }
  Tableau tab(std::move(rows), std::move(rhs), std::move(basis));
  std::vector<bool> allowed(cols, true);
  for (size_t i = 0; i < m; ++i)
    if (!needs_art[i]) allowed[art0 + i] = false;

  // Phase 1.
  std::vector<Rational> c1(cols, 0);
  for (size_t i = 0; i < m; ++i)
    if (needs_art[i]) c1[art0 + i] = -1;
  if (!tab.maximize(c1, allowed)) fail(ErrorKind::NoConvergence, "phase one unbounded");
  for (size_t i = 0; i < tab.a_.size(); ++i)
    if (tab.basis_[i] >= static_cast<int>(art0) && tab.b_[i] != 0) return std::nullopt;
  // Drive zero-level artificials out of the basis.
  for (size_t i = 0; i < tab.a_.size();) {
    if (tab.basis_[i] < static_cast<int>(art0)) {
      ++i;
      continue;
    }
    int col = -1;
    for (size_t j = 0; j < art0 && col < 0; ++j)
      if (tab.a_[i][j] != 0 && !tab.is_basic(static_cast<int>(j))) col = static_cast<int>(j);
    if (col < 0) {
      tab.drop_row(i);
    } else {
      tab.pivot(static_cast<int>(i), col);
      ++i;
    }
  }
  // Phase 2 over the original and slack columns.
  for (size_t j = art0; j < cols; ++j) allowed[j] = false;
  std::vector<Rational> c2(cols, 0);
  for (size_t j = 0; j < nv; ++j) c2[j] = c[j];
  if (!tab.maximize(c2, allowed)) fail(ErrorKind::NoConvergence, "linear program is unbounded");
  std::vector<Rational> x(nv, 0);
  for (size_t i = 0; i < tab.a_.size(); ++i)
    if (tab.basis_[i] < static_cast<int>(nv)) x[tab.basis_[i]] = tab.b_[i];
  return x;
}

// ---------- degenerate SMT ----------

NevanlinnaTable nochka_smt_report(const ProjCurve& c, const std::vector<std::vector<cplx>>& plane,
                                  const std::vector<Hyperplane>& hyperplanes, const RadialGrid& grid, real eps,
                                  std::optional<real> growth) {
  using CMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = c.n();
  const int k = static_cast<int>(plane.size()) - 1;
  const int q = static_cast<int>(hyperplanes.size());
  if (k < 0 || k > n) fail(ErrorKind::PreconditionViolation, "plane dimension out of range");
  if (grid.size() < 3) fail(ErrorKind::GridTooCoarse, "report needs at least three radii");
  for (const auto& v : plane)
    if (static_cast<int>(v.size()) != n + 1) fail(ErrorKind::PreconditionViolation, "plane vectors have the wrong length");
  for (const auto& H : hyperplanes) {
    if (static_cast<int>(H.normal.size()) != n + 1) fail(ErrorKind::PreconditionViolation, "dimension mismatch");
    if (image_in_hyperplane(c, H)) fail(ErrorKind::ImageInHyperplane, "the curve lies in a hyperplane");
  }
  if (numeric_rank(plane) != k + 1) fail(ErrorKind::PreconditionViolation, "plane vectors are dependent");

  // Restricted normals a_j . b_i and restricted curve g = P f with P the pseudo-inverse of [b_0 .. b_k].
  std::vector<std::vector<cplx>> restricted(q, std::vector<cplx>(k + 1));
  for (int j = 0; j < q; ++j)
    for (int i = 0; i <= k; ++i)
      for (int l = 0; l <= n; ++l) restricted[j][i] += hyperplanes[j].normal[l] * plane[i][l];
  CMat Bm(n + 1, k + 1);
  for (int i = 0; i <= k; ++i)
    for (int l = 0; l <= n; ++l) Bm(l, i) = plane[i][l];
  CMat P = Bm.completeOrthogonalDecomposition().pseudoInverse();
  const real pmax = P.cwiseAbs().maxCoeff();
  std::vector<HoloMap> gcomps;
  for (int i = 0; i <= k; ++i) {
    std::vector<std::pair<cplx, HoloMap>> terms;
    for (int l = 0; l <= n; ++l)
      if (std::abs(P(i, l)) > 1e-15L * pmax) terms.emplace_back(P(i, l), c.components()[l]);
    if (terms.size() == 1 && std::abs(terms[0].first - cplx(1)) < 1e-15L)
      gcomps.push_back(terms[0].second);
    else
      gcomps.push_back(make_linear_combination(terms));
  }
  ProjCurve g(gcomps, c.name() + "|plane");
  for (int s = 0; s < 8; ++s) {
    cplx z = std::polar(real(0.3L) * (1 + s % 3), kTwoPi * s / 8 + 0.2L);
    if (!c.disc().contains(z)) continue;
    auto fz = c.eval(z);
    auto gz = g.eval(z);
    real L = log_norm(fz), res = 0;
    for (int l = 0; l <= n; ++l) {
      cplx back = 0;
      for (int i = 0; i <= k; ++i) back += Bm(l, i) * gz[i].value_shifted(L);
      res = std::max(res, std::abs(back - fz[l].value_shifted(L)));
    }
    if (res > 1e-10L) fail(ErrorKind::PreconditionViolation, "the image is not contained in the supplied plane");
  }
  if (!g.nondegenerate()) fail(ErrorKind::DegenerateCurve, "curve is degenerate inside the plane");

  NochkaWeights w = nochka_weights(restricted, n);

  NevanlinnaTable tab;
  tab.grid = grid;
  const size_t N = grid.size();
  auto ct = characteristic_fk_table(c, 0, grid, true);
  const real cval = resolve_growth_index(c, grid, ct.T, growth);
  std::vector<int> all(q);
  std::iota(all.begin(), all.end(), 0);
  HyperplaneSums sums = hyperplane_sums(c, hyperplanes, {all}, grid);
  tab.m = sums.m;
  tab.N = sums.N;
  std::vector<real> NW = wronskian_counting(g, grid);

  const real main_coeff = 2 * n - k + 1;
  const real err_coeff = real((2 * n - k + 1) * k) / 2;
  const real ram_coeff = real(n + 1) / (k + 1);
  std::vector<real> D(N);
  tab.rows.resize(N);
  for (size_t i = 0; i < N; ++i) {
    TableRow& row = tab.rows[i];
    row.r = grid.radii[i];
    row.T = ct.T[i];
    row.T_area = ct.T_area[i];
    row.m_total = sums.max_sum[i];
    row.N_total = 0;
    for (int j = 0; j < q; ++j) row.N_total += tab.N[j][i];
    row.N_ram = NW[i];
    D[i] = row.m_total + ram_coeff * row.N_ram - smt_rhs(main_coeff, err_coeff, cval, eps, row.T, row.r);
  }
  SlackFit sf = fit_slack(D, ct.T);
  for (size_t i = 0; i < N; ++i) {
    tab.rows[i].slack = sf.slack[i];
    tab.rows[i].exceptional = sf.slack[i] < 0 ? 1 : 0;
  }
  ExceptionalSummary ex = exceptional_set_measure(tab, cval, eps);
  for (int j = 0; j < q; ++j) {
    tab.target_labels.push_back("H" + std::to_string(j));
    tab.summary["omega:" + tab.target_labels.back()] = to_real(w.omega[j]);
  }
  tab.summary["theta"] = to_real(w.theta);
  tab.summary["c"] = cval;
  tab.summary["eps"] = eps;
  tab.summary["C0"] = sf.C0;
  tab.summary["C_log"] = sf.C_log;
  tab.summary["exceptional_count"] = static_cast<real>(ex.flagged_radii.size());
  tab.summary["exceptional_measure"] = ex.weighted_measure;
  tab.summary["min_slack"] = *std::min_element(sf.slack.begin(), sf.slack.end());
  tab.summary["cross_check_drift"] = ct.max_drift;
  return tab;
}

}  // namespace nevlab
