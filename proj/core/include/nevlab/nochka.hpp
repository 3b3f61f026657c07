#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nevlab/exact.hpp"
#include "nevlab/projcurve.hpp"

namespace nevlab {

using Covector = std::vector<GaussRational>;

int exact_rank(const std::vector<Covector>& vecs);

// Every n+1 of the normals span the dual of C^{k+1}.
bool subgeneral_check(const std::vector<Covector>& normals, int n);
bool subgeneral_check(const std::vector<std::vector<cplx>>& normals, int n);

struct NochkaWeights {
  int n = 0, k = 0;
  std::vector<Rational> omega;
  Rational theta;
  std::vector<std::string> certificate;  // one line per verified property
};

// Exact-rational feasibility search over a descending theta scan (denominators <= 64).
// Among feasible weights at the first feasible theta: maximize min omega, then lexicographically.
NochkaWeights nochka_weights(const std::vector<Covector>& normals, int n);
// Same, with dim L(B) from SVD ranks.
NochkaWeights nochka_weights(const std::vector<std::vector<cplx>>& normals, int n);

// Re-checks properties (i)-(iv) exactly; throws PreconditionViolation naming the first failure.
std::vector<std::string> verify_nochka(const NochkaWeights& w, const std::vector<Covector>& normals);

struct PropertyV {
  std::vector<int> M;
  bool ok = false;
};
// Searches bases M of L(Y) inside Y for prod_{Y} E_j^{omega_j} <= prod_{M} E_j.
PropertyV verify_property_v(const NochkaWeights& w, const std::vector<Covector>& normals, const std::vector<real>& E,
                            const std::vector<int>& Y);

// maximize c.x subject to A_ub x <= b_ub, A_eq x = b_eq, x >= 0 (two-phase simplex, Bland's rule).
// Returns nothing when infeasible; throws NoConvergence when unbounded.
std::optional<std::vector<Rational>> lp_maximize(const std::vector<Rational>& c,
                                                 const std::vector<std::vector<Rational>>& A_ub,
                                                 const std::vector<Rational>& b_ub,
                                                 const std::vector<std::vector<Rational>>& A_eq,
                                                 const std::vector<Rational>& b_eq);

// SMT for a curve whose image lies in the span of `plane` (k+1 vectors of C^{n+1}).
NevanlinnaTable nochka_smt_report(const ProjCurve& c, const std::vector<std::vector<cplx>>& plane,
                                  const std::vector<Hyperplane>& hyperplanes, const RadialGrid& grid,
                                  real eps = 0.1L, std::optional<real> growth = {});

}  // namespace nevlab
