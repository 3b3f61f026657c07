#include <cmath>

#include "doctest.h"
#include "nevlab/ldl.hpp"

using namespace nevlab;

namespace {
HoloMap pole_disc() { return make_rational(Poly::constant(1), Poly({1, -1}), Disc{1}); }
HoloMap quadratic() { return make_polynomial(Poly({GaussRational(Rational(-1, 4)), 0, 1})); }
}  // namespace

TEST_CASE("log-derivative proximity") {
  CHECK(logderiv_proximity(make_exp(), 7, 1) == 0);
  CHECK(logderiv_proximity(make_polynomial(Poly::monomial(1)), 2, 1) == 0);
  // circavg log+ 1/|1 - 0.9 e^{it}|, mpmath quadrature.
  real v = logderiv_proximity(pole_disc(), 0.9L, 1);
  CHECK(v > 0);
  CHECK(v < 2);
  CHECK(std::fabs(v - 0.2898950231102666028366148L) < 1e-7L);
  CHECK_THROWS_AS(logderiv_proximity(make_exp(), 1, 0), Error);
}

TEST_CASE("log-derivative chain and scale invariance") {
  std::vector<HoloMap> maps{quadratic(), make_exp(cplx(2, 1), cplx(0.5L, -1)),
                            make_rational(Poly({1, 0, 1}), Poly({GaussRational(3), 1}))};
  for (const auto& f : maps) {
    for (real r : {0.7L, 2.3L}) {
      for (int k = 2; k <= 3; ++k) {
        real lhs = logderiv_proximity(f, r, k);
        real chain = 0;
        for (int j = 1; j <= k; ++j) chain += logderiv_proximity(f.derivative(j - 1), r, 1);
        CHECK(lhs <= chain + 1e-9L);
      }
      real a = logderiv_proximity(f, r, 2), b = logderiv_proximity(f.scaled(cplx(-3, 7)), r, 2);
      CHECK(std::fabs(a - b) <= 1e-9L);
    }
  }
}

TEST_CASE("LDL residual reports") {
  auto e = ldl_residual(make_exp(), RadialGrid::geometric(1, 50, 16), 1, 0.5L);
  for (const auto& row : e.rows) {
    CHECK(row.lhs == 0);
    CHECK(row.lhs <= row.rhs);
  }
  auto q = ldl_residual(quadratic(), RadialGrid::geometric(0.2L, 50, 48), 1, 0.5L);
  CHECK(q.weighted_measure <= 10);
  CHECK(q.c == 0);

  auto grid = RadialGrid::boundary(1, 0.5L, 0.001L, 24);
  try {
    ldl_residual(pole_disc(), grid, 2, 0.5L);
    FAIL("expected MissingC");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::MissingC);
  }
  auto d = ldl_residual(pole_disc(), grid, 2, 0.5L, GammaPolicy::inverse_distance());
  CHECK(d.weighted_measure <= 10);
  CHECK_THROWS_AS(ldl_residual(make_exp(), grid, 1, 1.5L), Error);
}
