#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "nevlab/nevan.hpp"

using namespace nevlab;

namespace {
real range_of(const std::vector<real>& v) {
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}
}  // namespace

TEST_CASE("characteristic closed forms") {
  auto [id, p1] = gallery("identity");
  auto v = characteristic(id, p1, 1);
  CHECK(std::fabs(v.T - std::log(2.0L) / 2) < 1e-9L);
  CHECK(std::fabs(v.T_area - std::log(2.0L) / 2) < 1e-6L);

  auto [lp, poin] = gallery("lambda-poincare");
  CHECK(std::fabs(characteristic(lp, poin, 0.9L).T - std::log(100.0L / 19)) < 1e-6L);

  // T(r) = r/pi + O(1) for exp; the constant is m(0, inf) = log sqrt 2 plus o(1).
  auto [ex, p1b] = gallery("exp");
  real T10 = characteristic(ex, p1b, 10).T;
  CHECK(std::fabs(T10 - 10 / kPi) < 0.02L * 10 / kPi + 0.5L);
}

TEST_CASE("proximity examples") {
  auto [ex, p1] = gallery("exp");
  CHECK(std::fabs(proximity(ex, p1, 10, P1Point::inf()) - 10 / kPi) < 0.1L);
  real m1 = proximity(ex, p1, 10, P1Point::at(1));
  CHECK(m1 <= 1.5L);
  CHECK(m1 >= 0);
  auto [id, p1b] = gallery("identity");
  CHECK(std::fabs(proximity(id, p1b, 10, P1Point::at(0)) - std::log1p(1 / 100.0L) / 2) < 1e-9L);
}

TEST_CASE("first main theorem residuals") {
  auto check = [](const char* name, P1Point a, std::vector<real> radii) {
    auto [f, g] = gallery(name);
    std::vector<real> res;
    for (real r : radii) res.push_back(fmt_residual(f, g, r, a));
    CHECK_MESSAGE(range_of(res) <= 1, name);
    return res;
  };
  std::vector<real> big{2, 5, 10, 20, 50, 100};
  auto z1 = check("identity", P1Point::at(1), big);
  // Exact: m + N - T = log sqrt 2 for z and a = 1.
  for (real v : z1) CHECK(std::fabs(v - std::log(2.0L) / 2) < 1e-5L);
  check("identity", P1Point::inf(), big);
  check("exp", P1Point::at(0), {1, 3, 10, 30});
  check("square", P1Point::at(0), {1, 5, 25, 50});
  check("mobius", P1Point::at(0), {1, 5, 25, 50});
}

TEST_CASE("growth index") {
  auto [ex, p1] = gallery("exp");
  auto e = growth_index(ex, p1, RadialGrid::standard(kInf));
  CHECK(e.c_est == 0);
  CHECK(e.definitional);

  RadialGrid g = RadialGrid::standard(1);
  std::vector<real> T;
  for (real r : g.radii) T.push_back(2 * -std::log1p(-r));
  auto s = growth_index_from_values(g, T);
  CHECK(std::fabs(s.c_est - 0.5L) < 1e-9L);

  std::vector<real> flat(g.size(), 1.5L);
  CHECK(growth_index_from_values(g, flat).bounded);
  CHECK(std::isinf(growth_index_from_values(g, flat).c_est));

  std::vector<real> wild;
  for (size_t i = 0; i < g.size(); ++i) wild.push_back(i % 2 ? 10 + i : real(i));
  CHECK_THROWS_AS(growth_index_from_values(g, wild), Error);
}

TEST_CASE("growth index of the Poincare pullback") {
  auto [lp, poin] = gallery("lambda-poincare");
  auto e = growth_index(lp, poin, RadialGrid::standard(1));
  CHECK(e.c_est >= 0.9L);
  CHECK(e.c_est <= 1.1L);
}

TEST_CASE("defects") {
  auto [ex, p1] = gallery("exp");
  // m(r, 1) tends to log sqrt 2, so the tail must reach r = 100 for a 0.02 bound.
  RadialGrid g = RadialGrid::geometric(1, 100, 48);
  CHECK(defect_estimate(ex, p1, P1Point::at(0), g).value >= 0.99L);
  CHECK(defect_estimate(ex, p1, P1Point::at(1), g).value <= 0.02L);
  auto [sq, p1b] = gallery("square");
  CHECK(defect_estimate(sq, p1b, P1Point::inf(), g).value >= 0.98L);
  CHECK(defect_estimate(sq, p1b, P1Point::at(0), g).value <= 0.02L);
  auto d = defect_from_values({1, 2, 0.5L}, {1, 1, 1}, 2);
  CHECK(d.value == 0.5L);
  CHECK(d.last == 0.5L);
}

TEST_CASE("SMT report for exp") {
  auto [ex, p1] = gallery("exp");
  auto tab = smt_riemann_report(ex, p1, {P1Point::at(0), P1Point::inf()}, RadialGrid::geometric(5, 50, 24), 0.1L);
  CHECK(tab.summary.at("c") == 0);
  CHECK(tab.summary.at("defect_sum") <= 2.0001L);
  CHECK(tab.summary.at("defect_sum") >= 1.98L);
  for (const auto& row : tab.rows) {
    CHECK(row.slack >= -0.5L);
    CHECK(row.N_ram == 0);
    CHECK(std::fabs(row.T - row.T_area) <= 0.05L);
  }
  CHECK(tab.summary.at("exceptional_measure") <= 10);
}

TEST_CASE("SMT report for a torus") {
  auto [f, g] = gallery("torus-proj");
  cplx a(0.31L, 0.17L);
  auto tab = smt_riemann_report(f, g, {P1Point::at(a)}, RadialGrid::geometric(2, 40, 16), 0.1L);
  CHECK(tab.summary.at("defect_sum") <= 0.1L);
  for (const auto& row : tab.rows) CHECK(row.slack >= -0.5L);
  // Lattice-point oracle: n(t, a) is about pi t^2 / area, so N(r, a) is about pi r^2 / (2 area).
  real r = tab.rows.back().r;
  CHECK(std::fabs(tab.N[0].back() / (kPi * r * r / (2 * g.cell_area)) - 1) < 0.05L);
}

TEST_CASE("report preconditions") {
  auto [ex, p1] = gallery("exp");
  CHECK_THROWS_AS(smt_riemann_report(ex, p1, {P1Point::at(0), P1Point::at(0)}, RadialGrid::geometric(1, 5, 6)),
                  Error);
  auto [pd, p1b] = gallery("pole-disc");
  try {
    smt_riemann_report(pd, p1b, {P1Point::at(0)}, RadialGrid::standard(1));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingC);
  }
}

TEST_CASE("SMT report for lambda") {
  auto [lam, p1] = gallery("lambda");
  auto tab = smt_riemann_report(lam, p1, {P1Point::at(0), P1Point::at(1), P1Point::inf()},
                                RadialGrid::boundary(1, 0.5L, 0.005L, 24));
  // lambda omits all three targets, so m = T + log(1/chordal(1/2, a)) exactly.
  const real offsets[3] = {std::log(5.0L) / 2, std::log(10.0L) / 2, std::log(1.25L) / 2};
  for (size_t j = 0; j < 3; ++j)
    for (size_t i = 0; i < tab.rows.size(); ++i) CHECK(std::fabs(tab.m[j][i] - tab.rows[i].T - offsets[j]) < 1e-6L);
  CHECK(tab.summary.at("defect_sum") == 3);
  CHECK(tab.summary.at("implied_c_lower") >= 0.9L);
  CHECK(tab.summary.at("c") >= 0.9L);
  CHECK(tab.summary.at("c") <= 1.1L);
  for (const auto& row : tab.rows) CHECK(row.N_ram == 0);
}
