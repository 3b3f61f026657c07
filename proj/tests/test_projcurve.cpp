#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "nevlab/projcurve.hpp"

using namespace nevlab;

namespace {

real range_of(const std::vector<real>& v) {
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

std::vector<real> plucker_values(const ProjCurve& c, int k, const RadialGrid& grid) {
  std::vector<real> out;
  for (real r : grid.radii) out.push_back(plucker_residual(c, k, r));
  return out;
}

// Random unitary via QR of a Gaussian matrix (Gram-Schmidt).
std::vector<std::vector<cplx>> random_unitary(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0, 1);
  std::vector<std::vector<cplx>> u(m, std::vector<cplx>(m));
  for (int i = 0; i < m; ++i) {
    for (auto& x : u[i]) x = cplx(g(rng), g(rng));
    for (int j = 0; j < i; ++j) {
      cplx d = 0;
      for (int l = 0; l < m; ++l) d += std::conj(u[j][l]) * u[i][l];
      for (int l = 0; l < m; ++l) u[i][l] -= d * u[j][l];
    }
    real nn = 0;
    for (auto& x : u[i]) nn += std::norm(x);
    for (auto& x : u[i]) x /= std::sqrt(nn);
  }
  return u;
}

std::vector<cplx> mat_vec(const std::vector<std::vector<cplx>>& u, const std::vector<cplx>& v) {
  std::vector<cplx> out(v.size(), 0);
  for (size_t i = 0; i < v.size(); ++i)
    for (size_t j = 0; j < v.size(); ++j) out[i] += u[i][j] * v[j];
  return out;
}

}  // namespace

TEST_CASE("associated curves of the moment curve") {
  auto c = curve_gallery("moment", {{"n", "2"}});
  auto a1 = associated_curve(c, 1);
  REQUIRE(a1.exact);
  REQUIRE(a1.exact->size() == 3);
  CHECK((*a1.exact)[0] == Poly::constant(1));
  CHECK((*a1.exact)[1] == Poly::monomial(1, 2));
  CHECK((*a1.exact)[2] == Poly::monomial(2));
  auto a2 = associated_curve(c, 2);
  REQUIRE(a2.exact->size() == 1);
  CHECK((*a2.exact)[0] == Poly::constant(2));
  auto line = associated_curve(curve_gallery("line"), 1);
  CHECK((*line.exact)[0] == Poly::constant(1));

  // F_1 of [1 : e^z : e^{2z}] is (e^z, 2 e^{2z}, e^{3z}).
  auto e = curve_gallery("exp-curve", {{"n", "2"}});
  const cplx z(0.3L, -0.2L);
  auto w = wedge_at(e, 1, z);
  CHECK(std::abs(w[0].value() - std::exp(z)) < 1e-15L);
  CHECK(std::abs(w[1].value() - real(2) * std::exp(real(2) * z)) < 1e-15L);
  CHECK(std::abs(w[2].value() - std::exp(real(3) * z)) < 1e-15L);

  CHECK_THROWS_AS(associated_curve(curve_gallery("exp-degenerate"), 2), Error);
  CHECK_FALSE(curve_gallery("exp-degenerate").nondegenerate());
  CHECK(e.nondegenerate());
}

TEST_CASE("h_k densities") {
  auto line = curve_gallery("line");
  CHECK(std::fabs(hk_density(line, 0, 0) - 1) < 1e-15L);
  CHECK(std::fabs(hk_density(line, 0, 1) - 0.25L) < 1e-15L);
  auto c = curve_gallery("moment", {{"n", "2"}});
  CHECK(hk_density(c, 2, cplx(0.3L, 0.2L)) == 0);

  // n = 1 agrees with the Fubini-Study pullback of f_1 / f_0.
  auto ex = curve_gallery("exp-line");
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 50; ++i) {
    cplx z(u(rng), u(rng));
    real fs = pullback_density(make_exp(), TargetGeometry::p1(), z);
    CHECK(std::fabs(hk_density(ex, 0, z) - fs) <= 1e-8L * fs);
  }
}

TEST_CASE("h_k and T_{F_k} are invariant under a common factor") {
  auto c = curve_gallery("moment", {{"n", "2"}});
  std::vector<HoloMap> scaled;
  for (const auto& f : c.components()) scaled.push_back(make_product(f, make_exp(2, cplx(0.5L, 1))));
  ProjCurve s(scaled, "scaled");
  CHECK_FALSE(s.is_polynomial());
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 50; ++i) {
    cplx z(u(rng), u(rng));
    for (int k = 0; k < 2; ++k) {
      real a = hk_density(c, k, z), b = hk_density(s, k, z);
      CHECK(std::fabs(a - b) <= 1e-8L * a);
    }
  }
  for (int k = 0; k < 2; ++k) CHECK(std::fabs(characteristic_fk(c, k, 2) - characteristic_fk(s, k, 2)) < 1e-6L);
}

TEST_CASE("characteristic of associated curves") {
  auto line = curve_gallery("line");
  CHECK(std::fabs(characteristic_fk(line, 0, 1) - std::log(2.0L) / 2) < 1e-10L);
  auto c = curve_gallery("moment", {{"n", "2"}});
  CHECK(characteristic_fk(c, 2, 3) == 0);
  // circavg log |(1, e^z, e^{2z})| - log sqrt 3 at r = 10, mpmath to 30 digits.
  auto e = curve_gallery("exp-curve", {{"n", "2"}});
  CHECK(std::fabs(characteristic_fk(e, 0, 10) - 5.83438731338162849990886429536L) < 1e-8L);
}

TEST_CASE("Plucker residuals are bounded") {
  auto near = RadialGrid::geometric(0.2L, 5, 8);
  CHECK(range_of(plucker_values(curve_gallery("line"), 0, near)) <= 0.5L);
  CHECK(range_of(plucker_values(curve_gallery("moment", {{"n", "2"}}), 1, near)) <= 0.5L);
  auto far = RadialGrid::geometric(1, 20, 4);
  CHECK(range_of(plucker_values(curve_gallery("exp-curve", {{"n", "2"}}), 1, far)) <= 1.0L);
  CHECK_THROWS_AS(plucker_residual(curve_gallery("line"), 1, 1), Error);
}

TEST_CASE("hyperplane distances") {
  Hyperplane h({1, 0, 0});
  CHECK(hyperplane_distance({1, 0, 0}, 0, h) == doctest::Approx(1));
  CHECK(hyperplane_distance({0, 1, 0}, 0, h) == 0);
  CHECK(std::fabs(hyperplane_distance({1, 1}, 0, Hyperplane({1, 0})) - 1 / std::sqrt(2.0L)) < 1e-15L);
  CHECK_THROWS_AS(hyperplane_distance({0, 0, 0}, 0, h), Error);

  // Unitary invariance on a decomposable 2-vector in C^3.
  std::mt19937_64 rng(3);
  auto U = random_unitary(3, rng);
  std::vector<cplx> p{cplx(1, 2), cplx(0.5L, -1), cplx(3, 0)}, q{cplx(0, 1), cplx(2, 2), cplx(-1, 0.5L)};
  Hyperplane H({cplx(0.3L, 0.1L), cplx(-1, 0.4L), cplx(0.7L, 0)});
  auto wedge2 = [](const std::vector<cplx>& a, const std::vector<cplx>& b) {
    std::vector<cplx> w;
    for (const auto& J : index_subsets(3, 2)) w.push_back(a[J[0]] * b[J[1]] - a[J[1]] * b[J[0]]);
    return w;
  };
  // A unitary acts on hyperplane normals through its inverse transpose, i.e. conj(U).
  std::vector<std::vector<cplx>> Uc = U;
  for (auto& row : Uc)
    for (auto& x : row) x = std::conj(x);
  for (int k = 0; k < 2; ++k) {
    auto xi = k == 0 ? p : wedge2(p, q);
    auto xu = k == 0 ? mat_vec(U, p) : wedge2(mat_vec(U, p), mat_vec(U, q));
    Hyperplane Hu(mat_vec(Uc, H.normal));
    CHECK(std::fabs(hyperplane_distance(xi, k, H) - hyperplane_distance(xu, k, Hu)) < 1e-10L);
  }
}

TEST_CASE("weak first main theorem for F_k") {
  auto e = curve_gallery("exp-curve", {{"n", "2"}});
  Hyperplane H({1, cplx(0.5L, 0.5L), -2});
  auto grid = RadialGrid::geometric(1, 20, 8);
  for (int k = 0; k < 2; ++k) {
    auto T = characteristic_fk_table(e, k, grid, false).T;
    std::vector<real> gap;
    for (size_t i = 0; i < grid.size(); ++i) gap.push_back(proximity_fk(e, k, grid.radii[i], H) - T[i]);
    // One constant, fitted on the first third, bounds m - T on the whole grid.
    real C = *std::max_element(gap.begin(), gap.begin() + gap.size() / 3);
    for (real g : gap) CHECK(g <= C + 1e-6L);
  }
  // Desk-scale bound with c_f = 0: T_{F_1} <= 64 T_f + 0.6 log+ r + C.
  auto t0 = characteristic_fk_table(e, 0, grid, false).T;
  auto t1 = characteristic_fk_table(e, 1, grid, false).T;
  real C = t1[0] - 64 * t0[0];
  for (size_t i = 0; i < grid.size(); ++i)
    CHECK(t1[i] <= 64 * t0[i] + 0.6L * std::max<real>(0, std::log(grid.radii[i])) + std::max<real>(C, 0) + 1e-9L);
}

TEST_CASE("Cartan SMT report") {
  auto e = curve_gallery("exp-curve", {{"n", "2"}});
  std::vector<Hyperplane> coord{Hyperplane({1, 0, 0}), Hyperplane({0, 1, 0}), Hyperplane({0, 0, 1})};
  auto tab = cartan_smt_report(e, coord, RadialGrid::geometric(1, 30, 12));
  const auto& last = tab.rows.back();
  real sum_m = 0;
  for (const auto& m : tab.m) sum_m += m.back();
  // m(r, H_j) = T(r) + log sqrt 3 for every coordinate hyperplane.
  for (const auto& m : tab.m) CHECK(std::fabs(m.back() - last.T - std::log(3.0L) / 2) < 1e-8L);
  CHECK(std::fabs(sum_m / last.T - 3.08881212554902708351249860516L) < 1e-8L);
  CHECK(last.N_ram == 0);
  CHECK(tab.summary.at("min_slack") >= -1);
  CHECK(tab.summary.at("exceptional_measure") <= 10);
  CHECK(tab.columns.at("Lambda").size() == tab.rows.size());

  auto line = curve_gallery("line");
  std::vector<Hyperplane> three{Hyperplane({1, 0}), Hyperplane({0, 1}), Hyperplane({1, -1})};
  auto t2 = cartan_smt_report(line, three, RadialGrid::geometric(1, 100, 24));
  CHECK(t2.summary.at("defect_sum") <= 2.02L);

  auto deg = curve_gallery("exp-degenerate");
  CHECK_THROWS_AS(cartan_smt_report(deg, {Hyperplane({0, 0, 1})}, RadialGrid::geometric(1, 5, 4)), Error);
  auto dline = ProjCurve({make_polynomial(Poly::constant(1)), make_polynomial(Poly::monomial(1)),
                          make_polynomial(Poly::monomial(1, 2))});
  try {
    cartan_smt_report(dline, {Hyperplane({0, 2, -1})}, RadialGrid::geometric(1, 5, 4));
    FAIL("expected an error");
  } catch (const Error& err) {
    CHECK((err.kind() == ErrorKind::DegenerateCurve || err.kind() == ErrorKind::ImageInHyperplane));
  }
}

TEST_CASE("Ahlfors estimate") {
  auto a1 = ahlfors_estimate_check(curve_gallery("line"), 0, Hyperplane({1, 0}), 0.5L, RadialGrid::geometric(0.2L, 5, 12));
  CHECK(a1.all_ok);
  auto a2 = ahlfors_estimate_check(curve_gallery("exp-line"), 0, Hyperplane({0, 1}), 0.5L, RadialGrid::geometric(1, 20, 12));
  CHECK(a2.all_ok);
  CHECK_THROWS_AS(ahlfors_estimate_check(curve_gallery("line"), 0, Hyperplane({1, 0}), 1.0L, RadialGrid::geometric(0.2L, 5, 4)),
                  Error);
}

TEST_CASE("product to sum") {
  auto one = product_to_sum_check({Hyperplane({1, 2})}, 0, 0.5L, 200);
  CHECK(std::fabs(one.max_ratio - 1) < 1e-12L);
  std::vector<Hyperplane> four{Hyperplane({1, 0, 0}), Hyperplane({0, 1, 0}), Hyperplane({0, 0, 1}), Hyperplane({1, 1, 1})};
  auto r = product_to_sum_check(four, 1, 0.5L, 1000);
  CHECK(std::isfinite(r.max_ratio));
  CHECK(r.max_ratio_doubled >= r.max_ratio);
  // Supremum (3/2)^{3/2}, approached as x tends into the fourth hyperplane.
  CHECK(r.max_ratio_doubled <= std::pow(1.5L, 1.5L));
  CHECK_THROWS_AS(product_to_sum_check({Hyperplane({1, 0}), Hyperplane({2, 0})}, 0, 0.5L, 10), Error);
}
