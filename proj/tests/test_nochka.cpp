#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "nevlab/nochka.hpp"

using namespace nevlab;

namespace {

Covector cv(std::initializer_list<int> l) {
  Covector c;
  for (int x : l) c.push_back(GaussRational(x));
  return c;
}

// Random n-subgeneral configuration in C^{k+1}; repeats are drawn from a small pool when n > k.
std::vector<Covector> random_config(std::mt19937_64& rng, int q, int n, int k) {
  std::uniform_int_distribution<int> coef(-3, 3);
  for (;;) {
    int pool_size = n > k ? std::max(k + 2, q - (n - k)) : q;
    std::vector<Covector> pool(pool_size, Covector(k + 1));
    for (auto& v : pool)
      for (auto& x : v) x = GaussRational(coef(rng), coef(rng) * (rng() % 2));
    std::vector<Covector> out(pool.begin(), pool.begin() + std::min(q, pool_size));
    std::uniform_int_distribution<int> pick(0, pool_size - 1);
    while (static_cast<int>(out.size()) < q) out.push_back(pool[pick(rng)]);
    bool nonzero = true;
    for (const auto& v : out)
      nonzero = nonzero && !std::all_of(v.begin(), v.end(), [](const GaussRational& x) { return x.is_zero(); });
    if (nonzero && subgeneral_check(out, n)) return out;
  }
}

}  // namespace

TEST_CASE("exact linear programming") {
  // max x + y, x + 2y <= 4, 3x + y <= 6 -> (8/5, 6/5).
  auto x = lp_maximize({1, 1}, {{1, 2}, {3, 1}}, {4, 6}, {}, {});
  REQUIRE(x);
  CHECK((*x)[0] == Rational(8, 5));
  CHECK((*x)[1] == Rational(6, 5));
  CHECK_FALSE(lp_maximize({1}, {{1}}, {1}, {{1}}, {2}));
  auto y = lp_maximize({0, 1}, {{-1, 0}}, {-1}, {{1, 1}}, {3});
  REQUIRE(y);
  CHECK((*y)[1] == 2);
}

TEST_CASE("subgeneral position") {
  CHECK(subgeneral_check({cv({1, 0, 0}), cv({0, 1, 0}), cv({0, 0, 1}), cv({1, 1, 1})}, 2));
  CHECK(subgeneral_check({cv({1, 0}), cv({0, 1}), cv({1, 1}), cv({1, -1}), cv({1, 2})}, 2));
  CHECK_FALSE(subgeneral_check({cv({1, 0, 0}), cv({1, 0, 0}), cv({0, 1, 0}), cv({0, 0, 1})}, 2));
  std::vector<std::vector<cplx>> num{{1, 0}, {0, 1}, {cplx(1, 1), 2}};
  CHECK(subgeneral_check(num, 1));
}

TEST_CASE("Nochka weights") {
  std::vector<Covector> gp{cv({1, 0, 0}), cv({0, 1, 0}), cv({0, 0, 1}), cv({1, 1, 1}), cv({1, 2, 3}), cv({1, -1, 2})};
  auto w = nochka_weights(gp, 2);
  CHECK(w.theta == 1);
  for (const auto& o : w.omega) CHECK(o == 1);

  std::vector<Covector> five{cv({1, 0}), cv({0, 1}), cv({1, 1}), cv({1, -1}), cv({1, 2})};
  auto w5 = nochka_weights(five, 2);
  CHECK(w5.theta >= Rational(3, 2));
  CHECK(w5.theta <= 2);
  CHECK(verify_nochka(w5, five).size() == 4);

  try {
    nochka_weights(std::vector<Covector>{cv({1, 0}), cv({0, 1})}, 2);
    FAIL("expected a precondition error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PreconditionViolation);
  }

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> Ed(1, 10);
  for (int cfg = 0; cfg < 20; ++cfg) {
    int k = 1 + static_cast<int>(rng() % 2);
    int n = k + static_cast<int>(rng() % (4 - k));
    int qmin = 2 * n - k + 1;
    int q = qmin + static_cast<int>(rng() % (9 - qmin));
    auto normals = random_config(rng, q, n, k);
    auto wr = nochka_weights(normals, n);
    // Independent re-verification of (i)-(iv), zero tolerance.
    CHECK_NOTHROW(verify_nochka(wr, normals));
    for (const auto& B : index_subsets(q, std::min(q, n + 1))) {
      Rational s = 0;
      std::vector<Covector> sub;
      for (int j : B) {
        s += wr.omega[j];
        sub.push_back(normals[j]);
      }
      CHECK(s <= exact_rank(sub));
    }
    if (k == n) CHECK(wr.theta == 1);
    for (int draw = 0; draw < 100; ++draw) {
      std::vector<real> E(q);
      for (auto& e : E) e = Ed(rng);
      int ysize = 1 + static_cast<int>(rng() % std::min(q, n + 1));
      std::vector<int> idx(q);
      std::iota(idx.begin(), idx.end(), 0);
      std::shuffle(idx.begin(), idx.end(), rng);
      std::vector<int> Y(idx.begin(), idx.begin() + ysize);
      std::sort(Y.begin(), Y.end());
      CHECK(verify_property_v(wr, normals, E, Y).ok);
    }
  }
}

TEST_CASE("property (v) trivial cases") {
  std::vector<Covector> gp{cv({1, 0, 0}), cv({0, 1, 0}), cv({0, 0, 1}), cv({1, 1, 1})};
  auto w = nochka_weights(gp, 2);
  auto r = verify_property_v(w, gp, {1, 1, 1, 1}, {0, 1, 3});
  CHECK(r.ok);
  auto s = verify_property_v(w, gp, {2, 3, 5, 7}, {0, 1, 2});
  CHECK(s.ok);
  CHECK(s.M == std::vector<int>{0, 1, 2});
}

TEST_CASE("degenerate SMT") {
  auto c = curve_gallery("exp-degenerate");
  std::vector<Hyperplane> H{Hyperplane({1, 2, 3}), Hyperplane({2, -1, 1}), Hyperplane({cplx(1, 1), 1, -1}),
                            Hyperplane({3, 1, 2}), Hyperplane({-1, cplx(0, 2), 1})};
  std::vector<std::vector<cplx>> plane{{1, 0, 0}, {0, 1, 0}};
  auto tab = nochka_smt_report(c, plane, H, RadialGrid::geometric(2, 30, 12));
  CHECK(tab.summary.at("min_slack") >= -1);
  CHECK(tab.summary.at("theta") >= 1.5L);

  auto withx2 = H;
  withx2.back() = Hyperplane({0, 0, 1});
  CHECK_THROWS_AS(nochka_smt_report(c, plane, withx2, RadialGrid::geometric(2, 30, 6)), Error);

  auto e = curve_gallery("exp-curve", {{"n", "2"}});
  std::vector<Hyperplane> coord{Hyperplane({1, 0, 0}), Hyperplane({0, 1, 0}), Hyperplane({0, 0, 1})};
  auto grid = RadialGrid::geometric(1, 30, 8);
  auto a = nochka_smt_report(e, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, coord, grid);
  auto b = cartan_smt_report(e, coord, grid);
  for (size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::fabs(a.rows[i].slack - b.rows[i].slack) <= 1e-9L);
    CHECK(std::fabs(a.rows[i].m_total - b.rows[i].m_total) <= 1e-9L);
  }
}
