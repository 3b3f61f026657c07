#include <random>

#include "doctest.h"
#include "nevlab/quad.hpp"

using namespace nevlab;

TEST_CASE("circle averages") {
  CHECK(circle_average({[](real) { return 3.7L; }, {}}, kTolSmooth) == doctest::Approx(3.7).epsilon(1e-15));
  // Jensen oracle: average of log|e^{it} - a| is log max(1, |a|)
  real v = circle_average({[](real t) { return std::log(std::abs(std::polar<real>(1, t) - cplx(2))); }, {}},
                          kTolSmooth);
  CHECK(std::fabs(v - std::log(2.0L)) < 1e-9L);
  real e = std::exp(1.0L);
  real w = circle_average({[&](real t) { return std::log(std::abs(e * std::polar<real>(1, t))); }, {}}, kTolSmooth);
  CHECK(std::fabs(w - 1) < 1e-12L);
}

TEST_CASE("log singularity on the circle needs a hint") {
  cplx a = std::polar<real>(1, 0.7L);
  auto g = [&](real t) { return std::log(std::abs(std::polar<real>(1, t) - a)); };
  real v = circle_average({g, {0.7L}}, kTolSingular);
  CHECK(std::fabs(v) < 1e-5L);
}

TEST_CASE("rotation invariance") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 2 * M_PI);
  auto g = [](real t) { return std::exp(std::cos(3 * t)) + std::sin(t) * std::sin(t); };
  real base = circle_average({g, {}}, kTolSmooth);
  for (int i = 0; i < 20; ++i) {
    real phi = u(rng);
    real v = circle_average({[&](real t) { return g(t + phi); }, {}}, kTolSmooth);
    CHECK(std::fabs(v - base) <= 2 * kTolSmooth);
  }
}

TEST_CASE("undeclared non-integrable singularity fails") {
  auto g = [](real t) { return 1 / std::fabs(t - 1.0L); };
  CHECK_THROWS_AS(circle_average({g, {1.0L}}, 1e-8L), Error);
}

TEST_CASE("height integral closed forms") {
  auto fs = [](cplx z) { real d = 1 + std::norm(z); return 1 / (d * d); };
  CHECK(std::fabs(height_double_integral(fs, 1, kTolSmooth) - std::log(2.0L) / 2) < 1e-8L);
  CHECK(height_double_integral([](cplx) { return real(0); }, 3, kTolSmooth) == 0);
  auto poinc = [](cplx z) { real d = 1 - std::norm(z); return 2 / (d * d); };
  CHECK(std::fabs(height_double_integral(poinc, 0.5L, kTolSmooth) - std::log(4.0L / 3)) < 1e-8L);
}

TEST_CASE("height integral on a grid: monotone and convex in log r") {
  auto fs = [](cplx z) { real d = 1 + std::norm(z - cplx(0.3L, 0.1L)); return 1 / (d * d); };
  RadialGrid g = RadialGrid::geometric(0.1L, 20, 24);
  std::vector<real> T = height_integral_grid(fs, g.radii, kTolSmooth);
  for (size_t i = 0; i < T.size(); ++i) {
    CHECK(std::fabs(T[i] - height_double_integral(fs, g.radii[i], kTolSmooth)) < 1e-8L);
    if (i) CHECK(T[i] >= T[i - 1]);
    // equal spacing in log r, so the plain second difference applies
    if (i >= 2) CHECK(T[i] - 2 * T[i - 1] + T[i - 2] >= -kTolSmooth);
  }
}

TEST_CASE("Green-Jensen residuals") {
  real r = 1.7L;
  CHECK(std::fabs(green_jensen_residual([](cplx z) { return z.real(); }, [](real) { return real(0); }, r)) < 1e-9L);
  CHECK(std::fabs(green_jensen_residual([](cplx z) { return std::norm(z); }, [](real t) { return t * t; }, r)) < 1e-9L);
  cplx a(0.4L, 0.5L);
  real ra = std::abs(a);
  real res = green_jensen_residual([&](cplx z) { return std::log(std::abs(z - a)); },
                                   [&](real t) { return t > ra ? real(0.5) : real(0); }, r, kTolSmooth, {ra});
  CHECK(std::fabs(res) < 1e-8L);
}

TEST_CASE("calculus lemma examples") {
  SUBCASE("log pole on the unit disc") {
    RadialGrid g = RadialGrid::boundary(1, 0.5L, 1e-4L, 60);
    auto res = calculus_lemma_check([](real r) { return std::log(1 / (1 - r)); }, [](real r) { return 1 / (1 - r); },
                                    0.5L, g);
    CHECK(res.weighted_measure < 10);
    for (real r : res.flagged_radii) CHECK(r < 1 - std::exp(-1.0L) + 0.02L);
  }
  SUBCASE("h = r") {
    RadialGrid g = RadialGrid::geometric(0.01L, 50, 60);
    auto res = calculus_lemma_check([](real r) { return r; }, [](real) { return real(1); }, 0.5L, g);
    CHECK(res.weighted_measure <= 1);
    CHECK(!res.flagged_radii.empty());
    for (real r : res.flagged_radii) CHECK(r < 1);
  }
  SUBCASE("constant h") {
    RadialGrid g = RadialGrid::geometric(0.1L, 10, 20);
    auto res = calculus_lemma_check([](real) { return real(2); }, [](real) { return real(1); }, 0.5L, g);
    CHECK(res.flagged_radii.empty());
    CHECK(res.weighted_measure == 0);
  }
  SUBCASE("second-order form") {
    RadialGrid g = RadialGrid::boundary(1, 0.5L, 1e-4L, 60);
    auto res = calculus_lemma_check([](real r) { return std::log(1 / (1 - r)); }, [](real r) { return 1 / (1 - r); },
                                    0.5L, g, true);
    CHECK(res.weighted_measure < 10);
  }
  SUBCASE("decreasing h is rejected") {
    RadialGrid g = RadialGrid::geometric(0.1L, 10, 20);
    CHECK_THROWS_AS(calculus_lemma_check([](real r) { return -r; }, [](real) { return real(1); }, 0.5L, g), Error);
  }
}

TEST_CASE("standard grids") {
  RadialGrid a = RadialGrid::standard(kInf), b = RadialGrid::standard(1);
  CHECK(a.size() == 48);
  CHECK(a.radii.front() == 1);
  CHECK(std::fabs(a.radii.back() - 50) < 1e-15L);
  CHECK(b.size() == 48);
  CHECK(std::fabs(b.radii.front() - 0.5L) < 1e-15L);
  CHECK(std::fabs(b.radii.back() - 0.9995L) < 1e-15L);
  for (real w : a.weights) CHECK(w > 0);
}
