#include <random>

#include "doctest.h"
#include "nevlab/funcrep.hpp"

using namespace nevlab;

namespace {
GaussRational q(long a, long b = 1) { return GaussRational(Rational(a, b)); }

cplx random_point(std::mt19937_64& rng, real R) {
  std::uniform_real_distribution<double> u(0, 1);
  real rr = R * std::sqrt(real(u(rng)));
  return std::polar<real>(rr, kTwoPi * real(u(rng)));
}
}  // namespace

TEST_CASE("exact parsing") {
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-3/6") == Rational(-1, 2));
  CHECK(parse_rational("2.5e-1") == Rational(1, 4));
  GaussRational g = parse_gauss("-0.5-1.5i");
  CHECK(g.re == Rational(-1, 2));
  CHECK(g.im == Rational(-3, 2));
  CHECK(parse_gauss("i") == GaussRational(0, 1));
  CHECK(parse_gauss("2").im == 0);
  CHECK_THROWS_AS(parse_rational("abc"), Error);
}

TEST_CASE("polynomial gcd") {
  Poly a = Poly::from_roots({q(1), q(2), GaussRational(0, 1)});
  Poly b = Poly::from_roots({q(2), GaussRational(0, 1), q(5)});
  Poly g = gcd(a, b);
  CHECK(g == Poly::from_roots({q(2), GaussRational(0, 1)}));
}

TEST_CASE("eval examples") {
  CHECK(std::abs(gallery("exp").first.eval(0) - cplx(1)) < 1e-18L);
  CHECK(std::abs(gallery("quadratic").first.eval(1) - cplx(0.75L)) < 1e-18L);
  // theta-quotient oracle at q = e^{-pi}
  cplx oracle = lambda_detail::lambda_direct(cplx(0, 1), 40);
  CHECK(std::abs(oracle - cplx(0.5L)) < 1e-17L);
  CHECK(std::abs(make_lambda().eval(0) - cplx(0.5L)) < 1e-17L);
  CHECK_THROWS_AS(gallery("pole-disc").first.eval(cplx(1.0L)), Error);
  CHECK_THROWS_AS(gallery("nonexistent"), Error);
}

TEST_CASE("derivative examples") {
  CHECK(std::abs(gallery("square").first.derivative(1).eval(1) - cplx(2)) < 1e-18L);
  CHECK(std::abs(gallery("exp").first.derivative(2).eval(0) - cplx(1)) < 1e-18L);
  CHECK(std::abs(gallery("pole-disc").first.derivative(1).eval(0) - cplx(1)) < 1e-18L);
  CHECK(std::abs(gallery("exp-series").first.derivative(2).eval(cplx(1, 1)) - std::exp(cplx(1, 1))) < 1e-15L);
}

TEST_CASE("lambda reduction matches the direct theta quotient") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3, 3), v(0.4, 3);
  for (int i = 0; i < 200; ++i) {
    cplx tau(u(rng), v(rng));
    P1Value p = lambda_detail::lambda_tau(tau);
    cplx got = (p.u1 / p.u0).value();
    cplx want = lambda_detail::lambda_direct(tau, 80);
    CHECK(std::abs(got - want) <= 1e-14L * std::max<real>(1, std::abs(want)));
  }
}

TEST_CASE("derivative agrees with central differences on gallery maps") {
  std::mt19937_64 rng(11);
  for (const auto& e : map_gallery_manifest()) {
    if (e.name == "rational") continue;
    HoloMap f = gallery(e.name).first;
    HoloMap d = f.derivative(1);
    real R = f.disc().is_plane() ? 4 : 0.9L;
    int bad = 0;
    for (int i = 0; i < 100; ++i) {
      cplx z = random_point(rng, R);
      if (f.has_poles() && std::abs(z - cplx(1)) < 0.05L) continue;
      real h = 1e-5L * std::max<real>(1, std::abs(z));
      cplx fd = (f.eval(z + h) - f.eval(z - h)) / (2 * h);
      cplx an = d.eval(z);
      if (std::abs(fd - an) > 1e-6L * std::max<real>(std::abs(an), 1e-12L)) ++bad;
    }
    INFO(e.name);
    CHECK(bad == 0);
  }
}

TEST_CASE("higher lambda derivatives by Cauchy integral") {
  HoloMap f = make_lambda();
  HoloMap d1 = f.derivative(1), d2 = f.derivative(2);
  cplx z(0.3L, -0.2L);
  real h = 1e-5L;
  cplx fd = (d1.eval(z + h) - d1.eval(z - h)) / (2 * h);
  CHECK(std::abs(fd - d2.eval(z)) < 1e-6L * std::abs(fd));
}

TEST_CASE("shared factors cancel exactly") {
  std::mt19937_64 rng(3);
  GaussRational a(Rational(1, 3), Rational(-2, 7));
  Poly lin({-a, q(1)});
  Poly num = Poly({q(1), q(2), q(0), q(1)});
  Poly den = Poly({q(3), q(-1)});
  HoloMap red = make_rational(num, den);
  HoloMap unr = make_rational(num * lin, den * lin);
  REQUIRE(unr.rational_parts()->second.degree() == 1);
  for (int i = 0; i < 100; ++i) {
    cplx z = random_point(rng, 2.5L);
    CHECK(std::abs(red.eval(z) - unr.eval(z)) <= 1e-15L * std::max<real>(1, std::abs(red.eval(z))));
  }
}

TEST_CASE("lambda omits 0, 1 and infinity") {
  HoloMap f = make_lambda();
  std::mt19937_64 rng(5);
  int hits = 0;
  for (int i = 0; i < 10000; ++i) {
    cplx z = random_point(rng, 0.9999L);
    for (auto a : {P1Point::at(0), P1Point::at(1), P1Point::inf()})
      if (f.target_value(z, a).is_zero()) ++hits;
  }
  CHECK(hits == 0);
}

TEST_CASE("lambda near the boundary stays finite in scaled form") {
  HoloMap f = make_lambda();
  for (real r : {0.999L, 0.9995L}) {
    for (int j = 0; j < 64; ++j) {
      cplx z = std::polar<real>(r, kTwoPi * j / 64);
      P1Value v = f.eval_projective(z);
      CHECK(std::isfinite(v.log_norm()));
      CHECK(std::isfinite(f.target_value(z, P1Point::at(1)).logmag));
    }
  }
}

TEST_CASE("torus Green function") {
  TargetGeometry g = TargetGeometry::torus(1, cplx(0, 1));
  // periodicity
  cplx w(0.23L, 0.41L);
  CHECK(std::abs(torus_green(g, w) - torus_green(g, w + cplx(1, 0))) < 1e-14L);
  CHECK(std::abs(torus_green(g, w) - torus_green(g, w + cplx(0, 1))) < 1e-14L);
  // logarithmic singularity with unit coefficient
  real e1 = torus_green(g, 1e-4L), e2 = torus_green(g, 1e-5L);
  CHECK(std::abs((e2 - e1) - std::log(10.0L)) < 1e-6L);
  // mean zero over the cell (midpoint rule, singularity avoided by offset grid)
  const int n = 400;
  real s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += torus_green(g, cplx((i + 0.5L) / n, (j + 0.5L) / n));
  CHECK(std::abs(s / (n * n)) < 1e-4L);
  // basis reduction keeps the lattice
  TargetGeometry h = TargetGeometry::torus(1, cplx(3, 1));
  CHECK(std::abs(torus_green(h, w) - torus_green(g, w)) < 1e-12L);
}

TEST_CASE("precision mode demotes evaluations") {
  HoloMap f = gallery("mobius").first;
  cplx z(0.1L, 0.3L);
  cplx ext = f.eval(z);
  set_precision_mode(PrecisionMode::Double);
  cplx dbl = f.eval(z);
  set_precision_mode(PrecisionMode::Extended);
  CHECK(std::abs(ext - dbl) < 1e-15L);
}
