#include <cmath>
#include <sstream>

#include "nevlab/funcrep.hpp"

namespace nevlab {

TargetGeometry TargetGeometry::p1() { return {}; }

TargetGeometry TargetGeometry::pn(int n) {
  if (n < 1) fail(ErrorKind::PreconditionViolation, "projective dimension must be >= 1");
  TargetGeometry g;
  g.kind = Kind::PnFubiniStudy;
  g.n = n;
  return g;
}

TargetGeometry TargetGeometry::torus(cplx w1, cplx w2) {
  real area = std::abs((std::conj(w1) * w2).imag());
  if (!(area > 1e-300L)) fail(ErrorKind::PreconditionViolation, "torus lattice basis is degenerate");
  // Gauss reduction of the basis.
  for (int it = 0; it < 1000; ++it) {
    if (std::abs(w2) < std::abs(w1)) std::swap(w1, w2);
    real mu = std::round((w2 / w1).real());
    if (mu == 0) break;
    w2 -= mu * w1;
  }
  if ((w2 / w1).imag() < 0) w2 = -w2;
  TargetGeometry g;
  g.kind = Kind::TorusFlat;
  g.omega1 = w1;
  g.omega2 = w2;
  g.cell_area = area;
  return g;
}

TargetGeometry TargetGeometry::poincare_pullback(std::function<real(cplx)> density) {
  TargetGeometry g;
  g.kind = Kind::PoincarePullback;
  g.source_density = std::move(density);
  return g;
}

std::string TargetGeometry::kind_name() const {
  switch (kind) {
    case Kind::P1FubiniStudy: return "P1-FubiniStudy";
    case Kind::PnFubiniStudy: return "Pn-FubiniStudy(" + std::to_string(n) + ")";
    case Kind::TorusFlat: return "Torus-flat";
    case Kind::PoincarePullback: return "Poincare-pullback";
  }
  return "?";
}

real torus_green(const TargetGeometry& g, cplx w) {
  cplx tau = g.omega2 / g.omega1;
  cplx x = w / g.omega1;
  x -= std::round(x.imag() / tau.imag()) * tau;
  x -= std::round(x.real());
  cplx ipt(0, kPi);
  // theta_1(pi x | tau) = 2 sum (-1)^n q^{(n+1/2)^2} sin((2n+1) pi x)
  cplx th(0, 0);
  for (int n = 0; n < 60; ++n) {
    real h = n + 0.5L;
    cplx term = std::exp(ipt * tau * h * h) * std::sin(real(2 * n + 1) * kPi * x);
    th += (n % 2 ? real(-1) : real(1)) * term;
    if (std::abs(term) < 1e-22L * std::abs(th)) break;
  }
  th *= real(2);
  // log |eta(tau)|
  real log_eta = (ipt * tau / real(12)).real();
  for (int n = 1; n < 200; ++n) {
    cplx qn = std::exp(real(2 * n) * ipt * tau);
    log_eta += std::log(std::abs(real(1) - qn));
    if (std::abs(qn) < 1e-22L) break;
  }
  real y = x.imag();
  return -(std::log(std::abs(th)) - log_eta) + kPi * y * y / tau.imag();
}

Poly parse_poly(const std::string& list) {
  std::vector<GaussRational> c;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) c.push_back(parse_gauss(item));
  if (c.empty()) fail(ErrorKind::ConfigParse, "empty coefficient list");
  return Poly(std::move(c));
}

namespace {

GaussRational q(long a, long b = 1) { return GaussRational(Rational(a, b)); }

real exp_tail(long N, real r) {
  if (real(N + 1) <= r) return kInf;
  real lt = N * std::log(std::max(r, 1e-300L)) - std::lgamma(real(N + 1));
  return std::exp(lt) * (N + 1) / (N + 1 - r);
}

real poincare_density(cplx z) {
  real d = 1 - std::norm(z);
  return 2 / (d * d);
}

}  // namespace

const std::vector<GalleryEntry>& map_gallery_manifest() {
  static const std::vector<GalleryEntry> m = {
      {"exp", "inf", "P1-FubiniStudy", {}, "e^z"},
      {"exp-series", "inf", "P1-FubiniStudy", {}, "e^z as a Taylor series with explicit tail bound"},
      {"identity", "inf", "P1-FubiniStudy", {}, "z"},
      {"square", "inf", "P1-FubiniStudy", {}, "z^2"},
      {"quadratic", "inf", "P1-FubiniStudy", {}, "z^2 - 1/4"},
      {"shifted-square", "inf", "P1-FubiniStudy", {}, "(z - 1/2)^2"},
      {"mobius", "inf", "P1-FubiniStudy", {}, "(z - 1/2)/(z + 2)"},
      {"pole-disc", "1", "P1-FubiniStudy", {}, "1/(1 - z) on the unit disc"},
      {"rational", "inf", "P1-FubiniStudy", {"numerator", "denominator", "radius"},
       "inline rational map; coefficient lists c0, c1, ... with entries a+bi"},
      {"lambda", "1", "P1-FubiniStudy", {}, "modular lambda composed with z -> i(1+z)/(1-z)"},
      {"lambda-poincare", "1", "Poincare-pullback", {},
       "modular lambda with the pulled-back Poincare form 2/(1-|z|^2)^2"},
      {"torus-proj", "inf", "Torus-flat", {"omega1", "omega2"}, "identity lift to C/(Z omega1 + Z omega2)"},
  };
  return m;
}

std::pair<HoloMap, TargetGeometry> gallery(const std::string& name, const Params& params) {
  auto get = [&](const std::string& k, const std::string& def) {
    auto it = params.find(k);
    return it == params.end() ? def : it->second;
  };
  const Poly one = Poly::constant(q(1));
  const Poly z = Poly::monomial(1);
  if (name == "exp") return {make_exp(), TargetGeometry::p1()};
  if (name == "exp-series") {
    auto coeff = [](long n) { return cplx(std::exp(-std::lgamma(real(n + 1))), 0); };
    return {make_series(coeff, exp_tail, kInf, Disc(), "exp-series"), TargetGeometry::p1()};
  }
  if (name == "identity") return {make_polynomial(z), TargetGeometry::p1()};
  if (name == "square") return {make_polynomial(z * z), TargetGeometry::p1()};
  if (name == "quadratic") return {make_polynomial(Poly({q(-1, 4), q(0), q(1)})), TargetGeometry::p1()};
  if (name == "shifted-square") return {make_polynomial(Poly({q(1, 4), q(-1), q(1)})), TargetGeometry::p1()};
  if (name == "mobius") return {make_rational(Poly({q(-1, 2), q(1)}), Poly({q(2), q(1)})), TargetGeometry::p1()};
  if (name == "pole-disc") return {make_rational(one, Poly({q(1), q(-1)}), Disc(1)), TargetGeometry::p1()};
  if (name == "rational") {
    Poly num = parse_poly(get("numerator", "0, 1"));
    Poly den = parse_poly(get("denominator", "1"));
    std::string rad = get("radius", "inf");
    Disc d = rad == "inf" ? Disc() : Disc(to_real(parse_rational(rad)));
    return {make_rational(num, den, d), TargetGeometry::p1()};
  }
  if (name == "lambda") return {make_lambda(), TargetGeometry::p1()};
  if (name == "lambda-poincare") return {make_lambda(), TargetGeometry::poincare_pullback(poincare_density)};
  if (name == "torus-proj") {
    cplx w1 = parse_gauss(get("omega1", "1")).to_cplx();
    cplx w2 = parse_gauss(get("omega2", "i")).to_cplx();
    return {make_polynomial(z), TargetGeometry::torus(w1, w2)};
  }
  fail(ErrorKind::UnknownName, "unknown gallery name: " + name);
}

}  // namespace nevlab
