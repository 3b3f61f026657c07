#include "nevlab/funcrep.hpp"

#include <cmath>
#include <sstream>

namespace nevlab {

Disc::Disc(real r) : radius(r) {
  if (!(r > 0)) fail(ErrorKind::PreconditionViolation, "disc radius must be positive");
}

ProjJet MapBody::eval_jet(cplx z) const {
  P1Value v = eval_projective(z);
  P1Value d = first_derivative()->eval_projective(z);
  return {v.u0, v.u1, Scaled{}, d.u1};
}

Scaled MapBody::target_value(cplx z, const P1Point& a) const {
  return eval_projective(z).target_numerator(a);
}

Scaled MapBody::target_derivative(cplx z, const P1Point& a) const {
  ProjJet j = eval_jet(z);
  if (a.infinite) return j.d0;
  return j.d1 - j.d0 * a.value;
}

BodyPtr MapBody::first_derivative() const {
  std::call_once(once_, [this] { cached_ = derivative(); });
  return cached_;
}

namespace {

// ---------- rational ----------

class RationalBody final : public MapBody {
 public:
  RationalBody(Poly num, Poly den) {
    if (den.is_zero()) fail(ErrorKind::PreconditionViolation, "zero denominator");
    Poly g = gcd(num, den);
    if (g.degree() > 0) {
      Poly q, r;
      num.divmod(g, q, r);
      num = q;
      den.divmod(g, q, r);
      den = q;
    }
    GaussRational lead = den.leading();
    num_ = num * (GaussRational(1) / lead);
    den_ = den.monic();
    cn_ = num_.to_cplx();
    cd_ = den_.to_cplx();
    dn_ = num_.derivative().to_cplx();
    dd_ = den_.derivative().to_cplx();
  }

  P1Value eval_projective(cplx z) const override {
    return {Scaled::from(round_to_mode(horner(cd_, z))), Scaled::from(round_to_mode(horner(cn_, z)))};
  }
  ProjJet eval_jet(cplx z) const override {
    return {Scaled::from(round_to_mode(horner(cd_, z))), Scaled::from(round_to_mode(horner(cn_, z))),
            Scaled::from(round_to_mode(horner(dd_, z))), Scaled::from(round_to_mode(horner(dn_, z)))};
  }
  Scaled target_value(cplx z, const P1Point& a) const override {
    cplx d = horner(cd_, z);
    if (a.infinite) return Scaled::from(round_to_mode(d));
    return Scaled::from(round_to_mode(horner(cn_, z) - a.value * d));
  }
  Scaled target_derivative(cplx z, const P1Point& a) const override {
    cplx d = horner(dd_, z);
    if (a.infinite) return Scaled::from(round_to_mode(d));
    return Scaled::from(round_to_mode(horner(dn_, z) - a.value * d));
  }
  BodyPtr derivative() const override {
    Poly n = num_.derivative() * den_ - num_ * den_.derivative();
    return std::make_shared<RationalBody>(n, den_ * den_);
  }
  std::string describe() const override {
    if (den_.degree() == 0) return num_.to_string();
    return "(" + num_.to_string() + ")/(" + den_.to_string() + ")";
  }
  bool has_poles() const override { return den_.degree() > 0; }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }

 private:
  Poly num_, den_;
  std::vector<cplx> cn_, cd_, dn_, dd_;
};

// ---------- exp ----------

class ExpBody final : public MapBody {
 public:
  ExpBody(cplx scale, cplx rate) : scale_(scale), rate_(rate) {}
  P1Value eval_projective(cplx z) const override { return {Scaled::one(), value(z)}; }
  ProjJet eval_jet(cplx z) const override {
    Scaled v = value(z);
    return {Scaled::one(), v, Scaled{}, v * rate_};
  }
  BodyPtr derivative() const override { return std::make_shared<ExpBody>(scale_ * rate_, rate_); }
  bool omits(const P1Point& a) const override {
    return a.infinite || (a.value == cplx(0, 0) && scale_ != cplx(0, 0));
  }
  bool locally_injective() const override { return scale_ != cplx(0, 0) && rate_ != cplx(0, 0); }
  std::string describe() const override {
    std::ostringstream os;
    os << "(" << double(scale_.real()) << "," << double(scale_.imag()) << ")*exp((" << double(rate_.real())
       << "," << double(rate_.imag()) << ")z)";
    return os.str();
  }

 private:
  Scaled value(cplx z) const {
    if (scale_ == cplx(0, 0)) return {};
    Scaled v = Scaled::from(scale_) * Scaled::exp_of(rate_ * z);
    if (precision_mode() == PrecisionMode::Double) v.phase = round_to_mode(v.phase);
    return v;
  }
  cplx scale_, rate_;
};

// ---------- power series ----------

class SeriesBody final : public MapBody {
 public:
  SeriesBody(std::function<cplx(long)> coeff, std::function<real(long, real)> tail, real rconv,
             std::string name)
      : coeff_(std::move(coeff)), tail_(std::move(tail)), rconv_(rconv), name_(std::move(name)) {}

  P1Value eval_projective(cplx z) const override { return {Scaled::one(), Scaled::from(sum(z))}; }

  BodyPtr derivative() const override {
    auto c = coeff_;
    auto t = tail_;
    real R = rconv_;
    auto dcoeff = [c](long n) { return real(n + 1) * c(n + 1); };
    // Cauchy-type bound: sum_{n>=N} (n+1)|a_{n+1}| r^n <= (max_n (n+1) x^n / rho) * tail(N+1, rho), x = r/rho.
    auto dtail = [t, R](long N, real r) -> real {
      real rho = std::isinf(R) ? std::max<real>(2 * r, 1) : (r + R) / 2;
      real x = r / rho;
      if (x <= 0) return t(N + 1, rho) * (N + 1) / rho;
      real nstar = -1 / std::log(x) - 1;
      real best = 0;
      for (real n : {real(N), std::floor(nstar), std::ceil(nstar)}) {
        if (n < N) continue;
        best = std::max(best, (n + 1) * std::pow(x, n));
      }
      return best / rho * t(N + 1, rho);
    };
    return std::make_shared<SeriesBody>(dcoeff, dtail, R, "d/dz " + name_);
  }
  std::string describe() const override { return name_; }

 private:
  cplx sum(cplx z) const {
    real r = std::abs(z);
    if (r >= rconv_) fail(ErrorKind::DomainViolation, "series evaluated outside its convergence disc");
    cplx s(0, 0), zn(1, 0);
    constexpr long kMax = 20000;
    for (long n = 0; n < kMax; ++n) {
      s += coeff_(n) * zn;
      zn *= z;
      if (n % 4 == 3) {
        real tb = tail_(n + 1, r);
        if (tb <= 1e-19L * std::max<real>(std::abs(s), 1e-30L)) return round_to_mode(s);
      }
    }
    fail(ErrorKind::PrecisionFailure, "series tail bound not reached for " + name_);
  }
  std::function<cplx(long)> coeff_;
  std::function<real(long, real)> tail_;
  real rconv_;
  std::string name_;
};

// ---------- generic combinations ----------

class LinCombBody final : public MapBody {
 public:
  explicit LinCombBody(std::vector<std::pair<cplx, BodyPtr>> terms) : terms_(std::move(terms)) {}
  P1Value eval_projective(cplx z) const override {
    Scaled s;
    for (const auto& [c, b] : terms_) s = s + b->eval_projective(z).u1 * c;
    return {Scaled::one(), s};
  }
  BodyPtr derivative() const override {
    std::vector<std::pair<cplx, BodyPtr>> d;
    for (const auto& [c, b] : terms_) d.emplace_back(c, b->first_derivative());
    return std::make_shared<LinCombBody>(std::move(d));
  }
  std::string describe() const override {
    std::string s = "lincomb(";
    for (size_t i = 0; i < terms_.size(); ++i) s += (i ? ", " : "") + terms_[i].second->describe();
    return s + ")";
  }

 private:
  std::vector<std::pair<cplx, BodyPtr>> terms_;
};

class ProductBody final : public MapBody {
 public:
  ProductBody(BodyPtr f, BodyPtr g) : f_(std::move(f)), g_(std::move(g)) {}
  P1Value eval_projective(cplx z) const override {
    return {Scaled::one(), f_->eval_projective(z).u1 * g_->eval_projective(z).u1};
  }
  BodyPtr derivative() const override {
    std::vector<std::pair<cplx, BodyPtr>> d;
    d.emplace_back(1, std::make_shared<ProductBody>(f_->first_derivative(), g_));
    d.emplace_back(1, std::make_shared<ProductBody>(f_, g_->first_derivative()));
    return std::make_shared<LinCombBody>(std::move(d));
  }
  std::string describe() const override { return f_->describe() + " * " + g_->describe(); }

 private:
  BodyPtr f_, g_;
};

// k-th derivative of a holomorphic body by the Cauchy integral on a small circle.
class CauchyDerivBody final : public MapBody {
 public:
  CauchyDerivBody(BodyPtr inner, int order, real radius)
      : inner_(std::move(inner)), order_(order), radius_(radius) {}
  P1Value eval_projective(cplx z) const override {
    real rho = std::isinf(radius_) ? 0.5L : 0.25L * (radius_ - std::abs(z));
    constexpr int kN = 48;
    std::vector<Scaled> vals(kN);
    real L = -kInf;
    for (int j = 0; j < kN; ++j) {
      cplx w = std::polar<real>(rho, kTwoPi * j / kN);
      vals[size_t(j)] = inner_->eval_projective(z + w).u1;
      L = std::max(L, vals[size_t(j)].logmag);
    }
    cplx s(0, 0);
    for (int j = 0; j < kN; ++j)
      s += vals[size_t(j)].value_shifted(L) * std::polar<real>(1, -kTwoPi * j * order_ / kN);
    s /= real(kN);
    real logfact = std::lgamma(real(order_ + 1));
    Scaled v = Scaled::from(s);
    if (!v.is_zero()) v.logmag += L + logfact - order_ * std::log(rho);
    return {Scaled::one(), v};
  }
  BodyPtr derivative() const override {
    return std::make_shared<CauchyDerivBody>(inner_, order_ + 1, radius_);
  }
  std::string describe() const override {
    return "d^" + std::to_string(order_) + "/dz^" + std::to_string(order_) + " " + inner_->describe();
  }

 private:
  BodyPtr inner_;
  int order_;
  real radius_;
};

}  // namespace

// ---------- modular lambda ----------

namespace lambda_detail {

cplx cayley(cplx z) { return cplx(0, 1) * (real(1) + z) / (real(1) - z); }

namespace {

struct Reduced {
  cplx tau;
  int m[2][2];  // lambda(tau_in) = (m00 x + m01)/(m10 x + m11), x = lambda(tau)
  Scaled dtau;  // d tau / d tau_in
};

void mat_mul(int (&a)[2][2], const int (&b)[2][2]) {
  int r[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a[i][j] = r[i][j];
}

Reduced reduce(cplx tau) {
  if (!(tau.imag() > 0)) fail(ErrorKind::DomainViolation, "tau not in the upper half plane");
  static const int T[2][2] = {{1, 0}, {1, -1}};
  static const int S[2][2] = {{-1, 1}, {0, 1}};
  Reduced r{tau, {{1, 0}, {0, 1}}, Scaled::one()};
  for (int it = 0; it < 100000; ++it) {
    real n = std::round(r.tau.real());
    if (n != 0) {
      r.tau -= n;
      if (std::fmod(std::fabs(n), real(2)) == 1) mat_mul(r.m, T);
    }
    if (std::norm(r.tau) < 1 - 1e-15L) {
      r.dtau = r.dtau / Scaled::from(r.tau * r.tau);
      r.tau = real(-1) / r.tau;
      mat_mul(r.m, S);
    } else {
      return r;
    }
  }
  fail(ErrorKind::PrecisionFailure, "modular reduction did not terminate");
}

struct Theta {
  cplx t3, t4, s;  // theta3, theta4, sum q^{n(n+1)}
};

Theta theta(cplx tau) {
  cplx q = std::exp(cplx(0, kPi) * tau);
  if (std::abs(q) > 0.999L) fail(ErrorKind::PrecisionFailure, "nome too close to the unit circle");
  Theta th{1, 1, 1};
  for (int n = 1; n < 200; ++n) {
    cplx a = std::exp(cplx(0, kPi) * tau * real(n) * real(n));
    cplx b = std::exp(cplx(0, kPi) * tau * real(n) * real(n + 1));
    th.t3 += real(2) * a;
    th.t4 += (n % 2 ? real(-2) : real(2)) * a;
    th.s += b;
    if (std::abs(a) < 1e-21L && std::abs(b) < 1e-21L) break;
  }
  return th;
}

// (A x + B) with x and 1-x given; A, B in {-1, 0, 1} up to the group structure.
Scaled affine(int A, int B, const Scaled& x, const Scaled& omx) {
  if (A == 0) return Scaled::from(cplx(B, 0));
  if (B == 0) return A > 0 ? x : -x;
  if (A == -B) return A > 0 ? -omx : omx;
  return x * cplx(A, 0) + Scaled::from(cplx(B, 0));
}

struct LambdaEval {
  Reduced red;
  Theta th;
  Scaled x, omx;
};

LambdaEval eval_reduced(cplx tau) {
  LambdaEval e{reduce(tau), {}, {}, {}};
  e.th = theta(e.red.tau);
  cplx ratio = e.th.s / e.th.t3;
  cplx r2 = ratio * ratio;
  e.x = Scaled::exp_of(std::log(real(16)) + cplx(0, kPi) * e.red.tau) * Scaled::from(r2 * r2);
  cplx o = e.th.t4 / e.th.t3;
  cplx o2 = o * o;
  e.omx = Scaled::from(o2 * o2);
  return e;
}

}  // namespace

P1Value lambda_tau(cplx tau) {
  LambdaEval e = eval_reduced(tau);
  const auto& m = e.red.m;
  return {affine(m[1][0], m[1][1], e.x, e.omx), affine(m[0][0], m[0][1], e.x, e.omx)};
}

Scaled lambda_tau_derivative(cplx tau) {
  LambdaEval e = eval_reduced(tau);
  const auto& m = e.red.m;
  Scaled den = affine(m[1][0], m[1][1], e.x, e.omx);
  int det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  cplx t4 = e.th.t4 * e.th.t4;
  Scaled xprime = e.x * (cplx(0, kPi) * t4 * t4);
  return xprime * e.red.dtau * cplx(det, 0) / (den * den);
}

cplx lambda_direct(cplx tau, int terms) {
  cplx t2(0, 0), t3(1, 0);
  for (int n = 0; n < terms; ++n) {
    t2 += std::exp(cplx(0, kPi) * tau * (real(n) + 0.5L) * (real(n) + 0.5L));
    if (n > 0) t3 += real(2) * std::exp(cplx(0, kPi) * tau * real(n) * real(n));
  }
  t2 *= real(2);
  cplx r = t2 / t3;
  return r * r * r * r;
}

namespace {

// lambda(tau) - a as (A' x + B') / (C x + D) with exact handling of a in {0, 1}.
Scaled lambda_minus(cplx tau, const P1Point& a) {
  LambdaEval e = eval_reduced(tau);
  const auto& m = e.red.m;
  Scaled den = affine(m[1][0], m[1][1], e.x, e.omx);
  if (a.infinite) return Scaled::one();
  Scaled num;
  if (a.value == cplx(0, 0)) {
    num = affine(m[0][0], m[0][1], e.x, e.omx);
  } else if (a.value == cplx(1, 0)) {
    int A = m[0][0] - m[1][0], B = m[0][1] - m[1][1];
    num = affine(A, B, e.x, e.omx);
  } else {
    num = affine(m[0][0], m[0][1], e.x, e.omx) - den * a.value;
  }
  return num / den;
}

}  // namespace
}  // namespace lambda_detail

namespace {

class LambdaD1Body;

class LambdaBody final : public MapBody {
 public:
  P1Value eval_projective(cplx z) const override {
    P1Value v = lambda_detail::lambda_tau(lambda_detail::cayley(z));
    return {Scaled::one(), v.u1 / v.u0};
  }
  ProjJet eval_jet(cplx z) const override {
    P1Value v = eval_projective(z);
    return {Scaled::one(), v.u1, Scaled{}, d1(z)};
  }
  Scaled target_value(cplx z, const P1Point& a) const override {
    return lambda_detail::lambda_minus(lambda_detail::cayley(z), a);
  }
  Scaled target_derivative(cplx z, const P1Point& a) const override {
    if (a.infinite) return {};
    return d1(z);
  }
  BodyPtr derivative() const override;
  std::string describe() const override { return "lambda(i(1+z)/(1-z))"; }
  // lambda is a covering of the thrice-punctured sphere.
  bool omits(const P1Point& a) const override {
    return a.infinite || a.value == cplx(0, 0) || a.value == cplx(1, 0);
  }
  bool locally_injective() const override { return true; }

  static Scaled d1(cplx z) {
    cplx w = real(1) - z;
    return lambda_detail::lambda_tau_derivative(lambda_detail::cayley(z)) *
           (cplx(0, 2) / (w * w));
  }
};

class LambdaD1Body final : public MapBody {
 public:
  P1Value eval_projective(cplx z) const override { return {Scaled::one(), LambdaBody::d1(z)}; }
  BodyPtr derivative() const override {
    return std::make_shared<CauchyDerivBody>(std::make_shared<LambdaD1Body>(), 1, real(1));
  }
  std::string describe() const override { return "lambda'"; }
};

BodyPtr LambdaBody::derivative() const { return std::make_shared<LambdaD1Body>(); }

}  // namespace

// ---------- HoloMap ----------

HoloMap::HoloMap(BodyPtr body, Disc disc) : body_(std::move(body)), disc_(disc) {
  if (!body_) fail(ErrorKind::PreconditionViolation, "null map body");
}

void HoloMap::check_domain(cplx z) const {
  if (!(std::abs(z) < disc_.radius))
    fail(ErrorKind::DomainViolation, "point outside the disc of definition");
}

cplx HoloMap::eval(cplx z) const {
  P1Value v = eval_projective(z);
  if (v.is_pole()) fail(ErrorKind::DomainViolation, "evaluation at a pole; use eval_projective");
  return (v.u1 / v.u0).value();
}

Scaled HoloMap::eval_scaled(cplx z) const {
  P1Value v = eval_projective(z);
  if (v.is_pole()) fail(ErrorKind::DomainViolation, "evaluation at a pole; use eval_projective");
  return v.u1 / v.u0;
}

P1Value HoloMap::eval_projective(cplx z) const {
  check_domain(z);
  return body_->eval_projective(z);
}

ProjJet HoloMap::eval_jet(cplx z) const {
  check_domain(z);
  return body_->eval_jet(z);
}

Scaled HoloMap::target_value(cplx z, const P1Point& a) const {
  check_domain(z);
  return body_->target_value(z, a);
}

Scaled HoloMap::target_derivative(cplx z, const P1Point& a) const {
  check_domain(z);
  return body_->target_derivative(z, a);
}

HoloMap HoloMap::derivative(int order) const {
  if (order < 0) fail(ErrorKind::PreconditionViolation, "derivative order must be >= 0");
  BodyPtr b = body_;
  for (int i = 0; i < order; ++i) b = b->first_derivative();
  return HoloMap(b, disc_);
}

HoloMap HoloMap::scaled(cplx c) const {
  if (auto rp = rational_parts()) {
    GaussRational g(rational_from_double(double(c.real())), rational_from_double(double(c.imag())));
    return make_rational(rp->first * g, rp->second, disc_);
  }
  return HoloMap(std::make_shared<LinCombBody>(std::vector<std::pair<cplx, BodyPtr>>{{c, body_}}), disc_);
}

std::optional<std::pair<Poly, Poly>> HoloMap::rational_parts() const {
  if (auto* r = dynamic_cast<const RationalBody*>(body_.get())) return std::make_pair(r->num(), r->den());
  return std::nullopt;
}

HoloMap make_rational(const Poly& num, const Poly& den, Disc disc) {
  return HoloMap(std::make_shared<RationalBody>(num, den), disc);
}

HoloMap make_polynomial(const Poly& p, Disc disc) {
  return make_rational(p, Poly::constant(GaussRational(1)), disc);
}

HoloMap make_exp(cplx scale, cplx rate) { return HoloMap(std::make_shared<ExpBody>(scale, rate), Disc()); }

HoloMap make_series(std::function<cplx(long)> coeff, std::function<real(long, real)> tail,
                    real convergence_radius, Disc disc, std::string name) {
  if (convergence_radius < disc.radius)
    fail(ErrorKind::PreconditionViolation, "series radius of convergence smaller than the disc");
  return HoloMap(std::make_shared<SeriesBody>(std::move(coeff), std::move(tail), convergence_radius,
                                              std::move(name)),
                 disc);
}

HoloMap make_lambda() { return HoloMap(std::make_shared<LambdaBody>(), Disc(1)); }

HoloMap make_linear_combination(const std::vector<std::pair<cplx, HoloMap>>& terms) {
  if (terms.empty()) fail(ErrorKind::PreconditionViolation, "empty linear combination");
  std::vector<std::pair<cplx, BodyPtr>> t;
  Disc d = terms.front().second.disc();
  for (const auto& [c, m] : terms) {
    if (m.has_poles()) fail(ErrorKind::PreconditionViolation, "linear combination of meromorphic maps");
    if (m.disc().radius < d.radius) d = m.disc();
    t.emplace_back(c, m.body_ptr());
  }
  return HoloMap(std::make_shared<LinCombBody>(std::move(t)), d);
}

HoloMap make_product(const HoloMap& f, const HoloMap& g) {
  if (f.has_poles() || g.has_poles()) fail(ErrorKind::PreconditionViolation, "product of meromorphic maps");
  Disc d = f.disc().radius <= g.disc().radius ? f.disc() : g.disc();
  return HoloMap(std::make_shared<ProductBody>(f.body_ptr(), g.body_ptr()), d);
}

}  // namespace nevlab
