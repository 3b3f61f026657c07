#include "nevlab/exact.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace nevlab {

real to_real(const Rational& q) {
  using boost::multiprecision::cpp_int;
  const cpp_int& n = numerator(q);
  const cpp_int& d = denominator(q);
  if (n == 0) return 0;
  // Scale so the quotient keeps full long double precision.
  long nb = static_cast<long>(msb(abs(n)));
  long db = static_cast<long>(msb(d));
  long shift = 80 - (nb - db);
  cpp_int num = abs(n);
  cpp_int den = d;
  if (shift > 0) num <<= shift; else den <<= -shift;
  cpp_int quo = num / den;
  real v = std::ldexp(quo.convert_to<real>(), static_cast<int>(-shift));
  return n < 0 ? -v : v;
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) fail(ErrorKind::PreconditionViolation, "non-finite double");
  int e = 0;
  double m = std::frexp(x, &e);
  auto mi = static_cast<long long>(std::ldexp(m, 53));
  e -= 53;
  Rational r(mi);
  using boost::multiprecision::cpp_int;
  if (e >= 0) return r * Rational(cpp_int(1) << e);
  return r / Rational(cpp_int(1) << -e);
}

Rational parse_rational(const std::string& raw) {
  std::string s;
  for (char ch : raw)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) fail(ErrorKind::ConfigParse, "empty number");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Rational a = parse_rational(s.substr(0, slash));
    Rational b = parse_rational(s.substr(slash + 1));
    if (b == 0) fail(ErrorKind::ConfigParse, "zero denominator in " + raw);
    return a / b;
  }
  size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
  using boost::multiprecision::cpp_int;
  cpp_int mant = 0;
  long exp10 = 0;
  bool digits = false, dot = false;
  for (; i < s.size(); ++i) {
    char ch = s[i];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      mant = mant * 10 + (ch - '0');
      if (dot) --exp10;
      digits = true;
    } else if (ch == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  if (!digits) fail(ErrorKind::ConfigParse, "bad number: " + raw);
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') fail(ErrorKind::ConfigParse, "bad number: " + raw);
    std::string rest = s.substr(i + 1);
    size_t used = 0;
    long e = 0;
    try {
      e = std::stol(rest, &used);
    } catch (...) {
      fail(ErrorKind::ConfigParse, "bad exponent: " + raw);
    }
    if (used != rest.size()) fail(ErrorKind::ConfigParse, "bad number: " + raw);
    exp10 += e;
  }
  if (exp10 > 4000 || exp10 < -4000) fail(ErrorKind::ConfigParse, "exponent out of range: " + raw);
  Rational r(mant);
  cpp_int p = 1;
  for (long k = 0; k < std::labs(exp10); ++k) p *= 10;
  r = exp10 >= 0 ? r * Rational(p) : r / Rational(p);
  return neg ? Rational(-r) : r;
}

GaussRational GaussRational::operator/(const GaussRational& o) const {
  Rational n = o.norm();
  if (n == 0) fail(ErrorKind::PreconditionViolation, "division by zero in Q(i)");
  GaussRational p = *this * o.conj();
  return {p.re / n, p.im / n};
}

GaussRational parse_gauss(const std::string& raw) {
  std::string s;
  for (char ch : raw)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) fail(ErrorKind::ConfigParse, "empty complex number");
  if (s.back() != 'i') return GaussRational(parse_rational(s));
  std::string body = s.substr(0, s.size() - 1);
  // Find the sign that splits real and imaginary parts (not an exponent sign).
  size_t split = std::string::npos;
  for (size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_of = [&](const std::string& t) {
    if (t.empty() || t == "+") return Rational(1);
    if (t == "-") return Rational(-1);
    return parse_rational(t);
  };
  if (split == std::string::npos) return {Rational(0), imag_of(body)};
  return {parse_rational(body.substr(0, split)), imag_of(body.substr(split))};
}

std::string to_string(const GaussRational& g) {
  std::ostringstream os;
  os << g.re;
  if (g.im != 0) os << (g.im > 0 ? "+" : "") << g.im << "i";
  return os.str();
}

Poly::Poly(std::vector<GaussRational> c) : c_(std::move(c)) { trim(); }

Poly Poly::monomial(int degree, const GaussRational& c) {
  std::vector<GaussRational> v(static_cast<size_t>(degree) + 1);
  v.back() = c;
  return Poly(std::move(v));
}

Poly Poly::from_roots(const std::vector<GaussRational>& roots) {
  Poly p = constant(GaussRational(1));
  for (const auto& r : roots) p = p * Poly({-r, GaussRational(1)});
  return p;
}

void Poly::trim() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

GaussRational Poly::coeff(int i) const {
  if (i < 0 || i >= static_cast<int>(c_.size())) return {};
  return c_[static_cast<size_t>(i)];
}

Poly Poly::operator+(const Poly& o) const {
  std::vector<GaussRational> r(std::max(c_.size(), o.c_.size()));
  for (size_t i = 0; i < r.size(); ++i) r[i] = coeff(int(i)) + o.coeff(int(i));
  return Poly(std::move(r));
}

Poly Poly::operator-(const Poly& o) const {
  std::vector<GaussRational> r(std::max(c_.size(), o.c_.size()));
  for (size_t i = 0; i < r.size(); ++i) r[i] = coeff(int(i)) - o.coeff(int(i));
  return Poly(std::move(r));
}

Poly Poly::operator*(const Poly& o) const {
  if (is_zero() || o.is_zero()) return {};
  std::vector<GaussRational> r(c_.size() + o.c_.size() - 1);
  for (size_t i = 0; i < c_.size(); ++i)
    for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  return Poly(std::move(r));
}

Poly Poly::operator*(const GaussRational& s) const {
  std::vector<GaussRational> r = c_;
  for (auto& x : r) x = x * s;
  return Poly(std::move(r));
}

void Poly::divmod(const Poly& d, Poly& q, Poly& r) const {
  if (d.is_zero()) fail(ErrorKind::PreconditionViolation, "polynomial division by zero");
  std::vector<GaussRational> rem = c_;
  int dd = d.degree();
  std::vector<GaussRational> quo(std::max(0, degree() - dd + 1));
  GaussRational lead = d.leading();
  for (int i = degree(); i >= dd; --i) {
    GaussRational f = rem[size_t(i)] / lead;
    quo[size_t(i - dd)] = f;
    if (f.is_zero()) continue;
    for (int j = 0; j <= dd; ++j) rem[size_t(i - dd + j)] -= f * d.c_[size_t(j)];
  }
  q = Poly(std::move(quo));
  rem.resize(std::min(rem.size(), size_t(std::max(dd, 0))));
  r = Poly(std::move(rem));
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<GaussRational> r(c_.size() - 1);
  for (size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * GaussRational(Rational(long(i)));
  return Poly(std::move(r));
}

Poly Poly::monic() const {
  if (is_zero()) return {};
  return *this * (GaussRational(1) / leading());
}

GaussRational Poly::eval(const GaussRational& z) const {
  GaussRational s;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * z + *it;
  return s;
}

std::vector<cplx> Poly::to_cplx() const {
  std::vector<cplx> v;
  v.reserve(c_.size());
  for (const auto& c : c_) v.push_back(c.to_cplx());
  return v;
}

std::string Poly::to_string() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i].is_zero()) continue;
    if (!first) os << " + ";
    first = false;
    os << "(" << nevlab::to_string(c_[i]) << ")";
    if (i > 0) os << "z^" << i;
  }
  return os.str();
}

Poly gcd(Poly a, Poly b) {
  while (!b.is_zero()) {
    Poly q, r;
    a.divmod(b, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

}  // namespace nevlab
