#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

#include "nevlab/types.hpp"

namespace nevlab {

using Rational = boost::multiprecision::cpp_rational;

real to_real(const Rational& q);
// Exact binary expansion of a finite double.
Rational rational_from_double(double x);
// Parses "3", "-0.25", "1/3", "2.5e-3".
Rational parse_rational(const std::string& s);

struct GaussRational {
  Rational re, im;

  GaussRational() = default;
  GaussRational(Rational r) : re(std::move(r)) {}
  GaussRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  GaussRational(int r) : re(r) {}

  bool is_zero() const { return re == 0 && im == 0; }
  cplx to_cplx() const { return {to_real(re), to_real(im)}; }
  GaussRational conj() const { return {re, -im}; }
  Rational norm() const { return re * re + im * im; }

  GaussRational operator+(const GaussRational& o) const { return {re + o.re, im + o.im}; }
  GaussRational operator-(const GaussRational& o) const { return {re - o.re, im - o.im}; }
  GaussRational operator-() const { return {-re, -im}; }
  GaussRational operator*(const GaussRational& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  GaussRational operator/(const GaussRational& o) const;
  GaussRational& operator+=(const GaussRational& o) { return *this = *this + o; }
  GaussRational& operator-=(const GaussRational& o) { return *this = *this - o; }
  bool operator==(const GaussRational& o) const { return re == o.re && im == o.im; }
};

// Parses "a+bi", "2i", "-0.5-1.5i", "1/3".
GaussRational parse_gauss(const std::string& s);
std::string to_string(const GaussRational& g);

// Dense polynomial over Q(i), ascending coefficients, no trailing zeros.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<GaussRational> c);
  static Poly constant(const GaussRational& c) { return Poly({c}); }
  static Poly monomial(int degree, const GaussRational& c = GaussRational(1));
  static Poly from_roots(const std::vector<GaussRational>& roots);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<GaussRational>& coeffs() const { return c_; }
  GaussRational coeff(int i) const;
  GaussRational leading() const { return c_.back(); }

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator*(const GaussRational& s) const;
  bool operator==(const Poly& o) const { return c_ == o.c_; }
  // Quotient and remainder; divisor must be nonzero.
  void divmod(const Poly& d, Poly& q, Poly& r) const;
  Poly derivative() const;
  Poly monic() const;
  GaussRational eval(const GaussRational& z) const;
  std::vector<cplx> to_cplx() const;
  std::string to_string() const;

 private:
  void trim();
  std::vector<GaussRational> c_;
};

Poly gcd(Poly a, Poly b);

// Horner evaluation of a floating coefficient list.
inline cplx horner(const std::vector<cplx>& c, cplx z) {
  cplx s(0, 0);
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * z + *it;
  return s;
}

}  // namespace nevlab
