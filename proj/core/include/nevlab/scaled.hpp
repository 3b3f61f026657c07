#pragma once

#include <cmath>

#include "nevlab/types.hpp"

namespace nevlab {

// Complex number stored as unit phase times exp(logmag). Never overflows.
struct Scaled {
  cplx phase{0, 0};
  real logmag = -kInf;

  static Scaled from(cplx z) {
    real a = std::abs(z);
    if (a == 0 || !std::isfinite(a)) {
      if (a == 0) return {};
      fail(ErrorKind::PrecisionFailure, "non-finite value in Scaled::from");
    }
    return {z / a, std::log(a)};
  }
  // exp(w) for complex w.
  static Scaled exp_of(cplx w) { return {std::polar<real>(1, w.imag()), w.real()}; }
  static Scaled one() { return {cplx(1, 0), 0}; }

  bool is_zero() const { return phase == cplx(0, 0); }
  real log_abs() const { return logmag; }
  cplx value() const { return is_zero() ? cplx(0, 0) : phase * std::exp(logmag); }
  // value * exp(-shift), for combining terms against a common scale.
  cplx value_shifted(real shift) const {
    return is_zero() ? cplx(0, 0) : phase * std::exp(logmag - shift);
  }

  Scaled operator*(const Scaled& o) const {
    if (is_zero() || o.is_zero()) return {};
    return {phase * o.phase, logmag + o.logmag};
  }
  Scaled operator/(const Scaled& o) const {
    if (o.is_zero()) fail(ErrorKind::PrecisionFailure, "Scaled division by zero");
    if (is_zero()) return {};
    return {phase / o.phase, logmag - o.logmag};
  }
  Scaled operator*(cplx c) const { return *this * from(c); }
  Scaled operator-() const { return {-phase, logmag}; }

  friend Scaled operator+(const Scaled& a, const Scaled& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    real L = std::max(a.logmag, b.logmag);
    cplx s = a.value_shifted(L) + b.value_shifted(L);
    Scaled r = from(s);
    if (!r.is_zero()) r.logmag += L;
    return r;
  }
  friend Scaled operator-(const Scaled& a, const Scaled& b) { return a + (-b); }
};

// A point of P^1: either infinity or a finite complex value.
struct P1Point {
  bool infinite = false;
  cplx value{0, 0};
  static P1Point inf() { return {true, {0, 0}}; }
  static P1Point at(cplx a) { return {false, a}; }
};

// Homogeneous pair [u0 : u1] representing the value u1/u0.
struct P1Value {
  Scaled u0 = Scaled::one();
  Scaled u1;

  real log_norm() const {
    real L = std::max(u0.logmag, u1.logmag);
    real a = u0.is_zero() ? 0 : std::exp(2 * (u0.logmag - L));
    real b = u1.is_zero() ? 0 : std::exp(2 * (u1.logmag - L));
    return L + std::log(a + b) / 2;
  }

  // u1 - a*u0 (or u0 for a = infinity): the holomorphic function whose zeros are f^{-1}(a).
  Scaled target_numerator(const P1Point& a) const {
    if (a.infinite) return u0;
    if (a.value == cplx(0, 0)) return u1;
    return u1 - u0 * a.value;
  }

  // log of the chordal distance to a, in (-inf, 0].
  real log_chordal(const P1Point& a) const {
    Scaled num = target_numerator(a);
    if (num.is_zero()) return -kInf;
    real v = num.logmag - log_norm();
    if (!a.infinite) v -= std::log1p(std::norm(a.value)) / 2;
    return std::min<real>(v, 0);
  }

  bool is_pole() const { return u0.is_zero(); }
  cplx value() const {
    if (u0.is_zero()) return {kInf, 0};
    return (u1 / u0).value();
  }
};

}  // namespace nevlab
