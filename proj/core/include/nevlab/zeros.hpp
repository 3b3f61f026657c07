#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "nevlab/exact.hpp"
#include "nevlab/funcrep.hpp"

namespace nevlab {

// Holomorphic function with derivative, values in scaled form.
struct AnalyticFn {
  std::function<Scaled(cplx)> value;
  std::function<Scaled(cplx)> deriv;  // may be empty
};

AnalyticFn target_function(const HoloMap& f, const P1Point& a);
AnalyticFn poly_function(const Poly& p);
// Wronskian u0 u1' - u1 u0' of the reduced representation.
AnalyticFn wronskian_function(const HoloMap& f);

struct ZeroRecord {
  cplx location;
  int multiplicity = 1;
  real certified_radius = 0;
  bool degraded = false;
};

struct ZeroOptions {
  int m_max = 4;
  real min_box_fraction = 1e-9L;
};

// Winding number of h around the circle |z - center| = t.
int winding_on_circle(const AnalyticFn& h, cplx center, real t);
int winding_count(const HoloMap& f, real t, const P1Point& a);

std::vector<ZeroRecord> locate_zeros(const AnalyticFn& h, real t, const ZeroOptions& opt = {});
std::vector<ZeroRecord> locate_zeros(const HoloMap& f, real t, const P1Point& a, const ZeroOptions& opt = {});

// Runs fn(t'), perturbing t multiplicatively by 1e-6 steps on zero-on-circle (at most 5 attempts).
template <class F>
auto with_circle_retry(real t, F&& fn) -> decltype(fn(t)) {
  const real factors[5] = {1, 1 + 1e-6L, 1 - 1e-6L, 1 + 2e-6L, 1 - 2e-6L};
  for (int i = 0; i < 5; ++i) {
    try {
      return fn(t * factors[i]);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ZeroOnCircle || i == 4) throw;
    }
  }
  fail(ErrorKind::ZeroOnCircle, "retry policy exhausted");
}

// sum over |z_j| < r of min(m_j, truncation) log(r/|z_j|).
real counting_from_zeros(const std::vector<ZeroRecord>& zeros, real r, std::optional<int> truncation = {});

real counting_function(const HoloMap& f, real r, const P1Point& a, std::optional<int> truncation = {});
real ramification_counting(const HoloMap& f, real r);

// Search radius used when zeros up to r are needed: slightly beyond r, inside the disc.
real search_radius(real r, real R);

}  // namespace nevlab
