#pragma once

#include <functional>
#include <vector>

#include "nevlab/types.hpp"

namespace nevlab {

inline constexpr real kTolSmooth = 1e-8L;
inline constexpr real kTolSingular = 1e-5L;

struct QuadOptions {
  int min_panels = 16;
  int max_depth = 24;
  long max_evaluations = 20'000'000;
};

struct CircleIntegrand {
  std::function<real(real)> g;  // theta -> value
  std::vector<real> hints;      // angles of possible logarithmic singularities
};

// Adaptive Gauss-Kronrod 7/15 over [a, b], pre-split at breakpoints.
real integrate(const std::function<real(real)>& f, real a, real b, real tol,
               const std::vector<real>& breakpoints = {}, const QuadOptions& opt = {});

// (1/2pi) * integral over [0, 2pi].
real circle_average(const CircleIntegrand& g, real tol, const QuadOptions& opt = {});

// Angles of points z with |z| in [0.98 r, 1.02 r].
std::vector<real> hint_angles(const std::vector<cplx>& points, real r);

// T(r) = int_0^r dt/t int_{|z|<t} density, via the equivalent single integral
// int_0^r 2 s log(r/s) A(s) ds with A(s) the circle average of the density.
using Density = std::function<real(cplx)>;
real height_double_integral(const Density& density, real r, real tol, const QuadOptions& inner = {});
// Same quantity on an increasing list of radii, accumulated panel by panel.
std::vector<real> height_integral_grid(const Density& density, const std::vector<real>& radii, real tol,
                                       const std::function<QuadOptions(real)>& inner = {});

// int_0^r mass(t)/t dt - (1/2)(circavg(g, r) - g(0)).
real green_jensen_residual(const std::function<real(cplx)>& g, const std::function<real(real)>& mass, real r,
                           real tol = kTolSmooth, const std::vector<real>& mass_breakpoints = {});

struct RadialGrid {
  enum class Policy { GeometricR, GeometricOneMinusR, Explicit };
  std::vector<real> radii;
  std::vector<real> weights;  // trapezoid weights
  Policy policy = Policy::Explicit;
  real R = kInf;

  static RadialGrid geometric(real r0, real r1, int n);
  // radii R(1 - d) with d geometric from d0 down to d1.
  static RadialGrid boundary(real R, real d0, real d1, int n);
  static RadialGrid from_radii(std::vector<real> radii, real R = kInf);
  // Standard grids: 48 points over [1, 50] for the plane, (1 - r) in [0.5, 0.0005] for the unit disc.
  static RadialGrid standard(real R);
  size_t size() const { return radii.size(); }
  RadialGrid sub(real rmin, real rmax) const;
};

struct CalculusLemmaResult {
  std::vector<real> derivative;  // h' (or (1/r)(r h')') on the grid; NaN where not evaluated
  std::vector<bool> flagged;
  std::vector<real> flagged_radii;
  real weighted_measure = 0;
};

// Flags radii where h' > h^{1+delta} gamma, or in second-order form where
// (1/r)(r h')' > r^delta gamma^{2+delta} h^{(1+delta)^2}. Endpoints are excluded.
CalculusLemmaResult calculus_lemma_check(const std::function<real(real)>& h,
                                         const std::function<real(real)>& gamma, real delta,
                                         const RadialGrid& grid, bool second_order = false);

// Three-point derivative on a nonuniform grid (interior points only; ends are one-sided).
std::vector<real> grid_derivative(const std::vector<real>& x, const std::vector<real>& y);

}  // namespace nevlab
