#pragma once

#include <optional>
#include <vector>

#include "nevlab/funcrep.hpp"
#include "nevlab/quad.hpp"
#include "nevlab/table.hpp"
#include "nevlab/zeros.hpp"

namespace nevlab {

// Panel count floor for circle averages at radius r: features of a map on Delta(R)
// have angular width about (1 - r/R); entire maps get about 4 panels per unit radius.
QuadOptions circle_options(const Disc& d, real r);

struct CharacteristicValue {
  real T = 0;
  real T_area = kNaN;
};

// Cartan value for P1, height integral otherwise; T_area is the area-form cross-check.
CharacteristicValue characteristic(const HoloMap& f, const TargetGeometry& g, real r, bool cross_check = true);
real proximity(const HoloMap& f, const TargetGeometry& g, real r, const P1Point& a);
// m + N - T. When f(0) = a the counting function carries the usual n(0, a) log r term.
real fmt_residual(const HoloMap& f, const TargetGeometry& g, real r, const P1Point& a);

// Pullback density of the target form, coefficient of (i/2pi) dz ^ dzbar.
real pullback_density(const HoloMap& f, const TargetGeometry& g, cplx z);

// Preimages of a target point up to a radius, reused across a grid.
class PreimageSet {
 public:
  PreimageSet() = default;
  PreimageSet(const HoloMap& f, const TargetGeometry& g, const P1Point& a, real rmax, bool allow_origin = false);
  // Zeros of a holomorphic function on Delta(R).
  PreimageSet(const AnalyticFn& h, real rmax, real R, bool allow_origin = false);
  // N(r, a), including n(0, a) log r when the origin is a preimage.
  real counting(real r, std::optional<int> truncation = {}) const;
  std::vector<real> hints(real r) const;
  int origin_multiplicity() const { return origin_mult_; }
  const std::vector<ZeroRecord>& zeros() const { return zeros_; }

 private:
  std::vector<ZeroRecord> zeros_;
  int origin_mult_ = 0;
};

// Proximity using precomputed preimages for hints.
real proximity_with(const HoloMap& f, const TargetGeometry& g, real r, const P1Point& a, const PreimageSet& pre);

struct CharacteristicTable {
  std::vector<real> T;
  std::vector<real> T_area;  // NaN when the cross-check was skipped
  real max_drift = 0;
};
CharacteristicTable characteristic_table(const HoloMap& f, const TargetGeometry& g, const RadialGrid& grid,
                                         bool cross_check = true);

struct GrowthIndexEstimate {
  real c_est = 0;
  real kappa = kNaN;
  size_t window_begin = 0, window_end = 0;
  real rms = kNaN;
  bool bounded = false;
  bool definitional = false;  // R = infinity
};

GrowthIndexEstimate growth_index(const HoloMap& f, const TargetGeometry& g, const RadialGrid& grid,
                                 size_t window = 12);
GrowthIndexEstimate growth_index_from_values(const RadialGrid& grid, const std::vector<real>& T,
                                             size_t window = 12);

struct DefectEstimate {
  real value = 0;  // min over the trailing window of m/T clamped to [0, 1]
  real last = 0;
};
DefectEstimate defect_from_values(const std::vector<real>& m, const std::vector<real>& T, size_t window = 12);
DefectEstimate defect_estimate(const HoloMap& f, const TargetGeometry& g, const P1Point& a, const RadialGrid& grid,
                               size_t window = 12);

// Torus targets are given as finite points of C (the lift's coordinate).
NevanlinnaTable smt_riemann_report(const HoloMap& f, const TargetGeometry& g, const std::vector<P1Point>& targets,
                                   const RadialGrid& grid, real eps = 0.1L, std::optional<real> c = {});

std::string target_label(const P1Point& a);

}  // namespace nevlab
