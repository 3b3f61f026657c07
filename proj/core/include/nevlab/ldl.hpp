#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "nevlab/funcrep.hpp"
#include "nevlab/nevan.hpp"
#include "nevlab/table.hpp"

namespace nevlab {

// circavg log+ |f^(k) / f| on |z| = r.
real logderiv_proximity(const HoloMap& f, real r, int k);

struct GammaPolicy {
  enum class Kind { GrowthIndex, InverseDistance, Custom };
  Kind kind = Kind::GrowthIndex;
  real eps = 0.1L;                  // exp((c + eps) T)
  std::function<real(real)> gamma;  // Custom
  static GammaPolicy growth(real eps = 0.1L) { return {Kind::GrowthIndex, eps, {}}; }
  // 1 / (R - r); needs a finite disc.
  static GammaPolicy inverse_distance() { return {Kind::InverseDistance, 0.1L, {}}; }
  static GammaPolicy custom(std::function<real(real)> g) { return {Kind::Custom, 0.1L, std::move(g)}; }
};

struct LdlRow {
  real r = 0, T = 0, log_gamma = 0;
  real lhs = 0;
  real rhs_raw = 0;  // (1+delta) k log gamma + delta k log+ r
  real rhs = 0;      // rhs_raw + C0 + C_log (log+ T + log+ log gamma + log+ log+ r)
  bool exceptional = false;
};

struct LdlReport {
  RadialGrid grid;
  std::vector<LdlRow> rows;
  real c = 0, C0 = 0, C_log = 0;
  real weighted_measure = 0;  // sum of gamma(r_i) dr_i over flagged radii
  int flagged = 0;
};

LdlReport ldl_residual(const HoloMap& f, const RadialGrid& grid, int k, real delta,
                       const GammaPolicy& policy = GammaPolicy::growth());

}  // namespace nevlab
