#include "nevlab/ldl.hpp"

#include <algorithm>
#include <cmath>

namespace nevlab {

namespace {

std::vector<real> zero_pole_hints(const HoloMap& f, real r) {
  auto g = TargetGeometry::p1();
  std::vector<real> h;
  for (const P1Point& a : {P1Point::at(0), P1Point::inf()}) {
    if (f.omits(a)) continue;
    if (a.infinite && !f.has_poles()) continue;
    PreimageSet pre(f, g, a, r, true);
    auto more = pre.hints(r);
    h.insert(h.end(), more.begin(), more.end());
  }
  std::sort(h.begin(), h.end());
  return h;
}

}  // namespace

real logderiv_proximity(const HoloMap& f, real r, int k) {
  if (k < 1) fail(ErrorKind::PreconditionViolation, "order must be at least 1");
  if (!(r > 0 && r < f.disc().radius)) fail(ErrorKind::DomainViolation, "radius outside the disc");
  HoloMap fk = f.derivative(k);
  auto hints = zero_pole_hints(f, r);
  CircleIntegrand ci{[&](real th) {
                       cplx z = std::polar(r, th);
                       Scaled num = fk.eval_scaled(z), den = f.eval_scaled(z);
                       if (den.is_zero()) return kInf;
                       if (num.is_zero()) return real(0);
                       return std::max<real>(0, num.logmag - den.logmag);
                     },
                     hints};
  real v = circle_average(ci, hints.empty() ? kTolSmooth : kTolSingular, circle_options(f.disc(), r));
  if (!std::isfinite(v)) fail(ErrorKind::SingularAverage, "f vanishes on the circle");
  return v;
}

LdlReport ldl_residual(const HoloMap& f, const RadialGrid& grid, int k, real delta, const GammaPolicy& policy) {
  if (!(delta > 0 && delta < 1)) fail(ErrorKind::PreconditionViolation, "delta must lie in (0, 1)");
  if (k < 1) fail(ErrorKind::PreconditionViolation, "order must be at least 1");
  if (grid.size() < 3) fail(ErrorKind::GridTooCoarse, "report needs at least three radii");
  const Disc& disc = f.disc();
  LdlReport rep;
  rep.grid = grid;
  const size_t N = grid.size();
  auto ct = characteristic_table(f, TargetGeometry::p1(), grid, true);

  std::vector<real> log_gamma(N);
  switch (policy.kind) {
    case GammaPolicy::Kind::GrowthIndex: {
      real c = 0;
      if (!disc.is_plane()) {
        try {
          c = growth_index_from_values(grid, ct.T).c_est;
        } catch (const Error& e) {
          fail(ErrorKind::MissingC, std::string("growth index unavailable: ") + e.what());
        }
      }
      if (!std::isfinite(c))
        fail(ErrorKind::MissingC, "growth index is infinite; exp((c + eps) T) is not admissible, supply gamma");
      rep.c = c;
      for (size_t i = 0; i < N; ++i) log_gamma[i] = (c + policy.eps) * ct.T[i];
      break;
    }
    case GammaPolicy::Kind::InverseDistance:
      if (disc.is_plane()) fail(ErrorKind::PreconditionViolation, "1/(R - r) needs a finite disc");
      rep.c = kNaN;
      for (size_t i = 0; i < N; ++i) log_gamma[i] = -std::log(disc.radius - grid.radii[i]);
      break;
    case GammaPolicy::Kind::Custom:
      if (!policy.gamma) fail(ErrorKind::PreconditionViolation, "custom gamma missing");
      rep.c = kNaN;
      for (size_t i = 0; i < N; ++i) {
        real gv = policy.gamma(grid.radii[i]);
        if (!(gv > 0)) fail(ErrorKind::PreconditionViolation, "gamma must be positive");
        log_gamma[i] = std::log(gv);
      }
      break;
  }

  rep.rows.resize(N);
  parallel_for(N, [&](size_t i) { rep.rows[i].lhs = logderiv_proximity(f, grid.radii[i], k); });
  std::vector<real> D(N), X(N);
  for (size_t i = 0; i < N; ++i) {
    LdlRow& row = rep.rows[i];
    row.r = grid.radii[i];
    row.T = ct.T[i];
    row.log_gamma = log_gamma[i];
    row.rhs_raw = (1 + delta) * k * log_gamma[i] + delta * k * log_plus(row.r);
    D[i] = row.lhs - row.rhs_raw;
    X[i] = log_plus(row.T) + log_plus(log_gamma[i]) + log_plus(log_plus(row.r));
  }
  SlackFit sf = fit_slack_on(D, X);
  rep.C0 = sf.C0;
  rep.C_log = sf.C_log;
  for (size_t i = 0; i < N; ++i) {
    LdlRow& row = rep.rows[i];
    row.rhs = row.rhs_raw + sf.C0 + sf.C_log * X[i];
    row.exceptional = sf.slack[i] < 0;
    if (row.exceptional) {
      ++rep.flagged;
      real w = i < grid.weights.size() ? grid.weights[i] : real(0);
      rep.weighted_measure += std::exp(log_gamma[i]) * w;
    }
  }
  return rep;
}

}  // namespace nevlab
