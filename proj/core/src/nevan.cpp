#include "nevlab/nevan.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nevlab {

namespace {

constexpr real kDriftTolerance = 0.05L;
// Area cross-checks on the unit disc stop at 1 - r/R = 0.01; beyond that the ring
// averages need too many panels to be affordable on every grid point.
constexpr real kCrossCheckBoundaryGap = 0.01L;
constexpr real kCrossCheckTol = 1e-5L;

real origin_threshold(real t) { return 1e-12L * std::max<real>(1, t); }

void require_radius(const HoloMap& f, real r) {
  if (!(r > 0 && r < f.disc().radius)) fail(ErrorKind::DomainViolation, "radius outside the disc");
}

// Affine lift w = alpha z + beta of a torus map.
std::pair<cplx, cplx> affine_lift(const HoloMap& f) {
  auto rp = f.rational_parts();
  if (!rp || rp->second.degree() != 0 || rp->first.degree() > 1)
    fail(ErrorKind::PreconditionViolation, "torus targets need an affine lift");
  auto num = rp->first.to_cplx();
  cplx d = rp->second.to_cplx()[0];
  cplx beta = num.empty() ? cplx(0) : num[0] / d;
  cplx alpha = num.size() > 1 ? num[1] / d : cplx(0);
  if (alpha == cplx(0)) fail(ErrorKind::DegenerateCurve, "constant map");
  return {alpha, beta};
}

// Preimages z of a + lattice under the affine lift, |z| < rmax.
std::vector<ZeroRecord> torus_preimages(const HoloMap& f, const TargetGeometry& g, cplx a, real rmax) {
  auto [alpha, beta] = affine_lift(f);
  std::vector<ZeroRecord> out;
  // Lattice points w with |w - (a - beta)| < |alpha| rmax.
  cplx c = a - beta;
  real wmax = std::abs(alpha) * rmax;
  real h = g.cell_area / std::abs(g.omega1);  // height of the cell over omega1
  long nmax = static_cast<long>(std::ceil(wmax / h)) + 1;
  for (long n = -nmax; n <= nmax; ++n) {
    cplx base = c + real(n) * g.omega2;
    // m range: |base + m omega1| < wmax.
    real t = -(std::conj(g.omega1) * base).real() / std::norm(g.omega1);
    real span = wmax / std::abs(g.omega1) + 1;
    long m0 = static_cast<long>(std::floor(t - span)), m1 = static_cast<long>(std::ceil(t + span));
    for (long m = m0; m <= m1; ++m) {
      cplx w = base + real(m) * g.omega1;
      if (std::abs(w) < wmax) out.push_back({w / alpha, 1, 0, false});
    }
  }
  std::sort(out.begin(), out.end(), [](const ZeroRecord& x, const ZeroRecord& y) {
    real ax = std::abs(x.location), ay = std::abs(y.location);
    if (ax != ay) return ax < ay;
    return std::arg(x.location) < std::arg(y.location);
  });
  return out;
}

void split_origin(std::vector<ZeroRecord>& zs, int& origin, real t, bool allow) {
  std::vector<ZeroRecord> rest;
  for (const auto& z : zs) {
    if (std::abs(z.location) <= origin_threshold(t))
      origin += z.multiplicity;
    else
      rest.push_back(z);
  }
  if (origin > 0 && !allow) fail(ErrorKind::OriginHitsTarget, "f(0) equals the target");
  zs = std::move(rest);
}

std::vector<real> preimage_hints(const std::vector<ZeroRecord>& zs, real r) {
  std::vector<cplx> pts;
  for (const auto& z : zs) pts.push_back(z.location);
  return hint_angles(pts, r);
}

real p1_proximity(const HoloMap& f, real r, const P1Point& a, std::vector<real> hints) {
  // The numerator comes from target_value, which avoids cancellation in u1 - a u0 near a.
  real shift = a.infinite ? real(0) : std::log1p(std::norm(a.value)) / 2;
  auto integrand = [&](real t) {
    cplx z = std::polar(r, t);
    Scaled num = f.target_value(z, a);
    if (num.is_zero()) return kInf;
    return std::max<real>(0, f.eval_projective(z).log_norm() + shift - num.logmag);
  };
  CircleIntegrand ci{integrand, std::move(hints)};
  real tol = ci.hints.empty() ? kTolSmooth : kTolSingular;
  real v = circle_average(ci, tol, circle_options(f.disc(), r));
  if (!std::isfinite(v)) fail(ErrorKind::SingularAverage, "f hits the target on the circle");
  return v;
}

real torus_proximity(const HoloMap& f, const TargetGeometry& g, real r, cplx a, std::vector<real> hints) {
  CircleIntegrand ci{[&](real t) { return torus_green(g, f.eval(std::polar(r, t)) - a); }, std::move(hints)};
  real tol = ci.hints.empty() ? kTolSmooth : kTolSingular;
  real v = circle_average(ci, tol, circle_options(f.disc(), r));
  if (!std::isfinite(v)) fail(ErrorKind::SingularAverage, "f hits the target on the circle");
  return v;
}

real cartan_value(const HoloMap& f, real r) {
  real at0 = f.eval_projective(0).log_norm();
  CircleIntegrand ci{[&](real t) { return f.eval_projective(std::polar(r, t)).log_norm(); }, {}};
  return circle_average(ci, kTolSmooth, circle_options(f.disc(), r)) - at0;
}

// The Poincare source density is a closed form independent of the map's fine structure.
QuadOptions density_options(const HoloMap& f, const TargetGeometry& g, real r) {
  if (g.kind == TargetGeometry::Kind::PoincarePullback) return {};
  return circle_options(f.disc(), r);
}

bool cross_check_allowed(const Disc& d, real r) {
  return d.is_plane() || 1 - r / d.radius >= kCrossCheckBoundaryGap;
}

}  // namespace

QuadOptions circle_options(const Disc& d, real r) {
  QuadOptions o;
  real want = d.is_plane() ? 4 * r : 8 / (1 - r / d.radius);
  o.min_panels = static_cast<int>(std::clamp<real>(std::ceil(want), 16, 40000));
  return o;
}

real pullback_density(const HoloMap& f, const TargetGeometry& g, cplx z) {
  switch (g.kind) {
    case TargetGeometry::Kind::P1FubiniStudy: {
      ProjJet j = f.eval_jet(z);
      Scaled w = j.wronskian();
      if (w.is_zero()) return 0;
      real ln = P1Value{j.u0, j.u1}.log_norm();
      return std::exp(2 * w.logmag - 4 * ln);
    }
    case TargetGeometry::Kind::TorusFlat: {
      Scaled d = f.derivative(1).eval_scaled(z);
      return d.is_zero() ? 0 : kPi / g.cell_area * std::exp(2 * d.logmag);
    }
    case TargetGeometry::Kind::PoincarePullback:
      return g.source_density(z);
    default:
      fail(ErrorKind::PreconditionViolation, "use the projcurve module for Pn targets");
  }
}

CharacteristicValue characteristic(const HoloMap& f, const TargetGeometry& g, real r, bool cross_check) {
  require_radius(f, r);
  CharacteristicValue v;
  auto density = [&](cplx z) { return pullback_density(f, g, z); };
  auto inner = [&](real s) { return density_options(f, g, s); };
  if (g.kind == TargetGeometry::Kind::P1FubiniStudy) {
    v.T = cartan_value(f, r);
    if (cross_check) {
      v.T_area = height_double_integral(density, r, kCrossCheckTol, inner(r));
      if (std::abs(v.T - v.T_area) > kDriftTolerance)
        fail(ErrorKind::CrossCheckMismatch, "Cartan and area characteristics disagree");
    }
    return v;
  }
  v.T = height_double_integral(density, r, 1e-7L, inner(r));
  v.T_area = v.T;
  return v;
}

PreimageSet::PreimageSet(const HoloMap& f, const TargetGeometry& g, const P1Point& a, real rmax,
                         bool allow_origin) {
  require_radius(f, rmax);
  real t = search_radius(rmax, f.disc().radius);
  if (g.kind == TargetGeometry::Kind::TorusFlat) {
    if (a.infinite) fail(ErrorKind::PreconditionViolation, "torus targets are finite points");
    zeros_ = torus_preimages(f, g, a.value, t);
  } else if (!f.omits(a)) {
    zeros_ = with_circle_retry(t, [&](real s) { return locate_zeros(f, s, a); });
  }
  split_origin(zeros_, origin_mult_, t, allow_origin);
}

PreimageSet::PreimageSet(const AnalyticFn& h, real rmax, real R, bool allow_origin) {
  real t = search_radius(rmax, R);
  zeros_ = with_circle_retry(t, [&](real s) { return locate_zeros(h, s); });
  split_origin(zeros_, origin_mult_, t, allow_origin);
}

real PreimageSet::counting(real r, std::optional<int> truncation) const {
  real n = counting_from_zeros(zeros_, r, truncation);
  int m0 = truncation ? std::min(origin_mult_, *truncation) : origin_mult_;
  return n + m0 * std::log(r);
}

std::vector<real> PreimageSet::hints(real r) const { return preimage_hints(zeros_, r); }

real proximity_with(const HoloMap& f, const TargetGeometry& g, real r, const P1Point& a, const PreimageSet& pre) {
  require_radius(f, r);
  auto hints = pre.hints(r);
  switch (g.kind) {
    case TargetGeometry::Kind::P1FubiniStudy:
      return p1_proximity(f, r, a, hints);
    case TargetGeometry::Kind::TorusFlat:
      if (a.infinite) fail(ErrorKind::PreconditionViolation, "torus targets are finite points");
      return torus_proximity(f, g, r, a.value, hints);
    default:
      fail(ErrorKind::PreconditionViolation, "proximity needs a P1 or torus target");
  }
}

real proximity(const HoloMap& f, const TargetGeometry& g, real r, const P1Point& a) {
  return with_circle_retry(r, [&](real s) {
    PreimageSet pre(f, g, a, s, true);
    return proximity_with(f, g, s, a, pre);
  });
}

real fmt_residual(const HoloMap& f, const TargetGeometry& g, real r, const P1Point& a) {
  PreimageSet pre(f, g, a, r, true);
  real m = proximity_with(f, g, r, a, pre);
  real T = characteristic(f, g, r, false).T;
  return m + pre.counting(r) - T;
}

CharacteristicTable characteristic_table(const HoloMap& f, const TargetGeometry& g, const RadialGrid& grid,
                                         bool cross_check) {
  const auto& radii = grid.radii;
  for (real r : radii) require_radius(f, r);
  CharacteristicTable out;
  out.T.assign(radii.size(), kNaN);
  out.T_area.assign(radii.size(), kNaN);
  auto density = [&](cplx z) { return pullback_density(f, g, z); };
  auto inner = [&](real s) { return density_options(f, g, s); };

  if (g.kind == TargetGeometry::Kind::P1FubiniStudy) {
    parallel_for(radii.size(), [&](size_t i) { out.T[i] = cartan_value(f, radii[i]); });
    if (cross_check) {
      std::vector<real> sub;
      for (real r : radii)
        if (cross_check_allowed(f.disc(), r)) sub.push_back(r);
      if (!sub.empty()) {
        auto area = height_integral_grid(density, sub, kCrossCheckTol, inner);
        for (size_t i = 0; i < area.size(); ++i) {
          out.T_area[i] = area[i];
          out.max_drift = std::max(out.max_drift, std::abs(out.T[i] - area[i]));
        }
        if (out.max_drift > kDriftTolerance)
          fail(ErrorKind::CrossCheckMismatch, "Cartan and area characteristics disagree");
      }
    }
    return out;
  }
  out.T = height_integral_grid(density, radii, 1e-7L, inner);
  out.T_area = out.T;
  return out;
}

GrowthIndexEstimate growth_index_from_values(const RadialGrid& grid, const std::vector<real>& T, size_t window) {
  GrowthIndexEstimate e;
  if (std::isinf(grid.R)) {
    e.definitional = true;
    e.c_est = 0;
    return e;
  }
  size_t n = std::min(T.size(), grid.radii.size());
  if (n < 3) fail(ErrorKind::GridTooCoarse, "growth index needs at least three radii");
  window = std::clamp<size_t>(window, 3, n);
  e.window_begin = n - window;
  e.window_end = n;
  std::vector<real> x, y;
  for (size_t i = e.window_begin; i < n; ++i) {
    x.push_back(-std::log1p(-grid.radii[i] / grid.R));
    y.push_back(T[i]);
  }
  LineFit lf = fit_line(x, y);
  e.kappa = lf.slope;
  e.rms = lf.rms;
  real lo = *std::min_element(y.begin(), y.end()), hi = *std::max_element(y.begin(), y.end());
  real variation = hi - lo;
  if (e.kappa <= 1e-3L || variation <= 1e-3L * (1 + std::abs(hi))) {
    e.bounded = true;
    e.c_est = kInf;
    return e;
  }
  if (e.rms > 0.1L * variation) fail(ErrorKind::FitUnstable, "characteristic is not linear in log 1/(1-r)");
  e.c_est = 1 / e.kappa;
  return e;
}

GrowthIndexEstimate growth_index(const HoloMap& f, const TargetGeometry& g, const RadialGrid& grid, size_t window) {
  if (f.disc().is_plane()) return growth_index_from_values(grid, {}, window);
  auto tab = characteristic_table(f, g, grid, false);
  return growth_index_from_values(grid, tab.T, window);
}

DefectEstimate defect_from_values(const std::vector<real>& m, const std::vector<real>& T, size_t window) {
  size_t n = std::min(m.size(), T.size());
  if (n == 0) fail(ErrorKind::GridTooCoarse, "empty grid");
  window = std::clamp<size_t>(window, 1, n);
  auto ratio = [&](size_t i) {
    if (!(T[i] > 0)) return real(1);
    return std::clamp<real>(m[i] / T[i], 0, 1);
  };
  DefectEstimate d;
  d.value = 1;
  for (size_t i = n - window; i < n; ++i) d.value = std::min(d.value, ratio(i));
  d.last = ratio(n - 1);
  return d;
}

DefectEstimate defect_estimate(const HoloMap& f, const TargetGeometry& g, const P1Point& a, const RadialGrid& grid,
                               size_t window) {
  auto tab = characteristic_table(f, g, grid, false);
  PreimageSet pre(f, g, a, grid.radii.back(), true);
  std::vector<real> m(grid.size());
  parallel_for(grid.size(), [&](size_t i) { m[i] = proximity_with(f, g, grid.radii[i], a, pre); });
  return defect_from_values(m, tab.T, window);
}

std::string target_label(const P1Point& a) {
  if (a.infinite) return "inf";
  std::ostringstream os;
  os.precision(6);
  real re = a.value.real(), im = a.value.imag();
  if (im == 0) {
    os << re;
  } else {
    os << re << (im < 0 ? "-" : "+") << std::abs(im) << "i";
  }
  return os.str();
}

NevanlinnaTable smt_riemann_report(const HoloMap& f, const TargetGeometry& g, const std::vector<P1Point>& targets,
                                   const RadialGrid& grid, real eps, std::optional<real> c) {
  if (grid.size() < 3) fail(ErrorKind::GridTooCoarse, "report needs at least three radii");
  for (size_t i = 0; i < targets.size(); ++i)
    for (size_t j = 0; j < i; ++j)
      if (targets[i].infinite == targets[j].infinite &&
          (targets[i].infinite || targets[i].value == targets[j].value))
        fail(ErrorKind::PreconditionViolation, "targets must be distinct");

  real main_coeff = 0;
  switch (g.kind) {
    case TargetGeometry::Kind::P1FubiniStudy: main_coeff = 2; break;
    case TargetGeometry::Kind::TorusFlat: main_coeff = 0; break;
    case TargetGeometry::Kind::PoincarePullback:
      main_coeff = -1;
      if (!targets.empty()) fail(ErrorKind::PreconditionViolation, "Poincare-pullback reports take no targets");
      break;
    default: fail(ErrorKind::PreconditionViolation, "use the projcurve module for Pn targets");
  }

  NevanlinnaTable tab;
  tab.grid = grid;
  const size_t n = grid.size();
  const real rmax = grid.radii.back();

  auto ct = characteristic_table(f, g, grid, true);
  real cval;
  if (c) {
    cval = *c;
  } else if (f.disc().is_plane()) {
    cval = 0;
  } else {
    GrowthIndexEstimate ge;
    try {
      ge = growth_index_from_values(grid, ct.T);
    } catch (const Error& e) {
      fail(ErrorKind::MissingC, std::string("growth index unavailable: ") + e.what());
    }
    cval = ge.c_est;
  }
  if (!std::isfinite(cval)) fail(ErrorKind::MissingC, "growth index is infinite");

  std::vector<real> sum_m(n, 0);
  real defect_sum = 0;
  for (const auto& a : targets) {
    tab.target_labels.push_back(target_label(a));
    PreimageSet pre(f, g, a, rmax, true);
    std::vector<real> m(n), N(n);
    parallel_for(n, [&](size_t i) {
      m[i] = proximity_with(f, g, grid.radii[i], a, pre);
      N[i] = pre.counting(grid.radii[i]);
    });
    for (size_t i = 0; i < n; ++i) sum_m[i] += m[i];
    DefectEstimate d = defect_from_values(m, ct.T);
    tab.summary["defect:" + tab.target_labels.back()] = d.value;
    defect_sum += d.value;
    tab.m.push_back(std::move(m));
    tab.N.push_back(std::move(N));
  }

  PreimageSet ram = f.locally_injective() ? PreimageSet() : PreimageSet(wronskian_function(f), rmax, f.disc().radius, true);
  std::vector<real> D(n);
  tab.rows.resize(n);
  for (size_t i = 0; i < n; ++i) {
    TableRow& row = tab.rows[i];
    real r = grid.radii[i];
    row.r = r;
    row.T = ct.T[i];
    row.T_area = ct.T_area[i];
    row.m_total = sum_m[i];
    row.N_total = 0;
    for (const auto& N : tab.N) row.N_total += N[i];
    row.N_ram = ram.counting(r);
    D[i] = row.m_total + row.N_ram - smt_rhs(main_coeff, 1, cval, eps, row.T, r);
  }
  SlackFit sf = fit_slack(D, ct.T);
  for (size_t i = 0; i < n; ++i) {
    tab.rows[i].slack = sf.slack[i];
    tab.rows[i].exceptional = sf.slack[i] < 0 ? 1 : 0;
  }
  ExceptionalSummary ex = exceptional_set_measure(tab, cval, eps);

  tab.summary["c"] = cval;
  tab.summary["eps"] = eps;
  tab.summary["C0"] = sf.C0;
  tab.summary["C_log"] = sf.C_log;
  tab.summary["defect_sum"] = defect_sum;
  if (g.kind == TargetGeometry::Kind::P1FubiniStudy) tab.summary["implied_c_lower"] = defect_sum - 2;
  if (g.kind == TargetGeometry::Kind::TorusFlat) tab.summary["implied_c_lower"] = defect_sum;
  tab.summary["exceptional_count"] = static_cast<real>(ex.flagged_radii.size());
  tab.summary["exceptional_measure"] = ex.weighted_measure;
  tab.summary["min_slack"] = *std::min_element(sf.slack.begin(), sf.slack.end());
  tab.summary["cross_check_drift"] = ct.max_drift;
  return tab;
}

}  // namespace nevlab
