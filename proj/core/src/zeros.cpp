#include "nevlab/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace nevlab {

AnalyticFn target_function(const HoloMap& f, const P1Point& a) {
  return {[f, a](cplx z) { return f.target_value(z, a); }, [f, a](cplx z) { return f.target_derivative(z, a); }};
}

AnalyticFn poly_function(const Poly& p) {
  auto c = p.to_cplx();
  auto d = p.derivative().to_cplx();
  return {[c](cplx z) { return Scaled::from(horner(c, z)); }, [d](cplx z) { return Scaled::from(horner(d, z)); }};
}

AnalyticFn wronskian_function(const HoloMap& f) {
  if (auto rp = f.rational_parts()) {
    const auto& [num, den] = *rp;
    return poly_function(den * num.derivative() - num * den.derivative());
  }
  if (f.has_poles()) fail(ErrorKind::PreconditionViolation, "Wronskian of a non-rational meromorphic body");
  // W'(z) from a central difference of log W; only the step control and Newton use it.
  auto value = [f](cplx z) { return f.eval_jet(z).wronskian(); };
  real R = f.disc().radius;
  auto deriv = [value, R](cplx z) {
    real scale = std::isinf(R) ? std::max<real>(1, std::abs(z)) : R - std::abs(z);
    real h = 1e-6L * scale;
    Scaled w = value(z), wp = value(z + h), wm = value(z - h);
    if (w.is_zero() || wp.is_zero() || wm.is_zero()) return Scaled{};
    cplx dlog(wp.logmag - wm.logmag, std::arg(wp.phase / wm.phase));
    return w * (dlog / (2 * h));
  };
  return {value, deriv};
}

namespace {

struct Sample {
  cplx z;
  Scaled h;
  cplx dlog;
  bool has_d;
};

Sample sample(const AnalyticFn& h, cplx z) {
  Sample s{z, h.value(z), 0, false};
  if (s.h.is_zero()) fail(ErrorKind::ZeroOnCircle, "function vanishes on the integration path");
  if (h.deriv) {
    Scaled d = h.deriv(z);
    s.has_d = true;
    if (d.is_zero()) s.dlog = 0;
    else if (d.logmag - s.h.logmag > 4000) s.dlog = cplx(1e300L, 0);
    else s.dlog = (d / s.h).value();
  }
  return s;
}

real arg_step(const Sample& a, const Sample& b) { return std::arg(b.h.phase * std::conj(a.h.phase)); }

// Total argument change of h along path(s), s in [0, 1], starting from `pieces` uniform pieces.
real arg_change(const AnalyticFn& h, const std::function<cplx(real)>& path, int pieces) {
  struct Piece {
    real s0, s1;
    Sample a, b;
    int depth;
  };
  std::vector<Sample> init;
  for (int i = 0; i <= pieces; ++i) init.push_back(sample(h, path(real(i) / pieces)));
  std::vector<Piece> stack;
  for (int i = pieces - 1; i >= 0; --i)
    stack.push_back({real(i) / pieces, real(i + 1) / pieces, init[size_t(i)], init[size_t(i) + 1], 0});
  real total = 0;
  while (!stack.empty()) {
    Piece p = stack.back();
    stack.pop_back();
    real d = arg_step(p.a, p.b);
    bool ok = std::fabs(d) < kPi / 2;
    if (ok && p.a.has_d && p.b.has_d) {
      cplx dz = p.b.z - p.a.z;
      real pred = ((p.a.dlog + p.b.dlog) / real(2) * dz).imag();
      // Step bound: |h'/h| times the step length stays below 1 at both ends.
      real reach = std::abs(dz) * std::max(std::abs(p.a.dlog), std::abs(p.b.dlog));
      ok = std::fabs(pred - d) < kPi / 4 && reach < 1;
    }
    Sample m;
    bool have_mid = false;
    if (ok && !(p.a.has_d && p.b.has_d)) {
      m = sample(h, path((p.s0 + p.s1) / 2));
      have_mid = true;
      real d1 = arg_step(p.a, m), d2 = arg_step(m, p.b);
      ok = std::fabs(d1) < kPi / 2 && std::fabs(d2) < kPi / 2 && std::fabs(d1 + d2 - d) < 1e-6L;
    }
    if (ok) {
      total += d;
      continue;
    }
    real len = std::abs(p.b.z - p.a.z);
    if (p.depth > 64 || len <= 1e-15L * std::max<real>(1, std::abs(p.a.z)))
      fail(ErrorKind::ZeroOnCircle, "argument tracking failed: zero on or extremely near the path");
    real sm = (p.s0 + p.s1) / 2;
    if (!have_mid) m = sample(h, path(sm));
    stack.push_back({sm, p.s1, m, p.b, p.depth + 1});
    stack.push_back({p.s0, sm, p.a, m, p.depth + 1});
  }
  return total;
}

int to_winding(real total) {
  real w = total / kTwoPi;
  real rw = std::round(w);
  if (std::fabs(w - rw) > 0.05L) fail(ErrorKind::ZeroOnCircle, "winding number not near an integer");
  return static_cast<int>(rw);
}

struct Box {
  real x0, x1, y0, y1;
  int count;
  real side() const { return std::max(x1 - x0, y1 - y0); }
  cplx center() const { return {(x0 + x1) / 2, (y0 + y1) / 2}; }
  bool contains(cplx z, real slack) const {
    return z.real() >= x0 - slack && z.real() <= x1 + slack && z.imag() >= y0 - slack && z.imag() <= y1 + slack;
  }
};

int box_winding(const AnalyticFn& h, real x0, real x1, real y0, real y1) {
  cplx c[4] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  auto path = [&](real s) {
    real u = s * 4;
    int k = std::min(3, static_cast<int>(u));
    real f = u - k;
    return c[k] + (c[(k + 1) % 4] - c[k]) * f;
  };
  return to_winding(arg_change(h, path, 16));
}

bool newton(const AnalyticFn& h, cplx& z, int m, real maxstep) {
  for (int it = 0; it < 200; ++it) {
    Scaled v = h.value(z);
    if (v.is_zero()) return true;
    Scaled d = h.deriv(z);
    if (d.is_zero()) return false;
    Scaled st = v / d;
    if (st.logmag > std::log(maxstep)) st.logmag = std::log(maxstep);
    cplx step = st.value() * real(m);
    if (std::abs(step) > maxstep) step *= maxstep / std::abs(step);
    z -= step;
    if (std::abs(step) <= 1e-17L * std::max<real>(1, std::abs(z))) return true;
  }
  return true;
}

// Mean of the m zeros inside |z - c| = rho by the trapezoid rule on (z-c)^2 h'/h; accurate where
// Newton stalls at multiple roots.
cplx centroid(const AnalyticFn& h, cplx c, real rho, int m) {
  real use = rho;
  try {
    if (winding_on_circle(h, c, rho / 4) == m) use = rho / 4;
  } catch (const Error&) {
  }
  constexpr int kN = 256;
  cplx s(0, 0);
  for (int j = 0; j < kN; ++j) {
    cplx w = std::polar(use, kTwoPi * j / kN);
    Scaled v = h.value(c + w);
    if (v.is_zero()) return c;
    s += w * w * (h.deriv(c + w) / v).value();
  }
  return c + s / real(kN) / real(m);
}

}  // namespace

int winding_on_circle(const AnalyticFn& h, cplx center, real t) {
  if (!(t > 0)) fail(ErrorKind::PreconditionViolation, "circle radius must be positive");
  auto path = [&](real s) { return center + std::polar(t, kTwoPi * s); };
  return to_winding(arg_change(h, path, 16));
}

int winding_count(const HoloMap& f, real t, const P1Point& a) {
  if (!(t < f.disc().radius)) fail(ErrorKind::DomainViolation, "circle outside the disc");
  return winding_on_circle(target_function(f, a), 0, t);
}

std::vector<ZeroRecord> locate_zeros(const AnalyticFn& h, real t, const ZeroOptions& opt) {
  int total = winding_on_circle(h, 0, t);
  std::vector<ZeroRecord> found;
  if (total == 0) return found;
  if (total < 0) fail(ErrorKind::PreconditionViolation, "negative winding: function has poles inside");
  real s = t * 1.0000013L;
  std::deque<Box> queue;
  queue.push_back({-s * 1.00021L, s * 1.00037L, -s * 1.00029L, s * 1.00011L, 0});
  queue.front().count = box_winding(h, queue.front().x0, queue.front().x1, queue.front().y0, queue.front().y1);
  const real min_side = opt.min_box_fraction * t;
  const real fractions[3] = {0.5137L, 0.4709L, 0.5433L};

  while (!queue.empty()) {
    Box b = queue.front();
    queue.pop_front();
    if (b.count == 0) continue;
    // Box entirely outside the closed disc.
    real dx = std::max<real>({b.x0, -b.x1, 0}), dy = std::max<real>({b.y0, -b.y1, 0});
    if (std::hypot(dx, dy) > t * (1 + 1e-9L)) continue;

    if (b.count <= opt.m_max && h.deriv) {
      cplx z = b.center();
      bool conv = newton(h, z, b.count, b.side() / 2);
      if (conv && b.contains(z, b.side() * 1e-9L)) {
        bool accepted = false;
        real rho = b.side() / 2;
        for (int tries = 0; tries < 4 && !accepted; ++tries, rho /= 4) {
          int w;
          try {
            w = winding_on_circle(h, z, rho);
          } catch (const Error&) {
            break;
          }
          if (w != b.count) continue;
          if (b.count > 1) {
            int w2;
            try {
              w2 = winding_on_circle(h, z, std::max<real>(1e-6L * t, min_side));
            } catch (const Error&) {
              break;
            }
            if (w2 != b.count) break;
          }
          if (b.count > 1) z = centroid(h, z, rho, b.count);
          found.push_back({z, b.count, rho, false});
          accepted = true;
        }
        if (accepted) continue;
      }
    }
    if (b.side() < min_side) {
      cplx z = b.center();
      if (h.deriv) newton(h, z, b.count, b.side());
      found.push_back({z, b.count, b.side(), true});
      continue;
    }
    bool split_ok = false;
    for (real fr : fractions) {
      real xm = b.x0 + (b.x1 - b.x0) * fr, ym = b.y0 + (b.y1 - b.y0) * fr;
      Box kids[4] = {{b.x0, xm, b.y0, ym, 0}, {xm, b.x1, b.y0, ym, 0}, {b.x0, xm, ym, b.y1, 0}, {xm, b.x1, ym, b.y1, 0}};
      try {
        int sum = 0;
        for (auto& k : kids) {
          k.count = box_winding(h, k.x0, k.x1, k.y0, k.y1);
          sum += k.count;
        }
        if (sum != b.count) continue;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ZeroOnCircle) throw;
        continue;
      }
      for (auto& k : kids)
        if (k.count != 0) queue.push_back(k);
      split_ok = true;
      break;
    }
    if (!split_ok) fail(ErrorKind::NoConvergence, "quadtree subdivision could not separate zeros from box edges");
  }

  std::vector<ZeroRecord> inside;
  int sum = 0;
  for (const auto& z : found) {
    if (std::abs(z.location) < t) {
      inside.push_back(z);
      sum += z.multiplicity;
    }
  }
  if (sum != total) fail(ErrorKind::ZeroOnCircle, "located multiplicities disagree with the winding count");
  std::sort(inside.begin(), inside.end(), [](const ZeroRecord& a, const ZeroRecord& b) {
    real ra = std::abs(a.location), rb = std::abs(b.location);
    if (ra != rb) return ra < rb;
    return std::arg(a.location) < std::arg(b.location);
  });
  // Certified radius: also bounded by half the distance to the nearest other zero.
  for (size_t i = 0; i < inside.size(); ++i)
    for (size_t j = 0; j < inside.size(); ++j)
      if (i != j)
        inside[i].certified_radius =
            std::min(inside[i].certified_radius, std::abs(inside[i].location - inside[j].location) / 2);
  return inside;
}

std::vector<ZeroRecord> locate_zeros(const HoloMap& f, real t, const P1Point& a, const ZeroOptions& opt) {
  if (!(t < f.disc().radius)) fail(ErrorKind::DomainViolation, "search disc exceeds the domain");
  return locate_zeros(target_function(f, a), t, opt);
}

real counting_from_zeros(const std::vector<ZeroRecord>& zeros, real r, std::optional<int> truncation) {
  real n = 0;
  for (const auto& z : zeros) {
    real a = std::abs(z.location);
    if (a >= r) continue;
    int m = truncation ? std::min(z.multiplicity, *truncation) : z.multiplicity;
    n += m * std::log(r / a);
  }
  return n;
}

real search_radius(real r, real R) {
  real t = r * 1.02L;
  if (!std::isinf(R)) t = std::min(t, (r + R) / 2);
  return t;
}

namespace {
void check_origin(const AnalyticFn& h, const char* what) {
  if (h.value(0).is_zero()) fail(ErrorKind::OriginHitsTarget, what);
}
}  // namespace

real counting_function(const HoloMap& f, real r, const P1Point& a, std::optional<int> truncation) {
  if (truncation && *truncation < 1) fail(ErrorKind::PreconditionViolation, "truncation must be >= 1");
  if (!(r > 0 && r < f.disc().radius)) fail(ErrorKind::DomainViolation, "radius outside the disc");
  AnalyticFn h = target_function(f, a);
  check_origin(h, "f(0) equals the target");
  auto zs = with_circle_retry(search_radius(r, f.disc().radius), [&](real t) { return locate_zeros(h, t); });
  return counting_from_zeros(zs, r, truncation);
}

real ramification_counting(const HoloMap& f, real r) {
  if (!(r > 0 && r < f.disc().radius)) fail(ErrorKind::DomainViolation, "radius outside the disc");
  if (auto rp = f.rational_parts()) {
    const auto& [num, den] = *rp;
    if ((den * num.derivative() - num * den.derivative()).is_zero())
      fail(ErrorKind::DegenerateCurve, "Wronskian vanishes identically (constant map)");
  }
  AnalyticFn w = wronskian_function(f);
  check_origin(w, "Wronskian vanishes at the origin");
  auto zs = with_circle_retry(search_radius(r, f.disc().radius), [&](real t) { return locate_zeros(w, t); });
  return counting_from_zeros(zs, r);
}

}  // namespace nevlab
