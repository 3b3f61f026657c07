#include "nevlab/quad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

namespace nevlab {

namespace {

constexpr real kXgk[8] = {0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
                          0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
                          0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
                          0.207784955007898467600689403773245L, 0.0L};
constexpr real kWgk[8] = {0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
                          0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
                          0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
                          0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};
constexpr real kWg[4] = {0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
                         0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};

template <size_t N>
using Vec = std::array<real, N>;

template <size_t N>
struct Panel {
  real a, b;
  Vec<N> val;
  real err;
  int depth;
  bool operator<(const Panel& o) const { return err < o.err; }
};

template <size_t N, class F>
Vec<N> eval_safe(const F& f, real x, real a, real b) {
  Vec<N> v = f(x);
  bool ok = true;
  for (real c : v) ok = ok && std::isfinite(c);
  if (ok) return v;
  // Node landed on a singular point; nudge inside the panel.
  real dx = (b - a) * 1e-9L;
  v = f(x + (x + dx < b ? dx : -dx));
  for (real c : v)
    if (!std::isfinite(c)) fail(ErrorKind::SingularAverage, "integrand not finite near a quadrature node");
  return v;
}

template <size_t N, class F>
Panel<N> gk15(const F& f, real a, real b, int depth, long& evals) {
  real c = (a + b) / 2, h = (b - a) / 2;
  Vec<N> k{}, g{};
  Vec<N> fc = eval_safe<N>(f, c, a, b);
  for (size_t i = 0; i < N; ++i) {
    k[i] = fc[i] * kWgk[7];
    g[i] = fc[i] * kWg[3];
  }
  for (int j = 0; j < 7; ++j) {
    real dx = h * kXgk[j];
    Vec<N> f1 = eval_safe<N>(f, c - dx, a, b), f2 = eval_safe<N>(f, c + dx, a, b);
    for (size_t i = 0; i < N; ++i) {
      k[i] += kWgk[j] * (f1[i] + f2[i]);
      if (j % 2 == 1) g[i] += kWg[j / 2] * (f1[i] + f2[i]);
    }
  }
  evals += 15;
  Panel<N> p{a, b, {}, 0, depth};
  for (size_t i = 0; i < N; ++i) {
    p.val[i] = k[i] * h;
    p.err = std::max(p.err, std::fabs((k[i] - g[i]) * h));
  }
  return p;
}

template <size_t N, class F>
Vec<N> adaptive(const F& f, real a, real b, real tol, std::vector<real> cuts, const QuadOptions& opt) {
  Vec<N> zero{};
  if (b <= a) return zero;
  cuts.push_back(a);
  cuts.push_back(b);
  int m = std::max(1, opt.min_panels);
  for (int i = 1; i < m; ++i) cuts.push_back(a + (b - a) * i / m);
  std::sort(cuts.begin(), cuts.end());
  std::vector<real> pts;
  real minsep = (b - a) * 1e-13L;
  for (real x : cuts) {
    if (x < a || x > b) continue;
    if (pts.empty() || x - pts.back() > minsep) pts.push_back(x);
    else if (x == b) pts.back() = b;
  }
  long evals = 0;
  std::priority_queue<Panel<N>> q;
  real total_err = 0;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    Panel<N> p = gk15<N>(f, pts[i], pts[i + 1], 0, evals);
    total_err += p.err;
    q.push(p);
  }
  std::vector<Panel<N>> done;
  while (total_err > tol && !q.empty()) {
    Panel<N> p = q.top();
    if (p.depth >= opt.max_depth) {
      // Accept if the remaining error is dominated elsewhere; otherwise report failure.
      if (p.err > tol / 2) fail(ErrorKind::NoConvergence, "adaptive quadrature reached the depth limit");
      done.push_back(p);
      q.pop();
      continue;
    }
    if (evals > opt.max_evaluations) fail(ErrorKind::NoConvergence, "adaptive quadrature evaluation budget exhausted");
    q.pop();
    real c = (p.a + p.b) / 2;
    Panel<N> l = gk15<N>(f, p.a, c, p.depth + 1, evals);
    Panel<N> r = gk15<N>(f, c, p.b, p.depth + 1, evals);
    total_err += l.err + r.err - p.err;
    q.push(l);
    q.push(r);
  }
  if (total_err > tol) fail(ErrorKind::NoConvergence, "adaptive quadrature error estimate above tolerance");
  // Sum in a fixed order for reproducibility.
  while (!q.empty()) {
    done.push_back(q.top());
    q.pop();
  }
  std::sort(done.begin(), done.end(), [](const Panel<N>& x, const Panel<N>& y) { return x.a < y.a; });
  Vec<N> s{};
  for (const auto& p : done)
    for (size_t i = 0; i < N; ++i) s[i] += p.val[i];
  return s;
}

}  // namespace

real integrate(const std::function<real(real)>& f, real a, real b, real tol, const std::vector<real>& breakpoints,
               const QuadOptions& opt) {
  if (!(tol > 0)) fail(ErrorKind::PreconditionViolation, "tolerance must be positive");
  auto g = [&](real x) { return Vec<1>{f(x)}; };
  return adaptive<1>(g, a, b, tol, breakpoints, opt)[0];
}

real circle_average(const CircleIntegrand& g, real tol, const QuadOptions& opt) {
  if (!(tol > 0)) fail(ErrorKind::PreconditionViolation, "tolerance must be positive");
  std::vector<real> cuts;
  for (real h : g.hints) {
    real t = std::fmod(h, kTwoPi);
    if (t < 0) t += kTwoPi;
    cuts.push_back(t);
  }
  auto f = [&](real x) { return Vec<1>{g.g(x)}; };
  return adaptive<1>(f, 0, kTwoPi, tol * kTwoPi, cuts, opt)[0] / kTwoPi;
}

std::vector<real> hint_angles(const std::vector<cplx>& points, real r) {
  std::vector<real> out;
  for (cplx p : points) {
    real a = std::abs(p);
    if (a >= 0.98L * r && a <= 1.02L * r) out.push_back(std::arg(p));
  }
  return out;
}

namespace {
real ring_average(const Density& density, real s, real tol, const QuadOptions& inner) {
  if (s == 0) return density(0);
  CircleIntegrand ci{[&](real t) { return density(std::polar(s, t)); }, {}};
  return circle_average(ci, tol, inner);
}
}  // namespace

real height_double_integral(const Density& density, real r, real tol, const QuadOptions& inner) {
  if (!(r > 0)) return 0;
  real itol = tol / std::max<real>(r * r, 1) / 4;
  auto f = [&](real s) { return s <= 0 ? real(0) : 2 * s * std::log(r / s) * ring_average(density, s, itol, inner); };
  QuadOptions outer;
  outer.min_panels = 4;
  return integrate(f, 0, r, tol, {}, outer);
}

std::vector<real> height_integral_grid(const Density& density, const std::vector<real>& radii, real tol,
                                       const std::function<QuadOptions(real)>& inner) {
  std::vector<real> out;
  out.reserve(radii.size());
  real T = 0, M = 0, prev = 0;
  QuadOptions outer;
  outer.min_panels = 2;
  for (real r : radii) {
    if (r <= prev) fail(ErrorKind::PreconditionViolation, "radii must be increasing");
    real itol = tol / std::max<real>(r * r, 1) / 8;
    auto f = [&](real s) {
      if (s <= 0) return Vec<2>{0, 0};
      QuadOptions o = inner ? inner(s) : QuadOptions{};
      real a = 2 * s * ring_average(density, s, itol, o);
      return Vec<2>{a, a * std::log(r / s)};
    };
    Vec<2> v = adaptive<2>(f, prev, r, tol / 4, {}, outer);
    if (prev > 0) T += std::log(r / prev) * M;
    T += v[1];
    M += v[0];
    out.push_back(T);
    prev = r;
  }
  return out;
}

real green_jensen_residual(const std::function<real(cplx)>& g, const std::function<real(real)>& mass, real r,
                           real tol, const std::vector<real>& mass_breakpoints) {
  auto f = [&](real t) { return t <= 0 ? real(0) : mass(t) / t; };
  real lhs = integrate(f, 0, r, tol, mass_breakpoints);
  CircleIntegrand ci{[&](real t) { return g(std::polar(r, t)); }, {}};
  return lhs - (circle_average(ci, tol) - g(0)) / 2;
}

namespace {
std::vector<real> trapezoid(const std::vector<real>& x) {
  size_t n = x.size();
  std::vector<real> w(n, 0);
  if (n == 1) return {0};
  for (size_t i = 0; i < n; ++i) {
    real lo = i == 0 ? x[0] : (x[i - 1] + x[i]) / 2;
    real hi = i + 1 == n ? x[n - 1] : (x[i] + x[i + 1]) / 2;
    w[i] = hi - lo;
  }
  return w;
}
}  // namespace

RadialGrid RadialGrid::geometric(real r0, real r1, int n) {
  if (!(r0 > 0 && r1 > r0 && n >= 2)) fail(ErrorKind::PreconditionViolation, "bad geometric grid");
  RadialGrid g;
  for (int i = 0; i < n; ++i) g.radii.push_back(r0 * std::pow(r1 / r0, real(i) / (n - 1)));
  g.radii.back() = r1;
  g.weights = trapezoid(g.radii);
  g.policy = Policy::GeometricR;
  return g;
}

RadialGrid RadialGrid::boundary(real R, real d0, real d1, int n) {
  if (!(R > 0 && d0 < 1 && d1 > 0 && d0 > d1 && n >= 2))
    fail(ErrorKind::PreconditionViolation, "bad boundary grid");
  RadialGrid g;
  for (int i = 0; i < n; ++i) g.radii.push_back(R * (1 - d0 * std::pow(d1 / d0, real(i) / (n - 1))));
  g.radii.back() = R * (1 - d1);
  g.weights = trapezoid(g.radii);
  g.policy = Policy::GeometricOneMinusR;
  g.R = R;
  return g;
}

RadialGrid RadialGrid::from_radii(std::vector<real> radii, real R) {
  for (size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0 && radii[i] < R) || (i && radii[i] <= radii[i - 1]))
      fail(ErrorKind::PreconditionViolation, "grid radii must increase inside (0, R)");
  }
  RadialGrid g;
  g.radii = std::move(radii);
  g.weights = trapezoid(g.radii);
  g.R = R;
  return g;
}

RadialGrid RadialGrid::standard(real R) {
  if (std::isinf(R)) return geometric(1, 50, 48);
  return boundary(R, 0.5L, 0.0005L, 48);
}

RadialGrid RadialGrid::sub(real rmin, real rmax) const {
  std::vector<real> r;
  for (real x : radii)
    if (x >= rmin && x <= rmax) r.push_back(x);
  RadialGrid g = from_radii(r, R);
  g.policy = policy;
  return g;
}

std::vector<real> grid_derivative(const std::vector<real>& x, const std::vector<real>& y) {
  size_t n = x.size();
  std::vector<real> d(n, 0);
  if (n < 2) return d;
  d[0] = (y[1] - y[0]) / (x[1] - x[0]);
  d[n - 1] = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
  for (size_t i = 1; i + 1 < n; ++i) {
    real h1 = x[i] - x[i - 1], h2 = x[i + 1] - x[i];
    d[i] = -h2 / (h1 * (h1 + h2)) * y[i - 1] + (h2 - h1) / (h1 * h2) * y[i] + h1 / (h2 * (h1 + h2)) * y[i + 1];
  }
  return d;
}

CalculusLemmaResult calculus_lemma_check(const std::function<real(real)>& h, const std::function<real(real)>& gamma,
                                         real delta, const RadialGrid& grid, bool second_order) {
  if (!(delta > 0 && delta < 1)) fail(ErrorKind::PreconditionViolation, "delta must lie in (0, 1)");
  const auto& x = grid.radii;
  size_t n = x.size();
  if (n < (second_order ? 5u : 3u)) fail(ErrorKind::GridTooCoarse, "grid too small for centred differences");
  std::vector<real> y(n);
  for (size_t i = 0; i < n; ++i) y[i] = h(x[i]);
  std::vector<real> d1 = grid_derivative(x, y);
  CalculusLemmaResult res;
  res.derivative.assign(n, std::numeric_limits<real>::quiet_NaN());
  res.flagged.assign(n, false);
  real scale = 0;
  for (real v : y) scale = std::max(scale, std::fabs(v));
  real slack = 1e-10L * std::max<real>(scale, 1);

  if (!second_order) {
    for (size_t i = 1; i + 1 < n; ++i) {
      if (d1[i] * (x[n - 1] - x[0]) < -slack)
        fail(ErrorKind::GridTooCoarse, "difference quotients of h are not monotone");
      res.derivative[i] = d1[i];
      bool bad;
      if (d1[i] <= 0) bad = false;
      else if (y[i] <= 0) bad = true;
      else bad = d1[i] > std::pow(y[i], 1 + delta) * gamma(x[i]);
      res.flagged[i] = bad;
    }
  } else {
    std::vector<real> rh(n);
    for (size_t i = 0; i < n; ++i) rh[i] = x[i] * d1[i];
    for (size_t i = 1; i + 2 < n; ++i)
      if (rh[i + 1] - rh[i] < -slack) fail(ErrorKind::GridTooCoarse, "r h' is not monotone on the grid");
    std::vector<real> d2 = grid_derivative(x, rh);
    // Both stencils are interior only one point in from each end.
    for (size_t i = 2; i + 2 < n; ++i) {
      real lhs = d2[i] / x[i];
      res.derivative[i] = lhs;
      bool bad;
      if (lhs <= 0) bad = false;
      else if (y[i] <= 0) bad = true;
      else
        bad = lhs > std::pow(x[i], delta) * std::pow(gamma(x[i]), 2 + delta) * std::pow(y[i], (1 + delta) * (1 + delta));
      res.flagged[i] = bad;
    }
  }
  for (size_t i = 0; i < n; ++i) {
    if (!res.flagged[i]) continue;
    res.flagged_radii.push_back(x[i]);
    res.weighted_measure += gamma(x[i]) * grid.weights[i];
  }
  return res;
}

}  // namespace nevlab
