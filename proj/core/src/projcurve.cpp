#include "nevlab/projcurve.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <random>

namespace nevlab {

namespace {

using CMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;

constexpr real kStationaryOffset = 1e-7L;
constexpr real kDegenerateRel = 1e-12L;
constexpr real kDriftTolerance = 0.05L;
constexpr real kCrossCheckTol = 1e-5L;

GaussRational qr(long a, long b = 1) { return GaussRational(Rational(a, b)); }

// Determinant of a square matrix of scaled entries, columns rescaled to unit size first.
Scaled det_scaled(const std::vector<std::vector<Scaled>>& m) {
  const size_t s = m.size();
  if (s == 0) return Scaled::one();
  real total = 0;
  CMat a(s, s);
  for (size_t c = 0; c < s; ++c) {
    real L = -kInf;
    for (size_t r = 0; r < s; ++r)
      if (!m[r][c].is_zero()) L = std::max(L, m[r][c].logmag);
    if (std::isinf(L)) return {};
    total += L;
    for (size_t r = 0; r < s; ++r) a(r, c) = m[r][c].value_shifted(L);
  }
  cplx d = s == 1 ? a(0, 0) : a.partialPivLu().determinant();
  if (d == cplx(0, 0)) return {};
  Scaled out = Scaled::from(d);
  out.logmag += total;
  return out;
}

// Minors of rows 0..k of the jet over column subsets.
std::vector<Scaled> minors(const std::vector<std::vector<Scaled>>& jet, int k,
                           const std::vector<std::vector<int>>& subsets, int replace_last_with = -1) {
  std::vector<Scaled> out;
  out.reserve(subsets.size());
  std::vector<std::vector<Scaled>> m(k + 1, std::vector<Scaled>(k + 1));
  for (const auto& J : subsets) {
    for (int i = 0; i <= k; ++i) {
      int row = (i == k && replace_last_with >= 0) ? replace_last_with : i;
      for (int l = 0; l <= k; ++l) m[i][l] = jet[row][J[l]];
    }
    out.push_back(det_scaled(m));
  }
  return out;
}

real hadamard_log_bound(const std::vector<std::vector<Scaled>>& jet, int k) {
  real s = 0;
  for (int i = 0; i <= k; ++i) s += log_norm(jet[i]);
  return s;
}

Poly poly_det(std::vector<std::vector<Poly>> m) {
  const size_t s = m.size();
  if (s == 0) return Poly::constant(qr(1));
  if (s == 1) return m[0][0];
  Poly total;
  std::vector<size_t> perm(s);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    int inv = 0;
    for (size_t i = 0; i < s; ++i)
      for (size_t j = i + 1; j < s; ++j)
        if (perm[i] > perm[j]) ++inv;
    Poly term = Poly::constant(qr(inv % 2 ? -1 : 1));
    for (size_t i = 0; i < s && !term.is_zero(); ++i) term = term * m[i][perm[i]];
    total = total + term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

Poly poly_gcd_all(const std::vector<Poly>& ps) {
  Poly g;
  for (const auto& p : ps)
    if (!p.is_zero()) g = g.is_zero() ? p.monic() : gcd(g, p);
  return g;
}

Poly exact_quotient(const Poly& a, const Poly& b) {
  Poly q, r;
  a.divmod(b, q, r);
  if (!r.is_zero()) fail(ErrorKind::PrecisionFailure, "inexact polynomial division");
  return q;
}

int origin_order(const Poly& p) {
  int m = 0;
  while (m <= p.degree() && p.coeff(m).is_zero()) ++m;
  return m;
}

real log_abs_poly(const std::vector<cplx>& c, cplx z) {
  cplx v = horner(c, z);
  return v == cplx(0, 0) ? -kInf : std::log(std::abs(v));
}

real log_norm_polys(const std::vector<std::vector<cplx>>& ps, cplx z) {
  std::vector<Scaled> v;
  v.reserve(ps.size());
  for (const auto& c : ps) v.push_back(Scaled::from(horner(c, z)));
  return log_norm(v);
}

std::vector<std::vector<cplx>> to_cplx_all(const std::vector<Poly>& ps) {
  std::vector<std::vector<cplx>> out;
  for (const auto& p : ps) out.push_back(p.to_cplx());
  return out;
}

// Exact data for F_k of a polynomial curve.
struct ExactFk {
  std::vector<Poly> full;
  Poly g;                        // monic gcd of the components (1 when none)
  std::vector<Poly> reduced;     // full / g
  std::vector<std::vector<cplx>> reduced_c;
  bool zero = false;
};

ExactFk make_exact_fk(const std::vector<Poly>& comps, int k) {
  const int n1 = static_cast<int>(comps.size());
  ExactFk e;
  if (k < 0) {
    e.full = {Poly::constant(qr(1))};
  } else if (k >= n1) {
    e.zero = true;
    return e;
  } else {
    std::vector<std::vector<Poly>> d(k + 1, std::vector<Poly>(n1));
    for (int j = 0; j < n1; ++j) {
      d[0][j] = comps[j];
      for (int i = 1; i <= k; ++i) d[i][j] = d[i - 1][j].derivative();
    }
    for (const auto& J : index_subsets(n1, k + 1)) {
      std::vector<std::vector<Poly>> m(k + 1, std::vector<Poly>(k + 1));
      for (int i = 0; i <= k; ++i)
        for (int l = 0; l <= k; ++l) m[i][l] = d[i][J[l]];
      e.full.push_back(poly_det(m));
    }
  }
  e.g = poly_gcd_all(e.full);
  if (e.g.is_zero()) {
    e.zero = true;
    return e;
  }
  for (const auto& p : e.full) e.reduced.push_back(exact_quotient(p, e.g));
  e.reduced_c = to_cplx_all(e.reduced);
  return e;
}

// Exact data for h_k of a polynomial curve: ratio of gcds times reduced norms.
struct HkExact {
  std::shared_ptr<const ExactFk> lo, mid, hi;
  std::vector<cplx> ratio_num, ratio_den;  // g_{k-1} g_{k+1} / g_k^2 in lowest terms
  Poly ratio_num_exact;
};

AnalyticFn fk_component(const ProjCurve& c, int k, const std::vector<int>& J) {
  std::vector<std::vector<int>> one{J};
  return {[c, k, one](cplx z) { return minors(c.jet(z, k), k, one)[0]; },
          [c, k, one](cplx z) { return minors(c.jet(z, k + 1), k, one, k + 1)[0]; }};
}

AnalyticFn fk_combination(const ProjCurve& c, int k, const std::vector<std::vector<int>>& subsets) {
  std::vector<cplx> coef;
  for (size_t i = 0; i < subsets.size(); ++i)
    coef.push_back(std::polar<real>(1, 0.7L + 1.3L * static_cast<real>(i)) * (1 + 0.1L * static_cast<real>(i)));
  auto combine = [coef](const std::vector<Scaled>& v) {
    Scaled s;
    for (size_t i = 0; i < v.size(); ++i) s = s + v[i] * coef[i];
    return s;
  };
  return {[=](cplx z) { return combine(minors(c.jet(z, k), k, subsets)); },
          [=](cplx z) { return combine(minors(c.jet(z, k + 1), k, subsets, k + 1)); }};
}

std::map<std::vector<int>, size_t> subset_index(int m, int size) {
  std::map<std::vector<int>, size_t> idx;
  auto subs = index_subsets(m, size);
  for (size_t i = 0; i < subs.size(); ++i) idx[subs[i]] = i;
  return idx;
}

int binomial(int m, int s) {
  if (s < 0 || s > m) return 0;
  long r = 1;
  for (int i = 1; i <= s; ++i) r = r * (m - s + i) / i;
  return static_cast<int>(r);
}

real ambient_scale(const Disc& d, cplx z) {
  return d.is_plane() ? std::max<real>(1, std::abs(z)) : std::min<real>(1, d.radius);
}

cplx stationary_offset(const Disc& d, cplx z) {
  real s = kStationaryOffset * ambient_scale(d, z);
  if (std::abs(z) == 0) return cplx(s, 0);
  return z - s * z / std::abs(z);
}

}  // namespace

struct CurveCache {
  std::mutex mu;
  std::map<int, std::shared_ptr<const ExactFk>> fk;
  std::map<int, std::shared_ptr<const HkExact>> hk;
};

// ---------- basic types ----------

Hyperplane::Hyperplane(std::vector<cplx> a) : normal(std::move(a)) {
  real s = 0;
  for (const auto& x : normal) s += std::norm(x);
  if (!(s > 0)) fail(ErrorKind::PreconditionViolation, "hyperplane normal must be nonzero");
  s = std::sqrt(s);
  for (auto& x : normal) x /= s;
}

real log_norm(const std::vector<Scaled>& v) {
  real L = -kInf;
  for (const auto& x : v)
    if (!x.is_zero()) L = std::max(L, x.logmag);
  if (std::isinf(L)) return -kInf;
  real s = 0;
  for (const auto& x : v)
    if (!x.is_zero()) s += std::exp(2 * (x.logmag - L));
  return L + std::log(s) / 2;
}

std::vector<std::vector<int>> index_subsets(int m, int size) {
  std::vector<std::vector<int>> out;
  if (size < 0 || size > m) return out;
  std::vector<int> cur(size);
  std::iota(cur.begin(), cur.end(), 0);
  while (true) {
    out.push_back(cur);
    int i = size - 1;
    while (i >= 0 && cur[i] == m - size + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < size; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

ProjCurve::ProjCurve(std::vector<HoloMap> components, std::string name)
    : comps_(std::move(components)), name_(std::move(name)) {
  if (comps_.size() < 2) fail(ErrorKind::PreconditionViolation, "a curve needs at least two components");
  cache_ = std::make_shared<CurveCache>();
  disc_ = comps_.front().disc();
  for (const auto& f : comps_) {
    if (f.has_poles()) fail(ErrorKind::PreconditionViolation, "curve components must be holomorphic");
    if (f.disc().radius < disc_.radius) disc_ = f.disc();
  }
  derivs_.assign(n() + 2, {});
  derivs_[0] = comps_;
  for (int i = 1; i <= n() + 1; ++i)
    for (const auto& f : comps_) derivs_[i].push_back(f.derivative(i));

  std::vector<Poly> polys;
  for (const auto& f : comps_) {
    auto rp = f.rational_parts();
    if (!rp || rp->second.degree() != 0) break;
    polys.push_back(rp->first * (GaussRational(1) / rp->second.leading()));
  }
  if (polys.size() == comps_.size()) exact_ = polys;

  if (exact_) {
    Poly g = poly_gcd_all(*exact_);
    if (g.is_zero()) fail(ErrorKind::DegenerateCurve, "all components vanish identically");
    reduced_ = g.degree() == 0;
  } else {
    real rho = disc_.is_plane() ? real(0.5) : disc_.radius / 4;
    for (int i = 0; i <= 32 && reduced_; ++i) {
      cplx z = i == 0 ? cplx(0) : std::polar(rho, kTwoPi * (i - 1) / 32);
      if (std::isinf(log_norm(eval(z)))) reduced_ = false;
    }
  }
}

const std::vector<Poly>& ProjCurve::polynomials() const {
  if (!exact_) fail(ErrorKind::PreconditionViolation, "curve is not polynomial");
  return *exact_;
}

const HoloMap& ProjCurve::derivative_map(int order, int j) const {
  if (order >= static_cast<int>(derivs_.size())) fail(ErrorKind::PreconditionViolation, "jet order too high");
  return derivs_[order][j];
}

std::vector<std::vector<Scaled>> ProjCurve::jet(cplx z, int order) const {
  std::vector<std::vector<Scaled>> d(order + 1, std::vector<Scaled>(comps_.size()));
  for (int i = 0; i <= order; ++i)
    for (size_t j = 0; j < comps_.size(); ++j) d[i][j] = derivative_map(i, static_cast<int>(j)).eval_scaled(z);
  return d;
}

bool ProjCurve::nondegenerate() const {
  if (exact_) return !make_exact_fk(*exact_, n()).zero;  // small; not worth caching
  auto all = index_subsets(n() + 1, n() + 1);
  real rho = disc_.is_plane() ? real(0.5) : disc_.radius / 4;
  for (int i = 0; i < 32; ++i) {
    cplx z = std::polar(rho * (0.5L + real(i % 4) / 8), kTwoPi * i / 32 + 0.1L);
    auto jt = jet(z, n());
    real w = log_norm(minors(jt, n(), all));
    if (w > hadamard_log_bound(jt, n()) + std::log(kDegenerateRel)) return true;
  }
  return false;
}

// ---------- gallery ----------

const std::vector<GalleryEntry>& curve_gallery_manifest() {
  static const std::vector<GalleryEntry> m = {
      {"line", "inf", "Pn-FubiniStudy", {}, "[1 : z]"},
      {"moment", "inf", "Pn-FubiniStudy", {"n"}, "[1 : z : ... : z^n]"},
      {"exp-line", "inf", "Pn-FubiniStudy", {}, "[1 : e^z]"},
      {"exp-curve", "inf", "Pn-FubiniStudy", {"n"}, "[1 : e^z : ... : e^{nz}]"},
      {"exp-degenerate", "inf", "Pn-FubiniStudy", {}, "[1 : e^z : 0] in P^2"},
  };
  return m;
}

ProjCurve curve_gallery(const std::string& name, const Params& params) {
  auto get_n = [&](int def) {
    auto it = params.find("n");
    if (it == params.end()) return def;
    int v = 0;
    try {
      v = std::stoi(it->second);
    } catch (const std::exception&) {
      fail(ErrorKind::ConfigParse, "n must be an integer");
    }
    if (v < 1 || v > 4) fail(ErrorKind::PreconditionViolation, "n must be in [1, 4]");
    return v;
  };
  const HoloMap one = make_polynomial(Poly::constant(qr(1)));
  if (name == "line") return ProjCurve({one, make_polynomial(Poly::monomial(1))}, name);
  if (name == "moment") {
    std::vector<HoloMap> c;
    for (int i = 0; i <= get_n(2); ++i) c.push_back(make_polynomial(Poly::monomial(i)));
    return ProjCurve(c, name);
  }
  if (name == "exp-line") return ProjCurve({one, make_exp()}, name);
  if (name == "exp-curve") {
    std::vector<HoloMap> c{one};
    for (int i = 1; i <= get_n(2); ++i) c.push_back(make_exp(1, real(i)));
    return ProjCurve(c, name);
  }
  if (name == "exp-degenerate") return ProjCurve({one, make_exp(), make_polynomial(Poly())}, name);
  fail(ErrorKind::UnknownName, "unknown curve: " + name);
}

// ---------- associated curves ----------

namespace {

class MinorBody final : public MapBody {
 public:
  // Sum of coeff * det[f_{J_l}^{(o_i)}] over order tuples.
  using Terms = std::map<std::vector<int>, long>;
  MinorBody(std::shared_ptr<const ProjCurve> c, std::vector<int> J, Terms terms)
      : c_(std::move(c)), J_(std::move(J)), terms_(std::move(terms)) {}

  P1Value eval_projective(cplx z) const override {
    int top = 0;
    for (const auto& [o, w] : terms_) top = std::max(top, *std::max_element(o.begin(), o.end()));
    auto jet = c_->jet(z, top);
    Scaled s;
    const size_t m = J_.size();
    std::vector<std::vector<Scaled>> mat(m, std::vector<Scaled>(m));
    for (const auto& [o, w] : terms_) {
      for (size_t i = 0; i < m; ++i)
        for (size_t l = 0; l < m; ++l) mat[i][l] = jet[o[i]][J_[l]];
      s = s + det_scaled(mat) * cplx(real(w), 0);
    }
    return {Scaled::one(), s};
  }

  BodyPtr derivative() const override {
    Terms d;
    for (const auto& [o, w] : terms_) {
      for (size_t i = 0; i < o.size(); ++i) {
        std::vector<int> next = o;
        ++next[i];
        // Sort rows, tracking the permutation sign; repeated orders give a zero determinant.
        int sign = 1;
        for (size_t a = 0; a < next.size(); ++a)
          for (size_t b = a + 1; b < next.size(); ++b)
            if (next[a] > next[b]) sign = -sign;
        std::sort(next.begin(), next.end());
        if (std::adjacent_find(next.begin(), next.end()) != next.end()) continue;
        d[next] += sign * w;
      }
    }
    for (auto it = d.begin(); it != d.end();) it = it->second == 0 ? d.erase(it) : std::next(it);
    return std::make_shared<MinorBody>(c_, J_, std::move(d));
  }

  std::string describe() const override {
    std::string s = "minor(";
    for (size_t i = 0; i < J_.size(); ++i) s += (i ? "," : "") + std::to_string(J_[i]);
    return s + ")";
  }

 private:
  std::shared_ptr<const ProjCurve> c_;
  std::vector<int> J_;
  Terms terms_;
};

}  // namespace

AssociatedCurve associated_curve(const ProjCurve& c, int k) {
  if (k < 0 || k > c.n()) fail(ErrorKind::PreconditionViolation, "k must be in [0, n]");
  AssociatedCurve a;
  a.k = k;
  a.indices = index_subsets(c.n() + 1, k + 1);
  bool exact_zero = false;
  if (c.is_polynomial()) {
    ExactFk e = make_exact_fk(c.polynomials(), k);
    exact_zero = e.zero;
    if (!e.zero) {
      a.exact = e.full;
      for (const auto& p : e.full) a.components.push_back(make_polynomial(p, c.disc()));
    }
  }
  // Sampling check on 32 points.
  bool sampled_zero = true;
  real rho = c.disc().is_plane() ? real(0.5) : c.disc().radius / 4;
  for (int i = 0; i < 32 && sampled_zero; ++i) {
    cplx z = std::polar(rho * (0.5L + real(i % 4) / 8), kTwoPi * i / 32 + 0.1L);
    auto jt = c.jet(z, k);
    if (log_norm(minors(jt, k, a.indices)) > hadamard_log_bound(jt, k) + std::log(kDegenerateRel))
      sampled_zero = false;
  }
  if (sampled_zero && (!c.is_polynomial() || exact_zero))
    fail(ErrorKind::DegenerateCurve, "associated curve vanishes identically");
  if (!a.exact) {
    auto cp = std::make_shared<const ProjCurve>(c);
    std::vector<int> base(k + 1);
    std::iota(base.begin(), base.end(), 0);
    for (const auto& J : a.indices)
      a.components.push_back(HoloMap(std::make_shared<MinorBody>(cp, J, MinorBody::Terms{{base, 1}}), c.disc()));
  }
  return a;
}

std::vector<Scaled> wedge_at(const ProjCurve& c, int k, cplx z) {
  if (k < -1 || k > c.n() + 1) fail(ErrorKind::PreconditionViolation, "k out of range");
  if (k == -1) return {Scaled::one()};
  if (k == c.n() + 1) return {};
  return minors(c.jet(z, k), k, index_subsets(c.n() + 1, k + 1));
}

// ---------- exact caches ----------

namespace {

std::shared_ptr<const ExactFk> exact_fk(const ProjCurve& c, int k) {
  CurveCache& cc = c.cache();
  std::lock_guard<std::mutex> lock(cc.mu);
  auto& slot = cc.fk[k];
  if (!slot) slot = std::make_shared<const ExactFk>(make_exact_fk(c.polynomials(), k));
  return slot;
}

std::shared_ptr<const HkExact> exact_hk(const ProjCurve& c, int k) {
  auto lo = exact_fk(c, k - 1), mid = exact_fk(c, k), hi = exact_fk(c, k + 1);
  CurveCache& cc = c.cache();
  std::lock_guard<std::mutex> lock(cc.mu);
  auto& slot = cc.hk[k];
  if (!slot) {
    if (mid->zero) fail(ErrorKind::DegenerateCurve, "F_k vanishes identically");
    auto h = std::make_shared<HkExact>();
    h->lo = lo;
    h->mid = mid;
    h->hi = hi;
    Poly num = lo->g * (hi->zero ? Poly::constant(qr(1)) : hi->g);
    Poly den = mid->g * mid->g;
    Poly g = gcd(num, den);
    h->ratio_num_exact = exact_quotient(num, g);
    h->ratio_num = h->ratio_num_exact.to_cplx();
    h->ratio_den = exact_quotient(den, g).to_cplx();
    slot = h;
  }
  return slot;
}

void require_k(const ProjCurve& c, int k) {
  if (k < 0 || k > c.n()) fail(ErrorKind::PreconditionViolation, "k must be in [0, n]");
}

real log_hk_numeric(const ProjCurve& c, int k, cplx z, bool fill) {
  auto jt = c.jet(z, k + 1);
  const int m = c.n() + 1;
  std::vector<Scaled> lo = k == 0 ? std::vector<Scaled>{Scaled::one()} : minors(jt, k - 1, index_subsets(m, k));
  real lm = log_norm(minors(jt, k, index_subsets(m, k + 1)));
  if (std::isinf(lm)) {
    if (!fill) fail(ErrorKind::StationaryPoint, "F_k vanishes at the evaluation point");
    return log_hk_numeric(c, k, stationary_offset(c.disc(), z), false);
  }
  real lh = log_norm(minors(jt, k + 1, index_subsets(m, k + 2)));
  return 2 * log_norm(lo) + 2 * lh - 4 * lm;
}

real log_hk(const ProjCurve& c, int k, cplx z, bool fill) {
  require_k(c, k);
  if (k == c.n()) return -kInf;
  if (c.is_polynomial()) {
    auto h = exact_hk(c, k);
    real lm = log_norm_polys(h->mid->reduced_c, z);
    if (std::isinf(lm)) fail(ErrorKind::PrecisionFailure, "reduced F_k vanished");
    return 2 * log_abs_poly(h->ratio_num, z) - 2 * log_abs_poly(h->ratio_den, z) +
           2 * log_norm_polys(h->lo->reduced_c, z) + 2 * log_norm_polys(h->hi->reduced_c, z) - 4 * lm;
  }
  return log_hk_numeric(c, k, z, fill);
}

// log |F_k| on the reduced representation for polynomial curves, raw otherwise.
real log_norm_fk(const ProjCurve& c, int k, cplx z) {
  if (c.is_polynomial()) return log_norm_polys(exact_fk(c, k)->reduced_c, z);
  return log_norm(wedge_at(c, k, z));
}

QuadOptions curve_circle_options(const ProjCurve& c, real r) {
  QuadOptions o = circle_options(c.disc(), r);
  // Exponential curves of degree d oscillate d times faster.
  o.min_panels = std::min(40000, o.min_panels * std::max(1, c.n()));
  return o;
}

}  // namespace

real hk_density(const ProjCurve& c, int k, cplx z, bool fill_stationary) {
  real l = log_hk(c, k, z, fill_stationary);
  return std::isinf(l) ? real(0) : std::exp(l);
}

// ---------- divisors ----------

FkDivisor::FkDivisor(const ProjCurve& c, int k, real rmax) {
  if (k < -1 || k > c.n()) fail(ErrorKind::PreconditionViolation, "k out of range");
  if (!(rmax > 0 && rmax < c.disc().radius)) fail(ErrorKind::DomainViolation, "radius outside the disc");
  if (k == -1) return;
  const real t = search_radius(rmax, c.disc().radius);
  const real tiny = 1e-12L * std::max<real>(1, t);
  if (c.is_polynomial()) {
    auto e = exact_fk(c, k);
    if (e->zero) fail(ErrorKind::DegenerateCurve, "F_k vanishes identically");
    int m0 = origin_order(e->g);
    Poly rest = exact_quotient(e->g, Poly::monomial(m0));
    if (rest.degree() > 0)
      zeros_ = with_circle_retry(t, [&](real s) { return locate_zeros(poly_function(rest), s); });
    origin_ = m0;
    log_leading_ = log_norm_polys(e->reduced_c, 0) + std::log(std::abs(e->g.coeff(m0).to_cplx()));
    return;
  }
  auto subsets = index_subsets(c.n() + 1, k + 1);
  AnalyticFn L = fk_combination(c, k, subsets);
  if (L.value(0).is_zero() && log_norm(wedge_at(c, k, cplx(0.1L, 0.07L))) == -kInf)
    fail(ErrorKind::DegenerateCurve, "F_k vanishes identically");
  auto cand = with_circle_retry(t, [&](real s) { return locate_zeros(L, s); });
  std::vector<AnalyticFn> comps;
  for (const auto& J : subsets) comps.push_back(fk_component(c, k, J));
  for (const auto& z0 : cand) {
    real rho = z0.certified_radius > 0 ? z0.certified_radius / 2 : 1e-6L * std::max<real>(1, std::abs(z0.location));
    int mult = z0.multiplicity;
    for (const auto& h : comps) {
      if (mult == 0) break;
      // Components that vanish identically impose no condition.
      int w = with_circle_retry(rho, [&](real s) { return winding_on_circle(h, z0.location, s); });
      if (w == 0 && h.value(z0.location + rho).is_zero() && h.value(z0.location - rho).is_zero()) continue;
      mult = std::min(mult, w);
    }
    if (mult <= 0) continue;
    ZeroRecord rec = z0;
    rec.multiplicity = mult;
    if (std::abs(rec.location) <= tiny)
      origin_ += mult;
    else
      zeros_.push_back(rec);
  }
  if (origin_ == 0) {
    log_leading_ = log_norm(wedge_at(c, k, 0));
  } else {
    real rho = 1e-3L;
    for (const auto& z : zeros_) rho = std::min(rho, std::abs(z.location) / 2);
    CircleIntegrand ci{[&](real th) { return log_norm(wedge_at(c, k, std::polar(rho, th))); }, {}};
    log_leading_ = circle_average(ci, kTolSmooth) - origin_ * std::log(rho);
  }
}

real FkDivisor::counting(real r) const { return counting_from_zeros(zeros_, r) + origin_ * std::log(r); }

std::vector<cplx> FkDivisor::points() const {
  std::vector<cplx> p;
  for (const auto& z : zeros_) p.push_back(z.location);
  if (origin_ > 0) p.push_back(0);
  return p;
}

// ---------- characteristic functions ----------

namespace {

real cartan_fk(const ProjCurve& c, int k, real r, const FkDivisor* div) {
  if (c.is_polynomial()) {
    CircleIntegrand ci{[&](real th) { return log_norm_fk(c, k, std::polar(r, th)); }, {}};
    return circle_average(ci, kTolSmooth, curve_circle_options(c, r)) - log_norm_fk(c, k, 0);
  }
  auto hints = hint_angles(div->points(), r);
  real tol = hints.empty() ? kTolSmooth : kTolSingular;
  CircleIntegrand ci{[&](real th) { return log_norm(wedge_at(c, k, std::polar(r, th))); }, hints};
  return circle_average(ci, tol, curve_circle_options(c, r)) - div->counting(r) - div->log_leading();
}

void check_fk_target(const ProjCurve& c, int k) {
  if (k < 0 || k > c.n()) fail(ErrorKind::PreconditionViolation, "k must be in [0, n]");
  if (!(c.reduced())) fail(ErrorKind::PreconditionViolation, "curve representation is not reduced");
}

}  // namespace

real characteristic_fk(const ProjCurve& c, int k, real r, bool cross_check) {
  check_fk_target(c, k);
  if (!(r > 0 && r < c.disc().radius)) fail(ErrorKind::DomainViolation, "radius outside the disc");
  if (k == c.n()) return 0;  // F_n has a single coordinate
  FkDivisor div;
  if (!c.is_polynomial()) div = FkDivisor(c, k, r);
  real T = cartan_fk(c, k, r, &div);
  if (cross_check) {
    auto density = [&](cplx z) { return hk_density(c, k, z); };
    real area = height_double_integral(density, r, kCrossCheckTol, curve_circle_options(c, r));
    if (std::abs(area - T) > kDriftTolerance)
      fail(ErrorKind::CrossCheckMismatch, "Cartan and area characteristics of F_k disagree");
  }
  return T;
}

CharacteristicTable characteristic_fk_table(const ProjCurve& c, int k, const RadialGrid& grid, bool cross_check) {
  check_fk_target(c, k);
  const auto& radii = grid.radii;
  for (real r : radii)
    if (!(r > 0 && r < c.disc().radius)) fail(ErrorKind::DomainViolation, "radius outside the disc");
  CharacteristicTable out;
  out.T.assign(radii.size(), 0);
  out.T_area.assign(radii.size(), kNaN);
  if (k == c.n() || radii.empty()) return out;
  FkDivisor div;
  if (!c.is_polynomial()) div = FkDivisor(c, k, radii.back());
  parallel_for(radii.size(), [&](size_t i) { out.T[i] = cartan_fk(c, k, radii[i], &div); });
  if (cross_check) {
    std::vector<real> sub;
    for (real r : radii)
      if (c.disc().is_plane() || 1 - r / c.disc().radius >= 0.01L) sub.push_back(r);
    if (!sub.empty()) {
      auto density = [&](cplx z) { return hk_density(c, k, z); };
      auto inner = [&](real s) { return curve_circle_options(c, s); };
      auto area = height_integral_grid(density, sub, kCrossCheckTol, inner);
      for (size_t i = 0; i < area.size(); ++i) {
        out.T_area[i] = area[i];
        out.max_drift = std::max(out.max_drift, std::abs(area[i] - out.T[i]));
      }
      if (out.max_drift > kDriftTolerance)
        fail(ErrorKind::CrossCheckMismatch, "Cartan and area characteristics of F_k disagree");
    }
  }
  return out;
}

real s_k(const ProjCurve& c, int k, real r) {
  require_k(c, k);
  if (k == c.n()) fail(ErrorKind::PreconditionViolation, "h_n vanishes identically");
  std::vector<cplx> pts;
  if (!c.is_polynomial()) {
    for (int j = k - 1; j <= k + 1; ++j) {
      if (j < 0 || j > c.n()) continue;
      auto p = FkDivisor(c, j, r).points();
      pts.insert(pts.end(), p.begin(), p.end());
    }
  } else {
    auto h = exact_hk(c, k);
    if (h->ratio_num_exact.degree() > 0)
      for (const auto& z : locate_zeros(poly_function(h->ratio_num_exact), search_radius(r, c.disc().radius)))
        pts.push_back(z.location);
  }
  auto hints = hint_angles(pts, r);
  real tol = hints.empty() ? kTolSmooth : kTolSingular;
  CircleIntegrand ci{[&](real th) { return log_hk(c, k, std::polar(r, th), true); }, hints};
  real v = circle_average(ci, tol, curve_circle_options(c, r)) / 2;
  if (!std::isfinite(v)) fail(ErrorKind::SingularAverage, "h_k vanishes on the circle");
  return v;
}

real n_dk(const ProjCurve& c, int k, real r) {
  require_k(c, k);
  if (k == c.n()) fail(ErrorKind::PreconditionViolation, "h_n vanishes identically");
  if (c.is_polynomial()) {
    auto h = exact_hk(c, k);
    const Poly& p = h->ratio_num_exact;
    int m0 = origin_order(p);
    Poly rest = exact_quotient(p, Poly::monomial(m0));
    real n = m0 * std::log(r);
    if (rest.degree() > 0) {
      auto zs = with_circle_retry(search_radius(r, c.disc().radius),
                                  [&](real s) { return locate_zeros(poly_function(rest), s); });
      n += counting_from_zeros(zs, r);
    }
    return n;
  }
  real n = k > 0 ? FkDivisor(c, k - 1, r).counting(r) : 0;
  n += FkDivisor(c, k + 1, r).counting(r);
  n -= 2 * FkDivisor(c, k, r).counting(r);
  return n;
}

real plucker_residual(const ProjCurve& c, int k, real r) {
  if (k < 0 || k >= c.n()) fail(ErrorKind::PreconditionViolation, "Plucker residual needs 0 <= k < n");
  real Tm = k > 0 ? characteristic_fk(c, k - 1, r) : 0;
  real T0 = characteristic_fk(c, k, r);
  real Tp = characteristic_fk(c, k + 1, r);
  return n_dk(c, k, r) + Tm - 2 * T0 + Tp - s_k(c, k, r);
}

// ---------- projective distance ----------

std::vector<cplx> interior_product(const std::vector<cplx>& xi, int k, const std::vector<cplx>& a) {
  const int m = static_cast<int>(a.size());
  if (k < 0 || k + 1 > m) fail(ErrorKind::PreconditionViolation, "wedge degree out of range");
  if (static_cast<int>(xi.size()) != binomial(m, k + 1))
    fail(ErrorKind::PreconditionViolation, "wedge vector has the wrong length");
  auto idx = subset_index(m, k + 1);
  auto out_sets = index_subsets(m, k);
  std::vector<cplx> out(out_sets.size(), cplx(0));
  for (size_t o = 0; o < out_sets.size(); ++o) {
    const auto& I = out_sets[o];
    for (int j = 0; j < m; ++j) {
      if (std::find(I.begin(), I.end(), j) != I.end()) continue;
      std::vector<int> J = I;
      J.insert(std::upper_bound(J.begin(), J.end(), j), j);
      long pos = std::find(J.begin(), J.end(), j) - J.begin();
      out[o] += (pos % 2 ? real(-1) : real(1)) * a[j] * xi[idx.at(J)];
    }
  }
  return out;
}

real hyperplane_distance(const std::vector<cplx>& xi, int k, const Hyperplane& H) {
  real nx = 0;
  for (const auto& x : xi) nx += std::norm(x);
  if (!(nx > 0)) fail(ErrorKind::PreconditionViolation, "zero wedge vector");
  auto g = interior_product(xi, k, H.normal);
  real ng = 0;
  for (const auto& x : g) ng += std::norm(x);
  return std::min<real>(1, std::sqrt(ng / nx));
}

real log_hyperplane_distance(const std::vector<Scaled>& xi, int k, const Hyperplane& H) {
  real L = log_norm(xi);
  if (std::isinf(L)) fail(ErrorKind::StationaryPoint, "zero wedge vector");
  std::vector<cplx> v;
  v.reserve(xi.size());
  for (const auto& x : xi) v.push_back(x.value_shifted(L));
  auto g = interior_product(v, k, H.normal);
  real ng = 0;
  for (const auto& x : g) ng += std::norm(x);
  if (ng == 0) return -kInf;
  return std::min<real>(0, std::log(ng) / 2);
}

namespace {

AnalyticFn hyperplane_function(const ProjCurve& c, const Hyperplane& H) {
  auto a = H.normal;
  return {[c, a](cplx z) {
            auto v = c.jet(z, 0)[0];
            Scaled s;
            for (size_t j = 0; j < v.size(); ++j) s = s + v[j] * a[j];
            return s;
          },
          [c, a](cplx z) {
            auto v = c.jet(z, 1)[1];
            Scaled s;
            for (size_t j = 0; j < v.size(); ++j) s = s + v[j] * a[j];
            return s;
          }};
}

void check_not_in_hyperplane(const ProjCurve& c, const Hyperplane& H) {
  if (c.is_polynomial()) {
    const auto& ps = c.polynomials();
    int deg = 0;
    for (const auto& p : ps) deg = std::max(deg, p.degree());
    real worst = 0, scale = 0;
    for (int d = 0; d <= deg; ++d) {
      cplx s(0);
      for (size_t j = 0; j < ps.size(); ++j) {
        cplx cf = ps[j].coeff(d).to_cplx();
        s += H.normal[j] * cf;
        scale = std::max(scale, std::abs(cf));
      }
      worst = std::max(worst, std::abs(s));
    }
    if (worst <= 1e-15L * scale) fail(ErrorKind::ImageInHyperplane, "the curve lies in a hyperplane");
    return;
  }
  AnalyticFn h = hyperplane_function(c, H);
  real rho = c.disc().is_plane() ? real(0.5) : c.disc().radius / 4;
  for (int i = 0; i < 32; ++i) {
    cplx z = std::polar(rho * (0.5L + real(i % 4) / 8), kTwoPi * i / 32 + 0.1L);
    Scaled v = h.value(z);
    if (!v.is_zero() && v.logmag > log_norm(c.eval(z)) + std::log(1e-14L)) return;
  }
  fail(ErrorKind::ImageInHyperplane, "the curve lies in a hyperplane");
}

// Zeros of a . f up to rmax (the hyperplane's preimage divisor).
PreimageSet hyperplane_preimages(const ProjCurve& c, const Hyperplane& H, real rmax) {
  return PreimageSet(hyperplane_function(c, H), rmax, c.disc().radius, true);
}

}  // namespace

real proximity_fk(const ProjCurve& c, int k, real r, const Hyperplane& H) {
  require_k(c, k);
  if (static_cast<int>(H.normal.size()) != c.n() + 1) fail(ErrorKind::PreconditionViolation, "dimension mismatch");
  if (!(r > 0 && r < c.disc().radius)) fail(ErrorKind::DomainViolation, "radius outside the disc");
  std::vector<real> hints;
  if (k == 0) {
    check_not_in_hyperplane(c, H);
    hints = hyperplane_preimages(c, H, r).hints(r);
  }
  real tol = hints.empty() ? kTolSmooth : kTolSingular;
  CircleIntegrand ci{[&](real th) {
                       cplx z = std::polar(r, th);
                       auto w = wedge_at(c, k, z);
                       if (std::isinf(log_norm(w))) w = wedge_at(c, k, stationary_offset(c.disc(), z));
                       return -log_hyperplane_distance(w, k, H);
                     },
                     hints};
  real v = circle_average(ci, tol, curve_circle_options(c, r));
  if (!std::isfinite(v)) fail(ErrorKind::SingularAverage, "the curve meets the hyperplane on the circle");
  return v;
}

int numeric_rank(const std::vector<std::vector<cplx>>& vecs, real threshold) {
  if (vecs.empty()) return 0;
  CMat m(vecs.size(), vecs.front().size());
  for (size_t i = 0; i < vecs.size(); ++i)
    for (size_t j = 0; j < vecs[i].size(); ++j) m(i, j) = vecs[i][j];
  Eigen::JacobiSVD<CMat> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > threshold * sv(0)) ++r;
  return r;
}

HyperplaneSums hyperplane_sums(const ProjCurve& c, const std::vector<Hyperplane>& hyperplanes,
                               const std::vector<std::vector<int>>& subsets, const RadialGrid& grid) {
  const int q = static_cast<int>(hyperplanes.size());
  const size_t N = grid.size();
  HyperplaneSums out;
  if (N == 0) return out;
  const real rmax = grid.radii.back();
  std::vector<PreimageSet> pre;
  for (int j = 0; j < q; ++j) pre.push_back(hyperplane_preimages(c, hyperplanes[j], rmax));
  out.m.assign(q, std::vector<real>(N));
  out.N.assign(q, std::vector<real>(N));
  out.max_sum.assign(N, 0);
  parallel_for(N, [&](size_t i) {
    const real r = grid.radii[i];
    std::vector<real> hints;
    for (const auto& p : pre) {
      auto h = p.hints(r);
      hints.insert(hints.end(), h.begin(), h.end());
    }
    std::sort(hints.begin(), hints.end());
    real tol = hints.empty() ? kTolSmooth : kTolSingular;
    auto logs_at = [&](real th) {
      auto w = c.eval(std::polar(r, th));
      std::vector<real> v(q);
      for (int j = 0; j < q; ++j) v[j] = -log_hyperplane_distance(w, 0, hyperplanes[j]);
      return v;
    };
    for (int j = 0; j < q; ++j) {
      CircleIntegrand ci{[&](real th) { return -log_hyperplane_distance(c.eval(std::polar(r, th)), 0, hyperplanes[j]); },
                         pre[j].hints(r)};
      out.m[j][i] = circle_average(ci, ci.hints.empty() ? kTolSmooth : kTolSingular, curve_circle_options(c, r));
      out.N[j][i] = pre[j].counting(r);
    }
    CircleIntegrand ci{[&](real th) {
                         auto v = logs_at(th);
                         real best = -kInf;
                         for (const auto& S : subsets) {
                           real s = 0;
                           for (int j : S) s += v[j];
                           best = std::max(best, s);
                         }
                         return best;
                       },
                       hints};
    out.max_sum[i] = circle_average(ci, tol, curve_circle_options(c, r));
    if (!std::isfinite(out.max_sum[i])) fail(ErrorKind::SingularAverage, "the curve meets a hyperplane on the circle");
  });
  return out;
}

std::vector<real> wronskian_counting(const ProjCurve& c, const RadialGrid& grid) {
  std::vector<real> out(grid.size(), 0);
  if (grid.size() == 0) return out;
  const real rmax = grid.radii.back();
  if (c.is_polynomial()) {
    Poly W = exact_fk(c, c.n())->full.at(0);
    PreimageSet ws(poly_function(W), rmax, c.disc().radius, true);
    for (size_t i = 0; i < grid.size(); ++i) out[i] = ws.counting(grid.radii[i]);
  } else {
    FkDivisor wd(c, c.n(), rmax);
    for (size_t i = 0; i < grid.size(); ++i) out[i] = wd.counting(grid.radii[i]);
  }
  return out;
}

real resolve_growth_index(const ProjCurve& c, const RadialGrid& grid, const std::vector<real>& T,
                          std::optional<real> growth) {
  real cval = 0;
  if (growth) {
    cval = *growth;
  } else if (!c.disc().is_plane()) {
    try {
      cval = growth_index_from_values(grid, T).c_est;
    } catch (const Error& e) {
      fail(ErrorKind::MissingC, std::string("growth index unavailable: ") + e.what());
    }
  }
  if (!std::isfinite(cval)) fail(ErrorKind::MissingC, "growth index is infinite");
  return cval;
}

bool image_in_hyperplane(const ProjCurve& c, const Hyperplane& H) {
  try {
    check_not_in_hyperplane(c, H);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ImageInHyperplane) return true;
    throw;
  }
  return false;
}

// ---------- Cartan SMT ----------

NevanlinnaTable cartan_smt_report(const ProjCurve& c, const std::vector<Hyperplane>& hyperplanes,
                                  const RadialGrid& grid, real eps, std::optional<real> growth) {
  const int n = c.n();
  const int q = static_cast<int>(hyperplanes.size());
  if (n > 4 || q > 10) fail(ErrorKind::PreconditionViolation, "max-over-K enumeration is limited to n <= 4, q <= 10");
  if (q == 0) fail(ErrorKind::PreconditionViolation, "no hyperplanes");
  if (grid.size() < 3) fail(ErrorKind::GridTooCoarse, "report needs at least three radii");
  for (const auto& H : hyperplanes)
    if (static_cast<int>(H.normal.size()) != n + 1) fail(ErrorKind::PreconditionViolation, "dimension mismatch");
  if (!c.nondegenerate()) fail(ErrorKind::DegenerateCurve, "curve is linearly degenerate");
  for (const auto& H : hyperplanes) check_not_in_hyperplane(c, H);

  // Maximal independent subsets.
  std::vector<std::vector<cplx>> normals;
  for (const auto& H : hyperplanes) normals.push_back(H.normal);
  const int rank = numeric_rank(normals);
  std::vector<std::vector<int>> K;
  for (const auto& S : index_subsets(q, rank)) {
    std::vector<std::vector<cplx>> sub;
    for (int j : S) sub.push_back(normals[j]);
    if (numeric_rank(sub) == rank) K.push_back(S);
  }

  NevanlinnaTable tab;
  tab.grid = grid;
  const size_t N = grid.size();
  auto ct = characteristic_fk_table(c, 0, grid, true);
  const real cval = resolve_growth_index(c, grid, ct.T, growth);

  HyperplaneSums sums = hyperplane_sums(c, hyperplanes, K, grid);
  tab.m = sums.m;
  tab.N = sums.N;
  const std::vector<real>& lhs_m = sums.max_sum;
  std::vector<real> NW = wronskian_counting(c, grid);

  // Lambda(r) = min_k 1/T_{F_k} over 0 <= k < n.
  std::vector<real> Lambda(N, kInf);
  for (int k = 0; k < n; ++k) {
    auto tk = k == 0 ? ct : characteristic_fk_table(c, k, grid, false);
    for (size_t i = 0; i < N; ++i)
      if (tk.T[i] > 0) Lambda[i] = std::min(Lambda[i], 1 / tk.T[i]);
  }

  const real main_coeff = n + 1;
  const real err_coeff = real(n * (n + 1)) / 2;
  std::vector<real> D(N);
  tab.rows.resize(N);
  for (size_t i = 0; i < N; ++i) {
    TableRow& row = tab.rows[i];
    row.r = grid.radii[i];
    row.T = ct.T[i];
    row.T_area = ct.T_area[i];
    row.m_total = lhs_m[i];
    row.N_total = 0;
    for (int j = 0; j < q; ++j) row.N_total += tab.N[j][i];
    row.N_ram = NW[i];
    D[i] = row.m_total + row.N_ram - smt_rhs(main_coeff, err_coeff, cval, eps, row.T, row.r);
  }
  SlackFit sf = fit_slack(D, ct.T);
  for (size_t i = 0; i < N; ++i) {
    tab.rows[i].slack = sf.slack[i];
    tab.rows[i].exceptional = sf.slack[i] < 0 ? 1 : 0;
  }
  ExceptionalSummary ex = exceptional_set_measure(tab, cval, eps);

  real defect_sum = 0, ratio_sum = 0;
  for (int j = 0; j < q; ++j) {
    tab.target_labels.push_back("H" + std::to_string(j));
    DefectEstimate d = defect_from_values(tab.m[j], ct.T);
    tab.summary["defect:" + tab.target_labels.back()] = d.value;
    defect_sum += d.value;
    ratio_sum += tab.m[j].back() / ct.T.back();
  }
  tab.columns["Lambda"] = Lambda;
  tab.summary["c"] = cval;
  tab.summary["eps"] = eps;
  tab.summary["C0"] = sf.C0;
  tab.summary["C_log"] = sf.C_log;
  tab.summary["defect_sum"] = defect_sum;
  tab.summary["sum_m_over_T_last"] = ratio_sum;
  tab.summary["exceptional_count"] = static_cast<real>(ex.flagged_radii.size());
  tab.summary["exceptional_measure"] = ex.weighted_measure;
  tab.summary["min_slack"] = *std::min_element(sf.slack.begin(), sf.slack.end());
  tab.summary["cross_check_drift"] = ct.max_drift;
  tab.summary["independent_subsets"] = static_cast<real>(K.size());
  return tab;
}

// ---------- Ahlfors estimate ----------

AhlforsResult ahlfors_estimate_check(const ProjCurve& c, int k, const Hyperplane& H, real lambda,
                                     const RadialGrid& grid) {
  require_k(c, k);
  if (!(lambda > 0 && lambda < 1)) fail(ErrorKind::PreconditionViolation, "lambda must lie in (0, 1)");
  if (static_cast<int>(H.normal.size()) != c.n() + 1) fail(ErrorKind::PreconditionViolation, "dimension mismatch");
  if (grid.size() < 3) fail(ErrorKind::GridTooCoarse, "check needs at least three radii");
  check_not_in_hyperplane(c, H);
  auto phi_log = [&](int j, cplx z) {
    if (j == c.n() + 1) return -kInf;
    auto w = wedge_at(c, j, z);
    if (std::isinf(log_norm(w))) w = wedge_at(c, j, stationary_offset(c.disc(), z));
    return 2 * log_hyperplane_distance(w, j, H);
  };
  auto density = [&](cplx z) {
    real lk = phi_log(k, z), lk1 = phi_log(k + 1, z);
    if (std::isinf(lk1)) return real(0);
    real lh = log_hk(c, k, z, true);
    if (std::isinf(lh)) return real(0);
    if (std::isinf(lk)) lk = phi_log(k, stationary_offset(c.disc(), z));
    return std::exp(lk1 - (1 - lambda) * lk + lh);
  };
  auto inner = [&](real s) { return curve_circle_options(c, s); };
  auto lhs = height_integral_grid(density, grid.radii, 1e-6L, inner);
  auto T = characteristic_fk_table(c, k, grid, false).T;

  AhlforsResult res;
  const size_t n = grid.size();
  const size_t third = std::max<size_t>(1, n / 3);
  res.C = -kInf;
  for (size_t i = 0; i < third; ++i) res.C = std::max(res.C, lambda * lambda * lhs[i] - 8 * T[i]);
  res.all_ok = true;
  for (size_t i = 0; i < n; ++i) {
    AhlforsRow row;
    row.r = grid.radii[i];
    row.lhs = lhs[i];
    row.rhs = (8 * T[i] + res.C) / (lambda * lambda);
    row.ok = row.lhs <= row.rhs + 1e-9L * std::max<real>(1, std::abs(row.rhs));
    res.all_ok = res.all_ok && row.ok;
    res.rows.push_back(row);
  }
  return res;
}

// ---------- product to sum ----------

namespace {

std::vector<cplx> random_decomposable(std::mt19937_64& rng, int m, int p) {
  std::normal_distribution<double> g(0, 1);
  std::vector<std::vector<Scaled>> rows(p, std::vector<Scaled>(m));
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < m; ++j) rows[i][j] = Scaled::from(cplx(g(rng), g(rng)));
  auto w = minors(rows, p - 1, index_subsets(m, p));
  std::vector<cplx> out;
  for (const auto& x : w) out.push_back(x.value());
  return out;
}

}  // namespace

ProductToSumResult product_to_sum_check(const std::vector<Hyperplane>& hyperplanes, int k, real lambda, int samples,
                                        std::uint64_t seed) {
  const int q = static_cast<int>(hyperplanes.size());
  if (q == 0) fail(ErrorKind::PreconditionViolation, "no hyperplanes");
  const int m = static_cast<int>(hyperplanes.front().normal.size());
  const int n = m - 1;
  if (k < 0 || k > n - 1) fail(ErrorKind::PreconditionViolation, "k must lie in [0, n-1]");
  if (n - k > q) fail(ErrorKind::PreconditionViolation, "needs n - k <= q");
  if (!(lambda > 0 && lambda < 1)) fail(ErrorKind::PreconditionViolation, "lambda must lie in (0, 1)");
  if (samples < 1) fail(ErrorKind::PreconditionViolation, "samples must be positive");
  std::vector<std::vector<cplx>> normals;
  for (const auto& H : hyperplanes) normals.push_back(H.normal);
  for (const auto& S : index_subsets(q, std::min(q, m))) {
    std::vector<std::vector<cplx>> sub;
    for (int j : S) sub.push_back(normals[j]);
    if (numeric_rank(sub) != static_cast<int>(S.size()))
      fail(ErrorKind::PreconditionViolation, "hyperplanes are not in general position");
  }

  std::mt19937_64 rng(seed);
  ProductToSumResult res;
  for (int s = 0; s < 2 * samples; ++s) {
    std::vector<cplx> x;
    std::vector<real> dx(q);
    bool ok = false;
    while (!ok) {
      x = random_decomposable(rng, m, k + 1);
      ok = true;
      for (int j = 0; j < q && ok; ++j) {
        dx[j] = hyperplane_distance(x, k, hyperplanes[j]);
        ok = dx[j] > 1e-12L;
      }
    }
    auto y = random_decomposable(rng, m, k + 2);
    real prod = 1, sum = 0;
    for (int j = 0; j < q; ++j) {
      real dy = hyperplane_distance(y, k + 1, hyperplanes[j]);
      real t = dy * dy / std::pow(dx[j], 2 - 2 * lambda);
      prod *= t;
      sum += t;
    }
    real ratio = sum > 0 ? prod / std::pow(sum, n - k) : 0;
    if (s < samples) res.max_ratio = std::max(res.max_ratio, ratio);
    res.max_ratio_doubled = std::max(res.max_ratio_doubled, ratio);
  }
  res.stable = res.max_ratio_doubled <= 1.1L * res.max_ratio;
  return res;
}

}  // namespace nevlab
