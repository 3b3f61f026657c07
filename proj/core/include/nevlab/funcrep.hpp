#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nevlab/exact.hpp"
#include "nevlab/scaled.hpp"
#include "nevlab/types.hpp"

namespace nevlab {

struct Disc {
  real radius = kInf;
  Disc() = default;
  explicit Disc(real r);
  bool is_plane() const { return std::isinf(radius); }
  bool contains(cplx z) const { return std::abs(z) < radius; }
};

// u0, u1 and their first derivatives for the projective representation [u0 : u1].
struct ProjJet {
  Scaled u0, u1, d0, d1;
  // log |u0 u1' - u1 u0'|
  Scaled wronskian() const { return u0 * d1 - u1 * d0; }
};

class MapBody;
using BodyPtr = std::shared_ptr<const MapBody>;

class MapBody {
 public:
  virtual ~MapBody() = default;
  // Holomorphic representation [u0 : u1]; u0 = 1 for holomorphic bodies.
  virtual P1Value eval_projective(cplx z) const = 0;
  virtual ProjJet eval_jet(cplx z) const;
  virtual BodyPtr derivative() const = 0;
  virtual std::string describe() const = 0;
  virtual bool has_poles() const { return false; }
  // Structural facts used in place of contour certification where sampling is unreliable.
  virtual bool omits(const P1Point&) const { return false; }
  virtual bool locally_injective() const { return false; }
  // Holomorphic function whose zeros are f^{-1}(a), in the same representation.
  virtual Scaled target_value(cplx z, const P1Point& a) const;
  // Derivative of target_value.
  virtual Scaled target_derivative(cplx z, const P1Point& a) const;
  // Memoized derivative().
  BodyPtr first_derivative() const;

 private:
  mutable std::once_flag once_;
  mutable BodyPtr cached_;
};

class HoloMap {
 public:
  HoloMap() = default;
  HoloMap(BodyPtr body, Disc disc);

  cplx eval(cplx z) const;
  Scaled eval_scaled(cplx z) const;
  P1Value eval_projective(cplx z) const;
  ProjJet eval_jet(cplx z) const;
  Scaled target_value(cplx z, const P1Point& a) const;
  Scaled target_derivative(cplx z, const P1Point& a) const;
  HoloMap derivative(int order = 1) const;
  // c * f, exact for rational bodies.
  HoloMap scaled(cplx c) const;

  const Disc& disc() const { return disc_; }
  const MapBody& body() const { return *body_; }
  const BodyPtr& body_ptr() const { return body_; }
  bool has_poles() const { return body_->has_poles(); }
  bool omits(const P1Point& a) const { return body_->omits(a); }
  bool locally_injective() const { return body_->locally_injective(); }
  // (numerator, denominator) for rational bodies.
  std::optional<std::pair<Poly, Poly>> rational_parts() const;
  std::string describe() const { return body_->describe(); }

 private:
  void check_domain(cplx z) const;
  BodyPtr body_;
  Disc disc_;
};

// Constructors for bodies.
HoloMap make_rational(const Poly& num, const Poly& den, Disc disc = Disc());
HoloMap make_polynomial(const Poly& p, Disc disc = Disc());
HoloMap make_exp(cplx scale = 1, cplx rate = 1);
// Power series sum a_n z^n; tail(N, r) bounds sum_{n>=N} |a_n| r^n.
HoloMap make_series(std::function<cplx(long)> coeff, std::function<real(long, real)> tail,
                    real convergence_radius, Disc disc, std::string name);
HoloMap make_lambda();
HoloMap make_linear_combination(const std::vector<std::pair<cplx, HoloMap>>& terms);
HoloMap make_product(const HoloMap& f, const HoloMap& g);

// Modular lambda internals, exposed for tests.
namespace lambda_detail {
cplx cayley(cplx z);
// lambda(tau) as a homogeneous pair; tau in the upper half plane.
P1Value lambda_tau(cplx tau);
// lambda'(tau) as Scaled.
Scaled lambda_tau_derivative(cplx tau);
// Reference values by direct theta quotient, no reduction.
cplx lambda_direct(cplx tau, int terms);
}  // namespace lambda_detail

struct TargetGeometry {
  enum class Kind { P1FubiniStudy, PnFubiniStudy, TorusFlat, PoincarePullback };
  Kind kind = Kind::P1FubiniStudy;
  int n = 1;
  // Torus lattice in reduced form: Im(tau) > 0, |Re tau| <= 1/2, |tau| >= 1, tau = omega2/omega1.
  cplx omega1{1, 0}, omega2{0, 1};
  real cell_area = 1;
  // Source density of the pulled-back form for Poincare-pullback geometry.
  std::function<real(cplx)> source_density;

  static TargetGeometry p1();
  static TargetGeometry pn(int n);
  static TargetGeometry torus(cplx omega1, cplx omega2);
  static TargetGeometry poincare_pullback(std::function<real(cplx)> density);
  std::string kind_name() const;
};

// Mean-zero lattice Green function g with g(w) ~ -log|w| at lattice points.
real torus_green(const TargetGeometry& g, cplx w);

using Params = std::map<std::string, std::string>;

struct GalleryEntry {
  std::string name;
  std::string domain;  // "inf" or "1"
  std::string geometry;
  std::vector<std::string> params;
  std::string description;
};

const std::vector<GalleryEntry>& map_gallery_manifest();
std::pair<HoloMap, TargetGeometry> gallery(const std::string& name, const Params& params = {});

// Coefficient list "c0, c1, ..." in ascending order.
Poly parse_poly(const std::string& list);

}  // namespace nevlab
