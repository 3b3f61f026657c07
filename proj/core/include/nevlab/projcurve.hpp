#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nevlab/funcrep.hpp"
#include "nevlab/nevan.hpp"
#include "nevlab/table.hpp"
#include "nevlab/zeros.hpp"

namespace nevlab {

struct Hyperplane {
  std::vector<cplx> normal;  // unit norm
  Hyperplane() = default;
  explicit Hyperplane(std::vector<cplx> a);
};

struct CurveCache;

// Holomorphic curve [f_0 : ... : f_n] on a common disc.
class ProjCurve {
 public:
  explicit ProjCurve(std::vector<HoloMap> components, std::string name = "curve");

  int n() const { return static_cast<int>(comps_.size()) - 1; }
  const Disc& disc() const { return disc_; }
  const std::vector<HoloMap>& components() const { return comps_; }
  const std::string& name() const { return name_; }
  bool is_polynomial() const { return exact_.has_value(); }
  const std::vector<Poly>& polynomials() const;
  // No common zero (exact gcd for polynomials, 32 samples otherwise).
  bool reduced() const { return reduced_; }
  // Wronskian not identically zero.
  bool nondegenerate() const;

  // d[i][j] = f_j^{(i)}(z) for i <= order.
  std::vector<std::vector<Scaled>> jet(cplx z, int order) const;
  std::vector<Scaled> eval(cplx z) const { return jet(z, 0)[0]; }
  // Lazily computed exact data shared by copies of this curve.
  CurveCache& cache() const { return *cache_; }

 private:
  const HoloMap& derivative_map(int order, int j) const;
  std::vector<HoloMap> comps_;
  std::vector<std::vector<HoloMap>> derivs_;  // derivs_[i][j], precomputed to order n + 1
  std::optional<std::vector<Poly>> exact_;
  Disc disc_;
  std::string name_;
  bool reduced_ = true;
  std::shared_ptr<CurveCache> cache_;
};

const std::vector<GalleryEntry>& curve_gallery_manifest();
ProjCurve curve_gallery(const std::string& name, const Params& params = {});

// Subsets of {0..m-1} of the given size, lexicographic.
std::vector<std::vector<int>> index_subsets(int m, int size);

struct AssociatedCurve {
  int k = 0;
  std::vector<std::vector<int>> indices;  // column subsets, lexicographic
  std::vector<HoloMap> components;
  std::optional<std::vector<Poly>> exact;
};

// F_k = f ^ f' ^ ... ^ f^(k); throws DegenerateCurve when F_k vanishes identically.
AssociatedCurve associated_curve(const ProjCurve& c, int k);

// F_k(z) in wedge coordinates. F_{-1} = (1); F_{n+1} is empty (identically zero).
std::vector<Scaled> wedge_at(const ProjCurve& c, int k, cplx z);
real log_norm(const std::vector<Scaled>& v);

// h_k = |F_{k-1}|^2 |F_{k+1}|^2 / |F_k|^4. At zeros of F_k the smooth extension is used
// (exact for polynomial curves, a 1e-7 offset toward the origin otherwise) unless fill is false.
real hk_density(const ProjCurve& c, int k, cplx z, bool fill_stationary = true);

// Common zeros of the components of F_k in |z| < rmax, with the leading behaviour at 0.
class FkDivisor {
 public:
  FkDivisor() = default;
  FkDivisor(const ProjCurve& c, int k, real rmax);
  real counting(real r) const;
  std::vector<cplx> points() const;
  int origin_multiplicity() const { return origin_; }
  // log lim |F_k(z)| / |z|^m at 0, m the origin multiplicity.
  real log_leading() const { return log_leading_; }

 private:
  std::vector<ZeroRecord> zeros_;
  int origin_ = 0;
  real log_leading_ = 0;
};

real characteristic_fk(const ProjCurve& c, int k, real r, bool cross_check = true);
// T_{F_k} on a grid; the area cross-check follows the nevan rules.
CharacteristicTable characteristic_fk_table(const ProjCurve& c, int k, const RadialGrid& grid,
                                            bool cross_check = true);
// S_k = (1/2) circle average of log h_k.
real s_k(const ProjCurve& c, int k, real r);
// N_{d_k}: zeros of h_k.
real n_dk(const ProjCurve& c, int k, real r);
// N_{d_k} + T_{F_{k-1}} - 2 T_{F_k} + T_{F_{k+1}} - S_k; requires 0 <= k < n.
real plucker_residual(const ProjCurve& c, int k, real r);

// Interior product xi | a for xi in Lambda^{k+1} C^{n+1}; the result lies in Lambda^k.
std::vector<cplx> interior_product(const std::vector<cplx>& xi, int k, const std::vector<cplx>& a);
// |x; H| in [0, 1] for x in P(Lambda^{k+1} C^{n+1}).
real hyperplane_distance(const std::vector<cplx>& xi, int k, const Hyperplane& H);
real log_hyperplane_distance(const std::vector<Scaled>& xi, int k, const Hyperplane& H);
real proximity_fk(const ProjCurve& c, int k, real r, const Hyperplane& H);

// Rank of a set of vectors (SVD, relative threshold).
int numeric_rank(const std::vector<std::vector<cplx>>& vecs, real threshold = 1e-10L);

// Supplied value, 0 on the plane, else the fitted growth index of T; MissingC when unavailable or infinite.
real resolve_growth_index(const ProjCurve& c, const RadialGrid& grid, const std::vector<real>& T,
                          std::optional<real> growth);

// True when a . f vanishes identically.
bool image_in_hyperplane(const ProjCurve& c, const Hyperplane& H);

struct HyperplaneSums {
  std::vector<real> max_sum;             // circle average of max_K sum_{j in K} log 1/|f; H_j|
  std::vector<std::vector<real>> m, N;  // per hyperplane, per radius
};
HyperplaneSums hyperplane_sums(const ProjCurve& c, const std::vector<Hyperplane>& hyperplanes,
                               const std::vector<std::vector<int>>& subsets, const RadialGrid& grid);
// N_W(r, 0) for the Wronskian F_n.
std::vector<real> wronskian_counting(const ProjCurve& c, const RadialGrid& grid);

// Cartan SMT with the max over independent subsets inside the average.
NevanlinnaTable cartan_smt_report(const ProjCurve& c, const std::vector<Hyperplane>& hyperplanes,
                                  const RadialGrid& grid, real eps = 0.1L, std::optional<real> growth = {});

struct AhlforsRow {
  real r = 0, lhs = 0, rhs = 0;
  bool ok = false;
};
struct AhlforsResult {
  std::vector<AhlforsRow> rows;
  real C = 0;
  bool all_ok = false;
};
AhlforsResult ahlfors_estimate_check(const ProjCurve& c, int k, const Hyperplane& H, real lambda,
                                     const RadialGrid& grid);

struct ProductToSumResult {
  real max_ratio = 0;          // over `samples` draws
  real max_ratio_doubled = 0;  // over 2 * samples draws
  bool stable = false;         // within 10%
};
// x ranges over decomposable (k+1)-vectors, y over decomposable (k+2)-vectors.
ProductToSumResult product_to_sum_check(const std::vector<Hyperplane>& hyperplanes, int k, real lambda, int samples,
                                        std::uint64_t seed = 1);

}  // namespace nevlab
