#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cscale/maps.hpp"
#include "cscale/poly.hpp"
#include "cscale/types.hpp"

namespace cscale {

struct DomainTraits {
  bool convex = false;
  bool bounded = false;
  /// Invariant under z -> e^{i t} z; linear images of the domain in C are
  /// then discs centered at 0.
  bool circular = false;
  /// Complete Reinhardt: invariant under independent rotations of each
  /// coordinate, monomials are orthogonal.
  bool reinhardt = false;
};

/// Smooth real function rho with the domain {rho < 0}. Derivatives are the
/// Wirtinger ones: gradient_j = d rho / d z_j, hessian_jk = d^2 rho / dz_j dzbar_k,
/// holomorphic_hessian_jk = d^2 rho / dz_j dz_k.
class DefiningFunction {
 public:
  using ValueFn = std::function<double(const CVec&)>;
  using VecFn = std::function<CVec(const CVec&)>;
  using MatFn = std::function<CMat(const CVec&)>;
  /// sup over the domain of |<z, u>| for a unit vector u.
  using SupportFn = std::function<double(const CVec&)>;

  struct Evaluators {
    ValueFn value;
    VecFn gradient;
    MatFn hessian;
    std::optional<MatFn> holomorphic_hessian;
  };

  DefiningFunction() = default;

  static DefiningFunction from_polynomial(RealPoly poly, std::string tag,
                                          std::vector<double> params = {},
                                          DomainTraits traits = {});
  static DefiningFunction from_evaluators(int dim, Evaluators ev, std::string tag,
                                          std::vector<double> params = {},
                                          DomainTraits traits = {});

  int dim() const;
  const std::string& tag() const;
  const std::vector<double>& params() const;
  const DomainTraits& traits() const;

  double operator()(const CVec& z) const;
  CVec gradient(const CVec& z) const;
  CMat hessian(const CVec& z) const;
  bool has_holomorphic_hessian() const;
  CMat holomorphic_hessian(const CVec& z) const;
  /// Non-null for polynomial-backed functions.
  const RealPoly* polynomial() const;

  /// Euclidean length of the real gradient, equal to 2 |d rho / dz|.
  double real_gradient_norm(const CVec& z) const { return 2.0 * gradient(z).norm(); }
  /// Unit outward normal as a vector of C^d: conj(grad) / |grad|.
  CVec outward_normal(const CVec& z) const;
  bool contains(const CVec& z) const { return (*this)(z) < 0.0; }

  std::optional<double> support_radius(const CVec& unit) const;
  DefiningFunction with_support(SupportFn fn) const;
  /// c * rho for c > 0 (same domain).
  DefiningFunction scaled(double c) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

struct CatalogParams {
  int dim = 2;
  int k = 1;       // egg exponent
  int m = 1;       // Bedford-Pinchuk model exponent
  double radius = 1.0;
};

/// Names: ball, disc, bidisc, egg, siegel, halfspace, kohn_nirenberg, bp_model.
/// Coordinates for the two-variable models are ordered (normal, tangential):
/// egg {|z0|^2 + |z1|^{2k} < 1}, bp_model {Re z0 > |z1|^{2m}},
/// kohn_nirenberg {Re z0 + |z0 z1|^2 + |z1|^8 + 15/7 |z1|^2 Re z1^6 < 0}.
DefiningFunction make_catalog_domain(const std::string& name, const CatalogParams& params = {});
std::vector<std::string> catalog_names();

/// rho o G for a holomorphic map G. Uses exact polynomial composition when
/// rho is polynomial and `polys` is given, otherwise the chain rule
/// (holomorphic Hessian is then unavailable).
DefiningFunction pullback(const DefiningFunction& rho, const HoloMap& map,
                          const std::vector<HoloPoly>* polys = nullptr);

/// Newton steps along the real gradient until rho(y) ~ 0.
CVec project_to_boundary(const DefiningFunction& rho, CVec y);

/// Critical point of |x - y| on {rho = 0} reached from `start` by alternating
/// tangent-plane projection of x and Newton projection.
CVec boundary_foot_point(const DefiningFunction& rho, const CVec& x, const CVec& start, int max_iter = 200);

/// Smallest s in (0, max_s] with rho(q + s u) >= 0 for interior q; empty if none.
std::optional<double> ray_exit(const DefiningFunction& rho, const CVec& q, const CVec& u, double max_s = 1e6);

// ------------------------------------------------------------------ Levi form

enum class LeviClass { StronglyPseudoconvex, WeaklyPseudoconvex, NotPseudoconvex, LeviFlat };
const char* to_string(LeviClass c);

struct LeviOptions {
  double boundary_tol = kBoundaryTol;
  double eigen_tol = kEigenTol;
  /// Divide rho by |grad rho(p)| (real gradient) before forming the Levi matrix.
  bool normalize = false;
  /// A vanishing Levi form is reported levi_flat only when it also vanishes at
  /// boundary points within this distance; otherwise weakly_pseudoconvex.
  double flat_probe_radius = 0.05;
};

struct LeviReport {
  CVec point;
  CVec gradient;
  CMat tangent_basis;  // d x (d-1), orthonormal columns
  CMat levi_matrix;    // (d-1) x (d-1) Hermitian, w^H L w convention
  RVec eigenvalues;    // ascending
  LeviClass classification = LeviClass::LeviFlat;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  bool normalized = false;
  double normalization = 1.0;  // factor rho was divided by
};

/// Levi form sum H_jk w_j conj(w_k) written as w^H (H^T) w.
CMat levi_hermitian(const CMat& complex_hessian);

/// Orthonormal basis of {w : sum_j g_j w_j = 0}.
CMat complex_tangent_basis(const CVec& gradient);

LeviReport levi_classify(const DefiningFunction& rho, const CVec& p, const LeviOptions& opts = {});

// ------------------------------------------------------- convex normal form

struct NormalForm {
  CVec base_point;
  /// z = chart(w): p + U (w0 + w^T Q w, beta w0 + M w'), a holomorphic polynomial map.
  HoloMap chart;
  std::vector<HoloPoly> chart_polys;
  /// Linear part of the chart (w -> z - p); its inverse is the affine part of Psi.
  AffineMap chart_linear;
  AffineMap psi_affine;
  CMat quadratic;             // Q
  double rescale = 1.0;       // rho divided by this
  double square_weight = 0.0; // K in rho/N + K (rho/N)^2
  DefiningFunction normalized;  // rho~(w), second-order part -Re w0 + |w|^2
  double radius = 0.0;
  double max_residual_ratio = 0.0;  // max |rho~ - model| / |w|^2 on the sample
};

/// Max of |rho~(w) - (-Re w0 + |w|^2)| / |w|^2 over deterministic samples in B(0, 2r).
double normal_form_residual_ratio(const DefiningFunction& normalized, double r,
                                  int samples = 400, unsigned seed = 7);

NormalForm convex_normal_form(const DefiningFunction& rho, const CVec& p,
                              const LeviOptions& opts = {});

// ---------------------------------------------------------- order of contact

struct ContactSearch {
  int max_p = 16;
  int max_q = 16;
  int phases = 8;
  /// Jet truncation; 0 picks 4 * max(max_p, max_q) + 8.
  int jet_order = 0;
  double coefficient_tol = 1e-11;
};

struct ContactCurve {
  int p = 0;  // exponent of coordinate 0 (0: coordinate held fixed)
  int q = 0;  // exponent of coordinate 1
  cd a = 0.0;
  cd b = 0.0;
};

struct ContactReport {
  CVec point;
  ContactSearch search;
  ContactCurve best;
  int vanishing_order = 0;
  std::optional<int> finite_type;  // empty: exceeds search bound
  int jet_order = 0;
  int curves_tested = 0;
  std::string limitation;
};

/// Jet of t -> rho(p + (a t^P, b t^Q)).
CurveJet contact_jet(const DefiningFunction& rho, const CVec& p, const ContactCurve& curve,
                     int order);

ContactReport order_of_contact(const DefiningFunction& rho, const CVec& p,
                               const ContactSearch& search = {},
                               double boundary_tol = kBoundaryTol);

// --------------------------------------------------------------- reports

nlohmann::json complex_to_json(const CVec& v);
nlohmann::json complex_to_json(const CMat& m);
nlohmann::json to_json(const LeviReport& r);
nlohmann::json to_json(const ContactReport& r);

}  // namespace cscale
