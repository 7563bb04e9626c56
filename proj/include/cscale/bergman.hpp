#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cscale/types.hpp"

namespace cscale {

struct BergmanDomain {
  std::string tag = "disc";  // disc, ball, bidisc, egg
  int dim = 1;
  int k = 2;            // egg exponent
  double radius = 1.0;  // disc, ball, bidisc
};

/// Orthogonal monomial basis z^alpha, |alpha|_inf <= trunc, with squared norms.
struct MonomialKernel {
  BergmanDomain domain;
  int trunc = 0;
  std::vector<std::vector<int>> alphas;
  std::vector<double> norms;  // c_alpha
  double volume = 0.0;        // c_0
  int max_panels = 0;         // largest panel count used by the radial quadrature
  double rel_tol = 1e-12;

  std::size_t size() const { return alphas.size(); }
  std::string to_csv() const;
};

MonomialKernel monomial_norms(const BergmanDomain& domain, int trunc, double rel_tol = 1e-12);

/// Whether the point lies inside the Reinhardt domain.
bool bergman_domain_contains(const BergmanDomain& domain, const CVec& z);

struct KernelValue {
  cd value;
  double tail = 0.0;  // geometric estimate of the omitted part, relative to |value|
};

/// Truncated series sum_alpha z^alpha conj(w)^alpha / c_alpha. Throws
/// Truncation when the tail estimate exceeds tail_tol.
KernelValue bergman_kernel_checked(const MonomialKernel& kern, const CVec& z, const CVec& w,
                                   double tail_tol = 1e-8);
cd bergman_kernel(const MonomialKernel& kern, const CVec& z, const CVec& w, double tail_tol = 1e-8);

/// g_jk = d^2 log K(z, z) / dz_j dzbar_k at q.
CMat bergman_metric(const MonomialKernel& kern, const CVec& q, double tail_tol = 1e-8);

struct CurvatureOptions {
  double sensitivity_tol = 1e-4;
  int sensitivity_step = 4;
  bool enforce = true;  // throw Truncation when the sensitivity test fails
  double tail_tol = 1e-8;
};

struct CurvatureReport {
  CVec point;
  CVec direction;
  double metric_value = 0.0;  // g(xi, xi)
  double curvature = 0.0;
  double curvature_lower_trunc = 0.0;
  int trunc = 0;
  double sensitivity = 0.0;
  bool accepted = false;
};

nlohmann::json to_json(const CurvatureReport& r);

/// Holomorphic sectional curvature of the Bergman metric, normalized so that
/// the unit disc gives -2.
CurvatureReport sectional_curvature(const MonomialKernel& kern, const CVec& q, const CVec& xi,
                                    const CurvatureOptions& opts = {});

struct KlembeckRow {
  double t = 0.0;
  CVec point;
  double curvature = 0.0;
  double sensitivity = 0.0;
  bool accepted = false;
  std::string note;
};

struct KlembeckReport {
  BergmanDomain domain;
  CVec boundary_point;
  CVec direction;
  int trunc = 0;
  std::vector<KlembeckRow> rows;
  double target = 0.0;  // -4/(d+1)
  double fitted_limit = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  std::string verdict() const { return pass ? "pass" : "fail"; }
  std::string to_csv() const;
};

nlohmann::json to_json(const KlembeckReport& r);

/// Curvature along q_t = p - t n(p). Rows failing the truncation test are kept
/// but flagged; the fitted limit extrapolates the accepted rows to t = 0.
KlembeckReport klembeck_harness(const BergmanDomain& domain, const CVec& p, const std::vector<double>& t_list,
                                const CVec& xi, int trunc, double tolerance, const CurvatureOptions& opts = {});

}  // namespace cscale
