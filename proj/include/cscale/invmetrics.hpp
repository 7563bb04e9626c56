#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cscale/geometry.hpp"

namespace cscale {

enum class MetricMethod { ClosedForm, Sandwich };
const char* to_string(MetricMethod m);

struct MetricValue {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  MetricMethod method = MetricMethod::ClosedForm;

  static MetricValue exact(double v) { return {v, v, v, MetricMethod::ClosedForm}; }
};

/// Kobayashi (= Caratheodory) metric of the unit ball scaled to radius R.
double ball_metric(const CVec& q, const CVec& xi, double radius = 1.0);
/// max_j |xi_j| / (R (1 - |q_j/R|^2)).
double polydisc_metric(const CVec& q, const CVec& xi, double radius = 1.0);
/// max_j |xi_j| / (2 Re q_j) on the product of right half-planes.
double halfplane_product_metric(const CVec& q, const CVec& xi);
/// Pullback of the ball metric through the Cayley transform.
double siegel_metric(const CVec& q, const CVec& xi);

bool has_closed_form(const DefiningFunction& rho);

/// Closed forms for ball, disc, bidisc, halfspace (half-plane times C^{d-1}) and siegel.
MetricValue kobayashi_closed_form(const DefiningFunction& rho, const CVec& q, const CVec& xi);

struct SandwichOptions {
  int fan = 64;
  double max_ray = 1e6;
};

/// Certified lower bound for the Caratheodory metric of a convex domain:
/// supporting half-planes at boundary points of a golden-angle fan of rays
/// from q, plus linear-functional disc bounds where the support radius is known.
double caratheodory_halfspace_lower(const DefiningFunction& rho, const CVec& q, const CVec& xi,
                                    const SandwichOptions& opts = {});

/// |xi| / R for the largest disc q + zeta xi/|xi|, |zeta| < R, inside a convex domain.
double kobayashi_linear_disc_upper(const DefiningFunction& rho, const CVec& q, const CVec& xi,
                                   const SandwichOptions& opts = {});

MetricValue kobayashi_sandwich(const DefiningFunction& rho, const CVec& q, const CVec& xi,
                               const SandwichOptions& opts = {});

/// Closed form when available, otherwise the sandwich midpoint.
MetricValue kobayashi_metric(const DefiningFunction& rho, const CVec& q, const CVec& xi);

// ------------------------------------------------------------ harnesses

struct NearestPoint {
  CVec point;
  double distance = 0.0;
};

/// Nearest boundary point by projected Newton from several starts; throws
/// AmbiguousNearestPoint when distinct minimizers agree in distance to `tol`.
NearestPoint nearest_boundary_point(const DefiningFunction& rho, const CVec& q, double tol = 1e-8);

struct AsymptoticsRow {
  double t = 0.0;
  double d = 0.0;
  double xi_normal = 0.0;        // |xi_N|
  double levi_tangential = 0.0;  // normalized Levi value L(xi_T, xi_T)
  double F = 0.0;
  double F_lower = 0.0;
  double F_upper = 0.0;
  double dF = 0.0;
  double sqrt_dF = 0.0;
  double lee_ratio = 0.0;
};

struct AsymptoticsReport {
  std::string harness;  // graham or lee
  std::string fitted_quantity;  // dF, sqrt_dF or lee_ratio
  std::string method;
  std::vector<AsymptoticsRow> rows;
  double fitted_limit = 0.0;
  double target = 0.0;
  std::optional<double> half_levi;  // L(xi_T, xi_T) / 2, tangential runs only
  double tolerance = 0.0;
  bool pass = false;

  std::string verdict() const { return pass ? "pass" : "fail"; }
  std::string to_csv() const;
};

nlohmann::json to_json(const AsymptoticsReport& r);

/// Richardson extrapolation to t -> 0 (two levels) over the tail of (t, v).
double richardson_limit(const std::vector<double>& t, const std::vector<double>& v, int levels = 2);

/// Dyadic list 2^-k_min ... 2^-k_max.
std::vector<double> dyadic_list(int k_min, int k_max);

/// Rows along q_t = p - t n(p). Fits d F when xi has a normal component,
/// otherwise sqrt(d) F; targets |xi_N|/2 and sqrt(L(xi_T, xi_T)).
AsymptoticsReport graham_asymptotics(const DefiningFunction& rho, const CVec& p, const CVec& xi,
                                     const std::vector<double>& t_list, double tolerance = 1e-3);

/// Lee's ratio at each q; fitted limit is the value at the last q.
AsymptoticsReport lee_ratio(const DefiningFunction& rho, const CVec& p, const CVec& xi,
                            const std::vector<CVec>& q_list, double tolerance = 2e-2);

/// Single Lee ratio evaluation at q.
AsymptoticsRow lee_row(const DefiningFunction& rho, const CVec& q, const CVec& xi);

}  // namespace cscale
