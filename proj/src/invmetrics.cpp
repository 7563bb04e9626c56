#include "cscale/invmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>
#include <nlohmann/json.hpp>

#include "cscale/error.hpp"
#include "cscale/scaling.hpp"

namespace cscale {

const char* to_string(MetricMethod m) {
  return m == MetricMethod::ClosedForm ? "closed_form" : "sandwich";
}

double ball_metric(const CVec& q, const CVec& xi, double radius) {
  const CVec z = q / radius;
  const CVec v = xi / radius;
  const double s = 1.0 - z.squaredNorm();
  if (!(s > 0.0)) throw Error(ErrorKind::NotInterior, "point is not inside the ball");
  const double f2 = (v.squaredNorm() * s + std::norm(z.dot(v))) / (s * s);
  return std::sqrt(f2);
}

double polydisc_metric(const CVec& q, const CVec& xi, double radius) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    const double s = 1.0 - std::norm(q[j] / radius);
    if (!(s > 0.0)) throw Error(ErrorKind::NotInterior, "point is not inside the polydisc");
    best = std::max(best, std::abs(xi[j]) / (radius * s));
  }
  return best;
}

double halfplane_product_metric(const CVec& q, const CVec& xi) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    if (!(q[j].real() > 0.0)) throw Error(ErrorKind::NotInterior, "point is not inside the half-plane product");
    best = std::max(best, std::abs(xi[j]) / (2.0 * q[j].real()));
  }
  return best;
}

double siegel_metric(const CVec& q, const CVec& xi) {
  const HoloMap c = cayley_siegel_to_ball(static_cast<int>(q.size()));
  return ball_metric(c(q), CVec(c.jacobian(q) * xi));
}

bool has_closed_form(const DefiningFunction& rho) {
  const std::string& t = rho.tag();
  return t == "ball" || t == "disc" || t == "bidisc" || t == "halfspace" || t == "siegel";
}

namespace {

void check_query(const DefiningFunction& rho, const CVec& q, const CVec& xi) {
  require_point(q, rho.dim(), "point");
  require_point(xi, rho.dim(), "direction");
  if (xi.norm() == 0.0) throw Error(ErrorKind::InvalidArgument, "direction must be nonzero");
  if (!(rho(q) < 0.0)) throw Error(ErrorKind::NotInterior, "point is not interior");
}

double param_or(const DefiningFunction& rho, std::size_t i, double fallback) {
  return rho.params().size() > i ? rho.params()[i] : fallback;
}

std::vector<CVec> fan_directions(int dim, int count) {
  std::vector<CVec> out;
  if (dim == 1) {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) out.push_back(CVec::Constant(1, std::polar(1.0, k * golden)));
    return out;
  }
  const int n = 2 * dim;
  // generalized golden ratio: root of x^(n+1) = x + 1
  double phi = 2.0;
  for (int it = 0; it < 100; ++it) phi = std::pow(1.0 + phi, 1.0 / (n + 1));
  std::vector<double> alpha(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) alpha[static_cast<std::size_t>(j)] = std::fmod(std::pow(1.0 / phi, j + 1), 1.0);
  for (int k = 0; k < count; ++k) {
    CVec u(dim);
    for (int j = 0; j < dim; ++j) {
      double c[2];
      for (int r = 0; r < 2; ++r) {
        const double x = std::fmod(0.5 + (k + 1) * alpha[static_cast<std::size_t>(2 * j + r)], 1.0);
        c[r] = std::sqrt(2.0) * boost::math::erf_inv(2.0 * x - 1.0);
      }
      u[j] = cd(c[0], c[1]);
    }
    if (u.norm() > 0.0) out.push_back(u / u.norm());
  }
  return out;
}

CVec canonical_unit(const CVec& xi) {
  Eigen::Index k = 0;
  xi.cwiseAbs().maxCoeff(&k);
  const cd phase = std::polar(1.0, -std::arg(xi[k]));
  return phase * xi / xi.norm();
}

double golden_min(const std::function<double(double)>& f, double a, double b, double& argmin) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    if (f1 > f2) {
      a = x1; x1 = x2; f1 = f2; x2 = a + g * (b - a); f2 = f(x2);
    } else {
      b = x2; x2 = x1; f2 = f1; x1 = b - g * (b - a); f1 = f(x1);
    }
  }
  argmin = f1 < f2 ? x1 : x2;
  return std::min(f1, f2);
}

}  // namespace

MetricValue kobayashi_closed_form(const DefiningFunction& rho, const CVec& q, const CVec& xi) {
  check_query(rho, q, xi);
  const std::string& t = rho.tag();
  if (t == "ball" || t == "disc") return MetricValue::exact(ball_metric(q, xi, param_or(rho, 0, 1.0)));
  if (t == "bidisc") return MetricValue::exact(polydisc_metric(q, xi, param_or(rho, 0, 1.0)));
  if (t == "halfspace") return MetricValue::exact(halfplane_product_metric(q.head(1), xi.head(1)));
  if (t == "siegel") return MetricValue::exact(siegel_metric(q, xi));
  throw Error(ErrorKind::Unsupported, "no closed-form Kobayashi metric for '" + t + "'");
}

double caratheodory_halfspace_lower(const DefiningFunction& rho, const CVec& q, const CVec& xi,
                                    const SandwichOptions& opts) {
  check_query(rho, q, xi);
  if (!rho.traits().convex) throw Error(ErrorKind::NotConvex, "half-space bounds need a convex domain");
  const int d = rho.dim();
  std::vector<CVec> dirs = fan_directions(d, opts.fan);
  const CVec u0 = canonical_unit(xi);
  for (cd ph : {cd(1.0), cd(-1.0), cd(0.0, 1.0), cd(0.0, -1.0)}) dirs.push_back(ph * u0);
  double best = 0.0;
  bool any = false;
  for (const CVec& u : dirs) {
    const auto s = ray_exit(rho, q, u, opts.max_ray);
    if (!s) continue;
    const CVec y = q + *s * u;
    const CVec g = rho.gradient(y);
    const double den = std::abs((g.transpose() * (q - y))(0).real());
    if (!(den > 0.0)) continue;
    best = std::max(best, std::abs((g.transpose() * xi)(0)) / (2.0 * den));
    any = true;
  }
  // linear functionals l(z) = <z, u> map the domain into the disc of radius R(u)
  std::vector<CVec> funcs = dirs;
  for (int j = 0; j < d; ++j) funcs.push_back(CVec::Unit(d, j));
  if (q.norm() > 0.0) funcs.push_back(q / q.norm());
  for (const CVec& u : funcs) {
    const auto r = rho.support_radius(u);
    if (!r) break;
    const double lq = std::abs(u.dot(q));
    if (!(lq < *r)) continue;
    best = std::max(best, std::abs(u.dot(xi)) * *r / (*r * *r - lq * lq));
    any = true;
  }
  if (!any) throw Error(ErrorKind::SearchFailed, "no supporting half-space found");
  return best;
}

double kobayashi_linear_disc_upper(const DefiningFunction& rho, const CVec& q, const CVec& xi,
                                   const SandwichOptions& opts) {
  check_query(rho, q, xi);
  if (!rho.traits().convex) throw Error(ErrorKind::NotConvex, "linear disc bound needs a convex domain");
  const CVec u0 = canonical_unit(xi);
  const double inf = std::numeric_limits<double>::infinity();
  auto radius = [&](double theta) {
    const auto s = ray_exit(rho, q, CVec(std::polar(1.0, theta) * u0), opts.max_ray);
    return s ? *s : inf;
  };
  const int n = std::max(8, opts.fan);
  const double h = 2.0 * kPi / n;
  double best = inf, best_theta = 0.0;
  for (int k = 0; k < n; ++k) {
    const double r = radius(k * h);
    if (r < best) {
      best = r;
      best_theta = k * h;
    }
  }
  if (!std::isfinite(best)) return 0.0;
  double arg = 0.0;
  best = std::min(best, golden_min(radius, best_theta - h, best_theta + h, arg));
  return xi.norm() / best;
}

MetricValue kobayashi_sandwich(const DefiningFunction& rho, const CVec& q, const CVec& xi,
                               const SandwichOptions& opts) {
  MetricValue v;
  v.method = MetricMethod::Sandwich;
  v.lower = caratheodory_halfspace_lower(rho, q, xi, opts);
  v.upper = kobayashi_linear_disc_upper(rho, q, xi, opts);
  v.value = 0.5 * (v.lower + v.upper);
  return v;
}

MetricValue kobayashi_metric(const DefiningFunction& rho, const CVec& q, const CVec& xi) {
  if (has_closed_form(rho)) return kobayashi_closed_form(rho, q, xi);
  return kobayashi_sandwich(rho, q, xi);
}

// ------------------------------------------------------------ harnesses

NearestPoint nearest_boundary_point(const DefiningFunction& rho, const CVec& q, double tol) {
  require_point(q, rho.dim(), "point");
  if (!(rho(q) < 0.0)) throw Error(ErrorKind::NotInterior, "point is not interior");
  std::vector<CVec> starts{q};
  for (const CVec& u : fan_directions(rho.dim(), 8)) {
    if (auto s = ray_exit(rho, q, u, 1e3)) starts.push_back(q + *s * u);
  }
  std::vector<NearestPoint> found;
  for (const CVec& s : starts) {
    CVec y;
    try {
      y = boundary_foot_point(rho, q, s);
    } catch (const Error&) {
      continue;
    }
    if (std::abs(rho(y)) > 1e-8) continue;
    found.push_back({y, (q - y).norm()});
  }
  if (found.empty()) throw Error(ErrorKind::SearchFailed, "nearest-point search did not converge");
  auto best = *std::min_element(found.begin(), found.end(),
                                [](const NearestPoint& a, const NearestPoint& b) { return a.distance < b.distance; });
  for (const auto& f : found) {
    if (std::abs(f.distance - best.distance) <= tol && (f.point - best.point).norm() > std::sqrt(tol)) {
      throw Error(ErrorKind::AmbiguousNearestPoint, "several boundary points realize the distance");
    }
  }
  return best;
}

AsymptoticsRow lee_row(const DefiningFunction& rho, const CVec& q, const CVec& xi) {
  if (xi.norm() == 0.0) throw Error(ErrorKind::InvalidArgument, "direction must be nonzero");
  const NearestPoint np = nearest_boundary_point(rho, q);
  const CVec g = rho.gradient(np.point);
  const CVec n = g.conjugate() / g.norm();
  const CVec xn = n.dot(xi) * n;
  const CVec xt = xi - xn;
  AsymptoticsRow row;
  row.d = np.distance;
  row.xi_normal = xn.norm();
  row.levi_tangential = (xt.adjoint() * levi_hermitian(rho.hessian(np.point)) * xt)(0).real() / (2.0 * g.norm());
  const MetricValue f = kobayashi_metric(rho, q, xi);
  row.F = f.value;
  row.F_lower = f.lower;
  row.F_upper = f.upper;
  row.dF = row.d * row.F;
  row.sqrt_dF = std::sqrt(row.d) * row.F;
  const double a = row.xi_normal / (2.0 * row.d);
  row.lee_ratio = (a * a + row.levi_tangential / row.d) / (row.F * row.F);
  return row;
}

double richardson_limit(const std::vector<double>& t, const std::vector<double>& v, int levels) {
  if (t.empty() || t.size() != v.size()) throw Error(ErrorKind::InvalidArgument, "empty extrapolation table");
  const std::size_t m = std::min(t.size(), static_cast<std::size_t>(levels) + 1);
  std::vector<double> tt(t.end() - static_cast<long>(m), t.end());
  std::vector<double> p(v.end() - static_cast<long>(m), v.end());
  // Neville's scheme evaluated at t = 0
  for (std::size_t k = 1; k < m; ++k) {
    for (std::size_t i = 0; i + k < m; ++i) {
      p[i] = (tt[i + k] * p[i] - tt[i] * p[i + 1]) / (tt[i + k] - tt[i]);
    }
  }
  return p[0];
}

std::vector<double> dyadic_list(int k_min, int k_max) {
  std::vector<double> out;
  for (int k = k_min; k <= k_max; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

AsymptoticsReport graham_asymptotics(const DefiningFunction& rho, const CVec& p, const CVec& xi,
                                     const std::vector<double>& t_list, double tolerance) {
  if (t_list.empty()) throw Error(ErrorKind::InvalidArgument, "empty t list");
  if (xi.norm() == 0.0) throw Error(ErrorKind::InvalidArgument, "direction must be nonzero");
  const LeviReport levi = levi_classify(rho, p);
  if (levi.classification != LeviClass::StronglyPseudoconvex) {
    throw Error(ErrorKind::NotStronglyPseudoconvex, "p is not strongly pseudoconvex");
  }
  const CVec n = rho.outward_normal(p);
  const CVec xn = n.dot(xi) * n;
  const CVec xt = xi - xn;
  const double levi_t = (xt.adjoint() * levi_hermitian(rho.hessian(p)) * xt)(0).real() / rho.real_gradient_norm(p);

  std::vector<double> ts = t_list;
  std::sort(ts.begin(), ts.end(), std::greater<>());
  AsymptoticsReport rep;
  rep.harness = "graham";
  rep.tolerance = tolerance;
  const bool normal = xn.norm() > 1e-12 * xi.norm();
  rep.fitted_quantity = normal ? "dF" : "sqrt_dF";
  rep.target = normal ? 0.5 * xn.norm() : std::sqrt(levi_t);
  if (!normal) rep.half_levi = 0.5 * levi_t;
  std::vector<double> tv, vv;
  for (double t : ts) {
    if (!(t > 0.0)) throw Error(ErrorKind::InvalidArgument, "t must be positive");
    const CVec q = p - t * n;
    if (!(rho(q) < 0.0)) throw Error(ErrorKind::NotInterior, "q_t left the domain (t out of chart)");
    AsymptoticsRow row = lee_row(rho, q, xi);
    row.t = t;
    rep.rows.push_back(row);
    tv.push_back(t);
    vv.push_back(normal ? row.dF : row.sqrt_dF);
  }
  rep.method = has_closed_form(rho) ? "closed_form" : "sandwich";
  rep.fitted_limit = richardson_limit(tv, vv, 2);
  rep.pass = std::abs(rep.fitted_limit - rep.target) <= tolerance;
  return rep;
}

AsymptoticsReport lee_ratio(const DefiningFunction& rho, const CVec& p, const CVec& xi,
                            const std::vector<CVec>& q_list, double tolerance) {
  if (q_list.empty()) throw Error(ErrorKind::InvalidArgument, "empty q list");
  const LeviReport levi = levi_classify(rho, p);
  if (levi.classification != LeviClass::StronglyPseudoconvex) {
    throw Error(ErrorKind::NotStronglyPseudoconvex, "p is not strongly pseudoconvex");
  }
  AsymptoticsReport rep;
  rep.harness = "lee";
  rep.fitted_quantity = "lee_ratio";
  rep.method = has_closed_form(rho) ? "closed_form" : "sandwich";
  rep.target = 1.0;
  rep.tolerance = tolerance;
  for (const CVec& q : q_list) {
    AsymptoticsRow row = lee_row(rho, q, xi);
    row.t = (q - p).norm();
    rep.rows.push_back(row);
  }
  rep.fitted_limit = rep.rows.back().lee_ratio;
  rep.pass = std::abs(rep.fitted_limit - rep.target) <= tolerance;
  return rep;
}

std::string AsymptoticsReport::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "t,d,F,dF,sqrt_dF,lee_ratio\n";
  for (const auto& r : rows) {
    out << r.t << ',' << r.d << ',' << r.F << ',' << r.dF << ',' << r.sqrt_dF << ',' << r.lee_ratio << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const AsymptoticsReport& r) {
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"t", row.t},
                    {"d", row.d},
                    {"xi_normal", row.xi_normal},
                    {"levi_tangential", row.levi_tangential},
                    {"F", row.F},
                    {"F_lower", row.F_lower},
                    {"F_upper", row.F_upper},
                    {"dF", row.dF},
                    {"sqrt_dF", row.sqrt_dF},
                    {"lee_ratio", row.lee_ratio}});
  }
  nlohmann::json j = {{"harness", r.harness},         {"fitted_quantity", r.fitted_quantity},
                      {"method", r.method},           {"rows", rows},
                      {"fitted_limit", r.fitted_limit}, {"target", r.target},
                      {"tolerance", r.tolerance},     {"verdict", r.verdict()}};
  if (r.half_levi) j["half_levi"] = *r.half_levi;
  return j;
}

}  // namespace cscale
