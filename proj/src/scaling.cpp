#include "cscale/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cscale/error.hpp"

namespace cscale {

// ------------------------------------------------------------ centering

CMat unitary_to_e0(const CVec& v) {
  const Eigen::Index d = v.size();
  const CMat vm = v;
  Eigen::HouseholderQR<CMat> qr(vm);
  CMat q = qr.householderQ() * CMat::Identity(d, d);
  const cd phase = q.col(0).dot(v);  // q0^H v, unimodular
  q.col(0) *= phase;
  return q.adjoint();
}

Centering centering_map(const DefiningFunction& rho, const CVec& q, const std::optional<CVec>& direction,
                        double chart_radius) {
  require_point(q, rho.dim(), "interior point");
  const double r0 = rho(q);
  if (!(r0 < 0.0)) throw Error(ErrorKind::NotInterior, "rho(q) = " + std::to_string(r0) + " is not negative");
  CVec n = direction ? *direction : rho.outward_normal(q);
  if (n.norm() == 0.0) throw Error(ErrorKind::InvalidArgument, "zero search direction");
  n /= n.norm();

  const auto hit = ray_exit(rho, q, n, chart_radius);
  if (!hit) {
    throw Error(ErrorKind::RootNotBracketed, "no boundary crossing within radius " + std::to_string(chart_radius));
  }
  const double s = *hit;

  Centering c;
  c.direction = n;
  c.offset = s;
  c.boundary_point = q + s * n;
  const int d = rho.dim();
  const CMat r = unitary_to_e0(-n);
  const CVec gw = r.conjugate() * rho.gradient(c.boundary_point);
  const double g0 = std::abs(gw[0]);
  if (g0 < 1e-14) throw Error(ErrorKind::DegenerateGradient, "normal component of the gradient vanishes");
  CMat cm = CMat::Identity(d, d);
  c.alpha0 = -gw[0] / g0;
  cm(0, 0) = c.alpha0;
  for (int j = 1; j < d; ++j) cm(0, j) = -gw[j] / g0;
  const CMat m = cm * r;
  c.map = AffineMap(m, -(m * c.boundary_point), "centering");
  return c;
}

// ------------------------------------------------------------ dilatation

Dilatation pinchuk_dilatation(const DefiningFunction& rho, const CVec& q, const DilatationRule& rule,
                              const std::optional<CVec>& direction) {
  Dilatation dl;
  dl.centering = centering_map(rho, q, direction);
  const AffineMap& a = dl.centering.map;
  const CVec u = a(q);
  dl.lambda0 = u[0];
  if (!(dl.lambda0.real() > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "lambda0 must have positive real part (ordering violated)");
  }
  const int d = rho.dim();
  const int n = d - 1;
  CMat l = CMat::Identity(d, d);
  l(0, 0) = 1.0 / dl.lambda0;
  if (n > 0) {
    if (rule.kind == Anisotropy::LeviNormalized) {
      const CMat j = a.matrix().inverse();
      const CVec& p = dl.centering.boundary_point;
      const double gamma = std::abs((j.transpose() * rho.gradient(p))[0]);
      const CMat jt = j.rightCols(n);
      CMat mt = jt.adjoint() * levi_hermitian(rho.hessian(p)) * jt / (2.0 * gamma);
      mt = 0.5 * (mt + mt.adjoint());
      Eigen::LLT<CMat> llt(mt);
      if (llt.info() != Eigen::Success) {
        throw Error(ErrorKind::NotStronglyPseudoconvex,
                    "Levi-normalized dilatation needs a positive Levi form; use the power rule");
      }
      const CMat nmat = CMat(llt.matrixL()).adjoint();
      l.bottomRightCorner(n, n) = nmat / std::sqrt(dl.lambda0);
    } else {
      const cd s = std::pow(dl.lambda0, rule.exponent);
      for (int k = 1; k < d; ++k) l(k, k) = 1.0 / s;
    }
  }
  AffineMap lmap(l, CVec::Zero(d), "dilatation");
  dl.map = lmap.compose(a);
  return dl;
}

// ------------------------------------------------------ automorphisms/maps

HoloMap ball_automorphism(const CVec& a) {
  const double a2 = a.squaredNorm();
  if (!(a2 < 1.0)) throw Error(ErrorKind::InvalidArgument, "ball automorphism needs |a| < 1");
  const Eigen::Index d = a.size();
  const double s = std::sqrt(1.0 - a2);
  CMat t = s * CMat::Identity(d, d);
  if (a2 > 0.0) {
    const CMat pa = a * a.adjoint() / a2;
    t = pa + s * (CMat::Identity(d, d) - pa);
  }
  HoloMap h;
  h.dim = static_cast<int>(d);
  h.eval = [a, t](const CVec& z) {
    const cd den = 1.0 - a.dot(z);  // 1 - <z, a>
    if (std::abs(den) < 1e-300) throw Error(ErrorKind::Pole, "ball automorphism pole");
    return CVec((a - t * z) / den);
  };
  h.jacobian = [a, t](const CVec& z) {
    const cd den = 1.0 - a.dot(z);
    const CVec num = a - t * z;
    return CMat((-t * den + num * a.adjoint()) / (den * den));
  };
  h.inverse = h.eval;
  h.tag = "ball_automorphism";
  return h;
}

HoloMap cayley_siegel_to_ball(int dim) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  HoloMap h;
  h.dim = dim;
  h.eval = [](const CVec& z) {
    const cd den = 1.0 + z[0];
    if (std::abs(den) < 1e-300) throw Error(ErrorKind::Pole, "Cayley transform pole at w = -1");
    CVec out(z.size());
    out[0] = (1.0 - z[0]) / den;
    for (Eigen::Index j = 1; j < z.size(); ++j) out[j] = 2.0 * z[j] / den;
    return out;
  };
  h.jacobian = [](const CVec& z) {
    const cd den = 1.0 + z[0];
    if (std::abs(den) < 1e-300) throw Error(ErrorKind::Pole, "Cayley transform pole at w = -1");
    const Eigen::Index d = z.size();
    CMat j = CMat::Zero(d, d);
    j(0, 0) = -2.0 / (den * den);
    for (Eigen::Index k = 1; k < d; ++k) {
      j(k, 0) = -2.0 * z[k] / (den * den);
      j(k, k) = 2.0 / den;
    }
    return j;
  };
  h.inverse = [](const CVec& u) {
    const cd den = 1.0 + u[0];
    if (std::abs(den) < 1e-300) throw Error(ErrorKind::Pole, "inverse Cayley transform pole at u0 = -1");
    CVec out(u.size());
    out[0] = (1.0 - u[0]) / den;
    for (Eigen::Index j = 1; j < u.size(); ++j) out[j] = u[j] / den;
    return out;
  };
  h.tag = "cayley";
  return h;
}

HoloMap bp_model_automorphisms(int m, double t, double s) {
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "model exponent m must be >= 1");
  if (!(s > 0.0)) throw Error(ErrorKind::InvalidArgument, "dilation factor s must be positive");
  const double zs = std::pow(s, 1.0 / (2.0 * m));
  CMat mat = CMat::Zero(2, 2);
  mat(0, 0) = s;
  mat(1, 1) = zs;
  CVec b = CVec::Zero(2);
  b[0] = cd(0.0, t);
  return HoloMap::from_affine(AffineMap(mat, b, "bp_model automorphism"), "bp_model_automorphism");
}

AffineMap corner_dilatation(const CVec& t) {
  const Eigen::Index d = t.size();
  CVec scale(d), shift(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(t[j].real() > 0.0)) throw Error(ErrorKind::InvalidArgument, "corner dilatation needs Re t_j > 0");
    scale[j] = 1.0 / t[j].real();
    shift[j] = cd(0.0, -t[j].imag() / t[j].real());
  }
  CMat m = scale.asDiagonal().toDenseMatrix();
  return AffineMap(m, shift, "z_j -> (z_j - i Im t_j) / Re t_j");
}

HoloMap frankel_scaling(const HoloMap& phi, const CVec& q) {
  const CMat j = phi.jacobian(q);
  Eigen::FullPivLU<CMat> lu(j);
  if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-300) {
    throw Error(ErrorKind::SingularJacobian, "dphi(q) is singular");
  }
  const CMat jinv = lu.inverse();
  const CVec base = phi(q);
  HoloMap h;
  h.dim = phi.dim;
  h.eval = [phi, jinv, base](const CVec& z) { return CVec(jinv * (phi(z) - base)); };
  h.jacobian = [phi, jinv](const CVec& z) { return CMat(jinv * phi.jacobian(z)); };
  if (phi.inverse) {
    h.inverse = [phi, j, base](const CVec& w) { return phi.apply_inverse(CVec(base + j * w)); };
  }
  h.tag = "frankel(" + phi.tag + ")";
  return h;
}

// --------------------------------------------------------------- orbits

const std::vector<std::string>& OrbitSpec::config_keys() {
  static const std::vector<std::string> keys = {
      "domain", "dim", "k", "m", "radius", "family", "base_point", "accumulation_point",
      "index_rule", "anisotropy", "exponent", "monotone_from"};
  return keys;
}

OrbitSpec OrbitSpec::from_config(const KeyValueConfig& cfg) {
  OrbitSpec o;
  o.domain = cfg.get_string("domain", o.domain);
  o.params.dim = cfg.get_int("dim", o.params.dim);
  o.params.k = cfg.get_int("k", o.params.k);
  o.params.m = cfg.get_int("m", o.params.m);
  o.params.radius = cfg.get_double("radius", o.params.radius);
  o.family = cfg.get_string("family", o.family);
  o.index_rule = cfg.get_string("index_rule", o.index_rule);
  o.monotone_from = cfg.get_int("monotone_from", o.monotone_from);
  const std::string an = cfg.get_string("anisotropy", "levi");
  if (an == "levi") {
    o.rule.kind = Anisotropy::LeviNormalized;
  } else if (an == "power") {
    o.rule.kind = Anisotropy::Power;
  } else {
    throw Error(ErrorKind::InvalidArgument, "config key 'anisotropy': expected levi or power, got '" + an + "'");
  }
  o.rule.exponent = cfg.get_double("exponent", o.rule.exponent);
  const int d = o.params.dim;
  if (auto q = cfg.get_point("base_point")) {
    o.base_point = *q;
  } else {
    o.base_point = CVec::Zero(d);
    if (o.family == "bp_dilation") o.base_point[0] = 1.0;
  }
  if (auto p = cfg.get_point("accumulation_point")) {
    o.accumulation_point = *p;
  } else {
    o.accumulation_point = CVec::Zero(d);
    if (o.family == "ball_mobius") o.accumulation_point[0] = 1.0;
  }
  if (o.base_point.size() != d || o.accumulation_point.size() != d) {
    throw Error(ErrorKind::InvalidArgument, "config key 'base_point'/'accumulation_point': dimension mismatch");
  }
  if (o.family != "ball_mobius" && o.family != "bp_dilation" && o.family != "identity") {
    throw Error(ErrorKind::InvalidArgument, "config key 'family': unknown family '" + o.family + "'");
  }
  if (o.index_rule != "dyadic" && o.index_rule != "harmonic") {
    throw Error(ErrorKind::InvalidArgument, "config key 'index_rule': unknown rule '" + o.index_rule + "'");
  }
  return o;
}

DefiningFunction OrbitSpec::domain_function() const { return make_catalog_domain(domain, params); }

double OrbitSpec::rate(int nu) const {
  if (index_rule == "harmonic") return 1.0 / (nu + 1.0);
  return std::ldexp(1.0, -nu);
}

HoloMap OrbitSpec::automorphism(int nu) const {
  const int d = static_cast<int>(base_point.size());
  if (family == "identity") return HoloMap::identity(d);
  if (family == "ball_mobius") {
    if (domain != "ball" || params.radius != 1.0) {
      throw Error(ErrorKind::Unsupported, "ball_mobius orbits act on the unit ball");
    }
    return ball_automorphism(CVec((1.0 - rate(nu)) * accumulation_point));
  }
  if (family == "bp_dilation") {
    int m = 1;
    if (domain == "bp_model") {
      m = params.m;
    } else if (domain != "siegel" || d != 2) {
      throw Error(ErrorKind::Unsupported, "bp_dilation orbits act on siegel (d = 2) or bp_model");
    }
    return bp_model_automorphisms(m, 0.0, rate(nu));
  }
  throw Error(ErrorKind::UnknownTag, "unknown orbit family '" + family + "'");
}

CVec OrbitSpec::point(int nu) const { return automorphism(nu)(base_point); }

void OrbitSpec::validate(int nu_max) const {
  const DefiningFunction rho = domain_function();
  double last = std::numeric_limits<double>::infinity();
  for (int nu = 1; nu <= nu_max; ++nu) {
    const CVec q = point(nu);
    if (!(rho(q) < 0.0)) {
      throw Error(ErrorKind::NotInterior, "orbit point " + std::to_string(nu) + " left the domain");
    }
    const double dist = (q - accumulation_point).norm();
    if (nu >= monotone_from && dist > last * (1.0 + 1e-12)) {
      throw Error(ErrorKind::InvalidArgument, "orbit does not approach the accumulation point monotonically");
    }
    if (nu >= monotone_from) last = dist;
  }
}

std::vector<ScalingStep> pinchuk_scaling_sequence(const OrbitSpec& orbit, int nu_max) {
  if (nu_max < 0 || nu_max > 10000) throw Error(ErrorKind::InvalidArgument, "nu_max must lie in [0, 10000]");
  std::vector<ScalingStep> out;
  if (nu_max == 0) return out;
  const DefiningFunction rho = orbit.domain_function();
  const CVec normal = rho.outward_normal(orbit.accumulation_point);
  for (int nu = 1; nu <= nu_max; ++nu) {
    ScalingStep st;
    st.index = nu;
    st.phi = orbit.automorphism(nu);
    st.orbit_point = st.phi(orbit.base_point);
    try {
      st.dilatation = pinchuk_dilatation(rho, st.orbit_point, orbit.rule, normal);
    } catch (const Error& e) {
      throw Error(ErrorKind::SearchFailed,
                  "orbit point " + std::to_string(nu) + " escapes the normal-form chart: " + e.what());
    }
    st.sigma = compose(HoloMap::from_affine(st.dilatation.map, "dilatation"), st.phi);
    out.push_back(std::move(st));
  }
  return out;
}

// ------------------------------------------------------------ reports

void ConvergenceReport::finalize() {
  const int w = std::max(1, window);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t from = i + 1 >= static_cast<std::size_t>(w) ? i + 1 - static_cast<std::size_t>(w) : 0;
    double sum = 0.0;
    for (std::size_t k = from; k <= i; ++k) sum += std::max(rows[k].deviation_a, rows[k].deviation_b);
    rows[i].fitted_limit = sum / static_cast<double>(i - from + 1);
  }
  fitted_limit = rows.empty() ? std::numeric_limits<double>::quiet_NaN() : rows.back().fitted_limit;
  pass = !rows.empty() && std::abs(fitted_limit - target) <= tolerance;
}

std::string ConvergenceReport::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "index,deviation_a,deviation_b,fitted_limit\n";
  for (const auto& r : rows) {
    out << r.index << ',' << r.deviation_a << ',' << r.deviation_b << ',' << r.fitted_limit << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const ConvergenceReport& r) {
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"index", row.index},
                    {"deviation_a", row.deviation_a},
                    {"deviation_b", row.deviation_b},
                    {"fitted_limit", row.fitted_limit}});
  }
  return {{"quantity", r.quantity}, {"rows", rows},           {"target", r.target},
          {"tolerance", r.tolerance}, {"window", r.window},     {"fitted_limit", r.fitted_limit},
          {"verdict", r.verdict()}};
}

// --------------------------------------------------- set convergence


double distance_to_domain(const DefiningFunction& rho, const CVec& x, int max_iter) {
  if (rho(x) <= 0.0) return 0.0;
  return (x - boundary_foot_point(rho, x, x, max_iter)).norm();
}

std::vector<CVec> box_samples(const CVec& center, double half_width, int count, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-half_width, half_width);
  std::vector<CVec> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    CVec z = center;
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      const double re = u(gen);
      const double im = u(gen);
      z[j] += cd(re, im);
    }
    out.push_back(z);
  }
  return out;
}

std::vector<CVec> interior_samples(const DefiningFunction& rho, const CVec& center, double half_width,
                                   int count, double margin, unsigned seed) {
  std::vector<CVec> out;
  unsigned s = seed;
  for (int round = 0; round < 64 && static_cast<int>(out.size()) < count; ++round) {
    for (const CVec& z : box_samples(center, half_width, 4 * count, s++)) {
      if (rho(z) <= -margin) out.push_back(z);
      if (static_cast<int>(out.size()) == count) break;
    }
  }
  if (static_cast<int>(out.size()) < count) {
    throw Error(ErrorKind::SearchFailed, "too few interior samples in the box");
  }
  return out;
}

namespace {

using InverseFn = std::function<CVec(const CVec&)>;

ConvergenceReport convergence_impl(const std::vector<InverseFn>& inverses, const std::vector<int>& indices,
                                   const DefiningFunction& source, const DefiningFunction& target,
                                   const NormalConvergenceOptions& opts) {
  if (opts.compact.empty()) throw Error(ErrorKind::InvalidArgument, "empty compact");
  if (indices.size() != inverses.size()) throw Error(ErrorKind::InvalidArgument, "index list size mismatch");
  const int d = target.dim();
  CVec ref = opts.reference.size() ? opts.reference : CVec(CVec::Unit(d, 0));
  const CVec center = opts.box_center.size() ? opts.box_center : ref;
  const std::vector<CVec> box = box_samples(center, opts.box_half_width, opts.box_count, opts.seed);
  const double target_ref = target(ref);

  ConvergenceReport rep;
  rep.quantity = "normal_convergence";
  rep.tolerance = opts.tolerance;
  rep.window = opts.window;
  for (std::size_t i = 0; i < inverses.size(); ++i) {
    const auto& inv = inverses[i];
    auto scaled = [&](const CVec& x) { return source(inv(x)); };
    const double at_ref = scaled(ref);
    const double factor = std::abs(at_ref) > 1e-300 ? std::abs(target_ref) / std::abs(at_ref) : 1.0;
    ConvergenceRow row;
    row.index = indices[i];
    for (const CVec& x : opts.compact) {
      row.deviation_a = std::max(row.deviation_a, std::abs(factor * scaled(x) - target(x)));
    }
    for (const CVec& x : box) {
      if (scaled(x) < 0.0) row.deviation_b = std::max(row.deviation_b, distance_to_domain(target, x));
    }
    rep.rows.push_back(row);
  }
  rep.finalize();
  return rep;
}

}  // namespace

ConvergenceReport normal_convergence_check(const std::vector<HoloMap>& maps, const std::vector<int>& indices,
                                           const DefiningFunction& source, const DefiningFunction& target,
                                           const NormalConvergenceOptions& opts) {
  std::vector<InverseFn> inv;
  for (const auto& m : maps) {
    if (!m.inverse) throw Error(ErrorKind::Unsupported, "map '" + m.tag + "' has no inverse");
    inv.push_back(*m.inverse);
  }
  return convergence_impl(inv, indices, source, target, opts);
}

ConvergenceReport normal_convergence_check(const std::vector<AffineMap>& maps, const std::vector<int>& indices,
                                           const DefiningFunction& source, const DefiningFunction& target,
                                           const NormalConvergenceOptions& opts) {
  std::vector<InverseFn> inv;
  for (const auto& m : maps) {
    AffineMap mi = m.inverse();
    inv.push_back([mi](const CVec& x) { return mi(x); });
  }
  return convergence_impl(inv, indices, source, target, opts);
}

AffineFit fit_affine(const std::vector<CVec>& x, const std::vector<CVec>& y) {
  if (x.empty() || x.size() != y.size()) throw Error(ErrorKind::InvalidArgument, "empty or mismatched samples");
  const Eigen::Index d = x.front().size();
  const Eigen::Index e = y.front().size();
  const Eigen::Index m = static_cast<Eigen::Index>(x.size());
  CMat design(m, d + 1), rhs(m, e);
  for (Eigen::Index i = 0; i < m; ++i) {
    design.row(i).head(d) = x[static_cast<std::size_t>(i)].transpose();
    design(i, d) = 1.0;
    rhs.row(i) = y[static_cast<std::size_t>(i)].transpose();
  }
  Eigen::ColPivHouseholderQR<CMat> qr(design);
  if (qr.rank() < d + 1) throw Error(ErrorKind::RankDeficient, "samples do not determine an affine map");
  const CMat sol = qr.solve(rhs);
  AffineFit fit;
  fit.map = AffineMap(sol.topRows(d).transpose(), sol.row(d).transpose(), "least-squares affine fit");
  for (Eigen::Index i = 0; i < m; ++i) {
    fit.residual = std::max(fit.residual, (fit.map(x[static_cast<std::size_t>(i)]) - y[static_cast<std::size_t>(i)]).norm());
  }
  return fit;
}

ConvergenceReport frankel_pinchuk_compare(const OrbitSpec& orbit, const std::vector<int>& indices,
                                          const std::vector<CVec>& compact, double tolerance) {
  if (compact.empty()) throw Error(ErrorKind::InvalidArgument, "empty compact");
  const int top = indices.empty() ? 0 : *std::max_element(indices.begin(), indices.end());
  const auto steps = pinchuk_scaling_sequence(orbit, top);
  ConvergenceReport rep;
  rep.quantity = "frankel_pinchuk_affine_residual";
  rep.tolerance = tolerance;
  rep.window = 1;
  for (int nu : indices) {
    if (nu < 1) throw Error(ErrorKind::InvalidArgument, "indices start at 1");
    const ScalingStep& st = steps[static_cast<std::size_t>(nu - 1)];
    const HoloMap omega = frankel_scaling(st.phi, orbit.base_point);
    std::vector<CVec> xs, ys;
    double scale = 0.0;
    for (const CVec& z : compact) {
      xs.push_back(omega(z));
      ys.push_back(st.sigma(z));
      scale = std::max(scale, ys.back().norm());
    }
    const AffineFit fit = fit_affine(xs, ys);
    rep.rows.push_back({nu, fit.residual, scale > 0.0 ? fit.residual / scale : 0.0, 0.0});
  }
  rep.finalize();
  return rep;
}

// ------------------------------------------------- Caratheodory kernel

DomainSequence ball_sequence(std::function<double(int)> radius, std::string description) {
  return {[radius](int nu, const CVec& x) { return x.norm() < radius(nu); }, std::move(description)};
}

DomainSequence constant_sequence(const DefiningFunction& rho) {
  return {[rho](int, const CVec& x) { return rho(x) < 0.0; }, "constant " + rho.tag()};
}

std::size_t KernelEstimate::marked_count() const {
  return static_cast<std::size_t>(std::count(marked.begin(), marked.end(), char(1)));
}

CVec KernelEstimate::grid_point(std::size_t index) const {
  const int half = per_axis / 2;
  std::vector<double> coords(static_cast<std::size_t>(2 * dim));
  for (auto& c : coords) {
    c = (static_cast<int>(index % static_cast<std::size_t>(per_axis)) - half) * grid.spacing;
    index /= static_cast<std::size_t>(per_axis);
  }
  CVec z = grid.center;
  for (int j = 0; j < dim; ++j) z[j] += cd(coords[static_cast<std::size_t>(2 * j)], coords[static_cast<std::size_t>(2 * j + 1)]);
  return z;
}

KernelEstimate caratheodory_kernel_estimate(const DomainSequence& seq, const CVec& p, const GridSpec& grid,
                                            int horizon, int window) {
  if (window < 1) throw Error(ErrorKind::InvalidArgument, "window must be positive");
  if (horizon < window) throw Error(ErrorKind::InvalidArgument, "horizon N must be at least the window W");
  if (!(grid.spacing > 0.0) || !(grid.half_width > 0.0)) throw Error(ErrorKind::InvalidArgument, "bad grid");
  const int dim = static_cast<int>(p.size());
  KernelEstimate k;
  k.dim = dim;
  k.grid = grid;
  if (k.grid.center.size() == 0) k.grid.center = CVec::Zero(dim);
  require_point(k.grid.center, dim, "grid center");
  k.horizon = horizon;
  k.window = window;
  k.p = p;
  const int half = static_cast<int>(std::lround(grid.half_width / grid.spacing));
  k.per_axis = 2 * half + 1;
  const int axes = 2 * dim;
  std::size_t total = 1;
  for (int a = 0; a < axes; ++a) total *= static_cast<std::size_t>(k.per_axis);
  if (total > 50'000'000) throw Error(ErrorKind::InvalidArgument, "grid too large");
  k.marked.assign(total, 0);

  // grid node nearest to p
  std::vector<int> pd(static_cast<std::size_t>(axes));
  std::size_t p_index = 0, stride = 1;
  for (int a = 0; a < axes; ++a) {
    const cd off = p[a / 2] - k.grid.center[a / 2];
    const double c = (a % 2 == 0) ? off.real() : off.imag();
    const int digit = static_cast<int>(std::lround(c / grid.spacing)) + half;
    if (digit < 0 || digit >= k.per_axis) throw Error(ErrorKind::InvalidArgument, "p lies outside the grid");
    pd[static_cast<std::size_t>(a)] = digit;
    p_index += static_cast<std::size_t>(digit) * stride;
    stride *= static_cast<std::size_t>(k.per_axis);
  }

  auto in_all = [&](const CVec& x, int from, int to) {
    for (int nu = from; nu <= to; ++nu)
      if (!seq.contains(nu, x)) return false;
    return true;
  };

  bool interior = in_all(p, 1, horizon);
  stride = 1;
  for (int a = 0; a < axes && interior; ++a) {
    for (int s : {-1, 1}) {
      const int digit = pd[static_cast<std::size_t>(a)] + s;
      if (digit < 0 || digit >= k.per_axis) continue;
      const std::size_t nb = static_cast<std::size_t>(static_cast<long long>(p_index) + s * static_cast<long long>(stride));
      if (!in_all(k.grid_point(nb), 1, horizon)) interior = false;
    }
    stride *= static_cast<std::size_t>(k.per_axis);
  }
  if (!interior) {
    k.degenerate = true;
    k.marked[p_index] = 1;
    return k;
  }

  std::vector<char> member(total, 0);
  for (std::size_t i = 0; i < total; ++i) member[i] = in_all(k.grid_point(i), horizon - window + 1, horizon) ? 1 : 0;
  if (!member[p_index]) {
    k.degenerate = true;
    k.marked[p_index] = 1;
    return k;
  }
  std::deque<std::size_t> queue{p_index};
  k.marked[p_index] = 1;
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    std::size_t rest = cur, st = 1;
    for (int a = 0; a < axes; ++a) {
      const int digit = static_cast<int>(rest % static_cast<std::size_t>(k.per_axis));
      rest /= static_cast<std::size_t>(k.per_axis);
      for (int s : {-1, 1}) {
        const int nd = digit + s;
        if (nd < 0 || nd >= k.per_axis) continue;
        const std::size_t nb = s > 0 ? cur + st : cur - st;
        if (member[nb] && !k.marked[nb]) {
          k.marked[nb] = 1;
          queue.push_back(nb);
        }
      }
      st *= static_cast<std::size_t>(k.per_axis);
    }
  }
  return k;
}

nlohmann::json to_json(const KernelEstimate& k) {
  return {{"dim", k.dim},
          {"grid", {{"center", complex_to_json(k.grid.center)}, {"half_width", k.grid.half_width}, {"spacing", k.grid.spacing}}},
          {"per_axis", k.per_axis},
          {"horizon", k.horizon},
          {"window", k.window},
          {"degenerate", k.degenerate},
          {"p", complex_to_json(k.p)},
          {"grid_points", k.size()},
          {"marked_count", k.marked_count()}};
}

}  // namespace cscale
