#include "cscale/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include <boost/math/tools/toms748_solve.hpp>

#include <nlohmann/json.hpp>

#include "cscale/error.hpp"

namespace cscale {

struct DefiningFunction::Impl {
  int dim = 0;
  std::string tag;
  std::vector<double> params;
  DomainTraits traits;
  std::optional<RealPoly> poly;
  Evaluators ev;
  std::optional<SupportFn> support;
};


DefiningFunction DefiningFunction::from_polynomial(RealPoly poly, std::string tag,
                                                   std::vector<double> params,
                                                   DomainTraits traits) {
  const int d = poly.dim();
  std::vector<RealPoly> grad;
  std::vector<std::vector<RealPoly>> hess(static_cast<std::size_t>(d));
  std::vector<std::vector<RealPoly>> holo(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) grad.push_back(poly.d_holo(j));
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      hess[static_cast<std::size_t>(j)].push_back(grad[static_cast<std::size_t>(j)].d_anti(k));
      holo[static_cast<std::size_t>(j)].push_back(grad[static_cast<std::size_t>(j)].d_holo(k));
    }
  }
  auto impl = std::make_shared<Impl>();
  impl->dim = d;
  impl->tag = std::move(tag);
  impl->params = std::move(params);
  impl->traits = traits;
  impl->ev.value = [poly](const CVec& z) { return poly(z); };
  impl->ev.gradient = [grad, d](const CVec& z) {
    CVec g(d);
    for (int j = 0; j < d; ++j) g[j] = grad[static_cast<std::size_t>(j)].evaluate(z);
    return g;
  };
  impl->ev.hessian = [hess, d](const CVec& z) {
    CMat h(d, d);
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        h(j, k) = hess[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)].evaluate(z);
    return h;
  };
  impl->ev.holomorphic_hessian = [holo, d](const CVec& z) {
    CMat h(d, d);
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        h(j, k) = holo[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)].evaluate(z);
    return h;
  };
  impl->poly = std::move(poly);
  DefiningFunction f;
  f.impl_ = std::move(impl);
  return f;
}

DefiningFunction DefiningFunction::from_evaluators(int dim, Evaluators ev, std::string tag,
                                                   std::vector<double> params,
                                                   DomainTraits traits) {
  if (!ev.value || !ev.gradient || !ev.hessian) {
    throw Error(ErrorKind::InvalidArgument, "defining function needs value, gradient and hessian");
  }
  auto impl = std::make_shared<Impl>();
  impl->dim = dim;
  impl->tag = std::move(tag);
  impl->params = std::move(params);
  impl->traits = traits;
  impl->ev = std::move(ev);
  DefiningFunction f;
  f.impl_ = std::move(impl);
  return f;
}

int DefiningFunction::dim() const { return impl_ ? impl_->dim : 0; }
const std::string& DefiningFunction::tag() const { return impl_->tag; }
const std::vector<double>& DefiningFunction::params() const { return impl_->params; }
const DomainTraits& DefiningFunction::traits() const { return impl_->traits; }
double DefiningFunction::operator()(const CVec& z) const { return impl_->ev.value(z); }
CVec DefiningFunction::gradient(const CVec& z) const { return impl_->ev.gradient(z); }
CMat DefiningFunction::hessian(const CVec& z) const { return impl_->ev.hessian(z); }
bool DefiningFunction::has_holomorphic_hessian() const {
  return impl_->ev.holomorphic_hessian.has_value();
}
CMat DefiningFunction::holomorphic_hessian(const CVec& z) const {
  if (!impl_->ev.holomorphic_hessian) {
    throw Error(ErrorKind::Unsupported, "holomorphic hessian unavailable for '" + impl_->tag + "'");
  }
  return (*impl_->ev.holomorphic_hessian)(z);
}
const RealPoly* DefiningFunction::polynomial() const {
  return impl_->poly ? &*impl_->poly : nullptr;
}

CVec DefiningFunction::outward_normal(const CVec& z) const {
  CVec g = gradient(z);
  const double n = g.norm();
  if (n == 0.0) throw Error(ErrorKind::DegenerateGradient, "vanishing gradient");
  return g.conjugate() / n;
}

std::optional<double> DefiningFunction::support_radius(const CVec& unit) const {
  if (!impl_->support) return std::nullopt;
  return (*impl_->support)(unit);
}

DefiningFunction DefiningFunction::with_support(SupportFn fn) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->support = std::move(fn);
  DefiningFunction f;
  f.impl_ = std::move(impl);
  return f;
}

DefiningFunction DefiningFunction::scaled(double c) const {
  if (!(c > 0.0)) throw Error(ErrorKind::InvalidArgument, "scale factor must be positive");
  DefiningFunction f;
  if (impl_->poly) {
    f = from_polynomial(c * *impl_->poly, impl_->tag, impl_->params, impl_->traits);
  } else {
    Evaluators ev;
    auto base = *this;
    ev.value = [base, c](const CVec& z) { return c * base(z); };
    ev.gradient = [base, c](const CVec& z) { return CVec(c * base.gradient(z)); };
    ev.hessian = [base, c](const CVec& z) { return CMat(c * base.hessian(z)); };
    if (has_holomorphic_hessian()) {
      ev.holomorphic_hessian = [base, c](const CVec& z) { return CMat(c * base.holomorphic_hessian(z)); };
    }
    f = from_evaluators(dim(), std::move(ev), impl_->tag, impl_->params, impl_->traits);
  }
  if (impl_->support) f = f.with_support(*impl_->support);
  return f;
}

// ------------------------------------------------------------------ catalog

namespace {

RealPoly sum_abs_sq(int dim, int from) {
  RealPoly p(dim);
  for (int j = from; j < dim; ++j) p += RealPoly::abs_pow(dim, j, 1);
  return p;
}

void require_dim(const std::string& name, int got, int want) {
  if (got != want) {
    throw Error(ErrorKind::InvalidArgument,
                name + " is defined in dimension " + std::to_string(want) + ", got " + std::to_string(got));
  }
}

double golden_max(const std::function<double(double)>& f, double a, double b) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2; x2 = a + g * (b - a); f2 = f(x2);
    } else {
      b = x2; x2 = x1; f2 = f1; x1 = b - g * (b - a); f1 = f(x1);
    }
  }
  return std::max({f(a), f(b), f1, f2});
}

DefiningFunction make_bidisc(int dim, double radius) {
  DefiningFunction::Evaluators ev;
  const double r2 = radius * radius;
  auto active = [](const CVec& z) {
    Eigen::Index idx = 0;
    double best = -1.0;
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      if (std::norm(z[j]) > best) { best = std::norm(z[j]); idx = j; }
    }
    return idx;
  };
  ev.value = [active, r2](const CVec& z) { return std::norm(z[active(z)]) - r2; };
  ev.gradient = [active](const CVec& z) {
    CVec g = CVec::Zero(z.size());
    auto a = active(z);
    g[a] = std::conj(z[a]);
    return g;
  };
  ev.hessian = [active](const CVec& z) {
    CMat h = CMat::Zero(z.size(), z.size());
    h(active(z), active(z)) = 1.0;
    return h;
  };
  ev.holomorphic_hessian = [](const CVec& z) { return CMat(CMat::Zero(z.size(), z.size())); };
  DomainTraits t{true, true, true, true};
  auto f = DefiningFunction::from_evaluators(dim, std::move(ev), "bidisc", {radius}, t);
  return f.with_support([radius](const CVec& u) { return radius * u.cwiseAbs().sum(); });
}

}  // namespace

std::vector<std::string> catalog_names() {
  return {"ball", "disc", "bidisc", "egg", "siegel", "halfspace", "kohn_nirenberg", "bp_model"};
}

DefiningFunction make_catalog_domain(const std::string& name, const CatalogParams& p) {
  if (p.dim < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  if (name == "ball" || name == "disc") {
    const int dim = name == "disc" ? 1 : p.dim;
    if (name == "disc" && p.dim != 1 && p.dim != 2) require_dim(name, p.dim, 1);
    if (!(p.radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "radius must be positive");
    RealPoly rho = sum_abs_sq(dim, 0) + RealPoly::constant(dim, -p.radius * p.radius);
    auto f = DefiningFunction::from_polynomial(std::move(rho), name, {p.radius}, {true, true, true, true});
    return f.with_support([r = p.radius](const CVec& u) { return r * u.norm(); });
  }
  if (name == "bidisc") {
    if (!(p.radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "radius must be positive");
    return make_bidisc(p.dim, p.radius);
  }
  if (name == "egg") {
    if (p.k < 1) throw Error(ErrorKind::InvalidArgument, "egg exponent k must be >= 1");
    require_dim(name, p.dim, 2);
    RealPoly rho = RealPoly::abs_pow(2, 0, 1) + RealPoly::abs_pow(2, 1, p.k) + RealPoly::constant(2, -1.0);
    auto f = DefiningFunction::from_polynomial(std::move(rho), "egg", {static_cast<double>(p.k)},
                                               {true, true, true, true});
    return f.with_support([k = p.k](const CVec& u) {
      const double a = std::abs(u[0]), b = std::abs(u[1]);
      return golden_max([&](double r) { return a * std::sqrt(std::max(0.0, 1.0 - std::pow(r, 2 * k))) + b * r; },
                        0.0, 1.0);
    });
  }
  if (name == "siegel") {
    if (p.dim < 2) throw Error(ErrorKind::InvalidArgument, "siegel needs dimension >= 2");
    RealPoly rho = (-1.0) * RealPoly::real_part(p.dim, 0) + sum_abs_sq(p.dim, 1);
    return DefiningFunction::from_polynomial(std::move(rho), "siegel", {}, {true, false, false, false});
  }
  if (name == "halfspace") {
    RealPoly rho = (-1.0) * RealPoly::real_part(p.dim, 0);
    return DefiningFunction::from_polynomial(std::move(rho), "halfspace", {}, {true, false, false, false});
  }
  if (name == "kohn_nirenberg") {
    require_dim(name, p.dim, 2);
    RealPoly rho = RealPoly::real_part(2, 0);
    // |z0 z1|^2
    Exponent e{1, 1, 1, 1};
    rho.add_term(e, 1.0);
    rho += RealPoly::abs_pow(2, 1, 4);
    // 15/7 |z1|^2 Re z1^6 = 15/14 (z1^7 zbar1 + z1 zbar1^7)
    rho.add_term(Exponent{0, 7, 0, 1}, 15.0 / 14.0);
    rho.add_term(Exponent{0, 1, 0, 7}, 15.0 / 14.0);
    return DefiningFunction::from_polynomial(std::move(rho), "kohn_nirenberg", {}, {});
  }
  if (name == "bp_model") {
    if (p.m < 1) throw Error(ErrorKind::InvalidArgument, "model exponent m must be >= 1");
    require_dim(name, p.dim, 2);
    RealPoly rho = (-1.0) * RealPoly::real_part(2, 0) + RealPoly::abs_pow(2, 1, p.m);
    return DefiningFunction::from_polynomial(std::move(rho), "bp_model", {static_cast<double>(p.m)},
                                             {true, false, false, false});
  }
  throw Error(ErrorKind::UnknownTag, "unknown catalog domain '" + name + "'");
}

DefiningFunction pullback(const DefiningFunction& rho, const HoloMap& map,
                          const std::vector<HoloPoly>* polys) {
  const std::string tag = rho.tag() + "∘" + map.tag;
  if (polys && rho.polynomial()) {
    return DefiningFunction::from_polynomial(rho.polynomial()->compose(*polys), tag, rho.params());
  }
  DefiningFunction::Evaluators ev;
  ev.value = [rho, map](const CVec& w) { return rho(map(w)); };
  ev.gradient = [rho, map](const CVec& w) {
    return CVec(map.jacobian(w).transpose() * rho.gradient(map(w)));
  };
  ev.hessian = [rho, map](const CVec& w) {
    CMat j = map.jacobian(w);
    return CMat(j.transpose() * rho.hessian(map(w)) * j.conjugate());
  };
  return DefiningFunction::from_evaluators(map.dim, std::move(ev), tag, rho.params());
}

// ----------------------------------------------------------- projections

CVec project_to_boundary(const DefiningFunction& rho, CVec y) {
  for (int it = 0; it < 60; ++it) {
    const double v = rho(y);
    const CVec grad = 2.0 * rho.gradient(y).conjugate();
    const double g2 = grad.squaredNorm();
    if (g2 < 1e-300) throw Error(ErrorKind::DegenerateGradient, "gradient vanishes during projection");
    const CVec step = (v / g2) * grad;
    y -= step;
    if (step.norm() < 1e-15 * std::max(1.0, y.norm())) break;
  }
  return y;
}

CVec boundary_foot_point(const DefiningFunction& rho, const CVec& x, const CVec& start, int max_iter) {
  CVec y = project_to_boundary(rho, start);
  for (int it = 0; it < max_iter; ++it) {
    CVec n = rho.gradient(y).conjugate();
    n /= n.norm();
    const CVec foot = x - real_dot(n, CVec(x - y)) * n;
    const CVec next = project_to_boundary(rho, foot);
    const double moved = (next - y).norm();
    y = next;
    if (moved < 1e-14 * std::max(1.0, x.norm())) break;
  }
  return y;
}

std::optional<double> ray_exit(const DefiningFunction& rho, const CVec& q, const CVec& u, double max_s) {
  auto f = [&](double s) { return rho(CVec(q + s * u)); };
  double lo = 0.0, hi = -1.0;
  for (double s = 1e-13 * std::max(1.0, q.norm()); s <= max_s; s *= 2.0) {
    if (f(s) >= 0.0) {
      hi = s;
      break;
    }
    lo = s;
  }
  if (hi < 0.0) {
    if (f(max_s) < 0.0) return std::nullopt;
    hi = max_s;
  }
  const double fh = f(hi);
  if (fh == 0.0) return hi;
  std::uintmax_t iters = 200;
  auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, f(lo), fh,
      [](double x, double y) { return std::abs(x - y) <= 4e-16 * std::max(std::abs(x), std::abs(y)); }, iters);
  return 0.5 * (a + b);
}

// ------------------------------------------------------------------ Levi

const char* to_string(LeviClass c) {
  switch (c) {
    case LeviClass::StronglyPseudoconvex: return "strongly_pseudoconvex";
    case LeviClass::WeaklyPseudoconvex: return "weakly_pseudoconvex";
    case LeviClass::NotPseudoconvex: return "not_pseudoconvex";
    case LeviClass::LeviFlat: return "levi_flat";
  }
  return "unknown";
}

CMat levi_hermitian(const CMat& complex_hessian) { return complex_hessian.transpose(); }

CMat complex_tangent_basis(const CVec& gradient) {
  const double n = gradient.norm();
  if (n == 0.0) throw Error(ErrorKind::DegenerateGradient, "vanishing gradient");
  const Eigen::Index d = gradient.size();
  CMat v = gradient.conjugate() / n;
  Eigen::HouseholderQR<CMat> qr(v);
  CMat q = qr.householderQ() * CMat::Identity(d, d);
  return q.rightCols(d - 1);
}

namespace {

CMat tangential_levi(const DefiningFunction& rho, const CVec& p, const CMat& basis, double normalization) {
  CMat l = basis.adjoint() * levi_hermitian(rho.hessian(p)) * basis / normalization;
  return 0.5 * (l + l.adjoint());
}

bool vanishes_nearby(const DefiningFunction& rho, const LeviReport& r, double radius, double tol) {
  for (Eigen::Index j = 0; j < r.tangent_basis.cols(); ++j) {
    for (cd ph : {cd(1.0), cd(-1.0), cd(0.0, 1.0), cd(0.0, -1.0)}) {
      const CVec y = project_to_boundary(rho, CVec(r.point + radius * ph * r.tangent_basis.col(j)));
      const CVec g = rho.gradient(y);
      if (g.norm() < 1e-14) continue;
      const double n = r.normalized ? rho.real_gradient_norm(y) : 1.0;
      Eigen::SelfAdjointEigenSolver<CMat> es(tangential_levi(rho, y, complex_tangent_basis(g), n));
      if (es.eigenvalues().cwiseAbs().maxCoeff() > tol) return false;
    }
  }
  return true;
}

}  // namespace

LeviReport levi_classify(const DefiningFunction& rho, const CVec& p, const LeviOptions& opts) {
  require_point(p, rho.dim(), "boundary point");
  if (rho.dim() < 2) throw Error(ErrorKind::Unsupported, "the Levi form needs dimension >= 2");
  const double value = rho(p);
  if (std::abs(value) > opts.boundary_tol) {
    throw Error(ErrorKind::NotOnBoundary, "|rho(p)| = " + std::to_string(std::abs(value)));
  }
  LeviReport r;
  r.point = p;
  r.gradient = rho.gradient(p);
  if (r.gradient.norm() < 1e-14) throw Error(ErrorKind::DegenerateGradient, "complex gradient vanishes at p");
  r.normalized = opts.normalize;
  r.normalization = opts.normalize ? rho.real_gradient_norm(p) : 1.0;
  r.tangent_basis = complex_tangent_basis(r.gradient);
  r.levi_matrix = tangential_levi(rho, p, r.tangent_basis, r.normalization);
  Eigen::SelfAdjointEigenSolver<CMat> es(r.levi_matrix);
  r.eigenvalues = es.eigenvalues();
  r.min_eigenvalue = r.eigenvalues.minCoeff();
  r.max_eigenvalue = r.eigenvalues.maxCoeff();
  const double tol = opts.eigen_tol;
  if (r.eigenvalues.cwiseAbs().maxCoeff() <= tol) {
    r.classification = vanishes_nearby(rho, r, opts.flat_probe_radius, tol) ? LeviClass::LeviFlat
                                                                             : LeviClass::WeaklyPseudoconvex;
  } else if (r.min_eigenvalue > tol) {
    r.classification = LeviClass::StronglyPseudoconvex;
  } else if (r.min_eigenvalue >= -tol) {
    r.classification = LeviClass::WeaklyPseudoconvex;
  } else {
    r.classification = LeviClass::NotPseudoconvex;
  }
  return r;
}

// ------------------------------------------------------- convex normal form

namespace {

std::vector<CVec> ball_samples(int dim, double radius, int count, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<CVec> out;
  for (int j = 0; j < dim; ++j) {
    for (double s : {1.0, -1.0, 0.5, -0.5}) {
      for (cd ph : {cd(1.0), cd(0.0, 1.0)}) {
        CVec z = CVec::Zero(dim);
        z[j] = s * radius * ph;
        out.push_back(z);
      }
    }
  }
  while (static_cast<int>(out.size()) < count) {
    CVec z(dim);
    for (int j = 0; j < dim; ++j) z[j] = cd(normal(gen), normal(gen));
    z *= radius * std::pow(uni(gen), 1.0 / (2.0 * dim)) / z.norm();
    out.push_back(z);
  }
  return out;
}

}  // namespace

double normal_form_residual_ratio(const DefiningFunction& normalized, double r, int samples,
                                  unsigned seed) {
  double worst = 0.0;
  for (const CVec& w : ball_samples(normalized.dim(), 2.0 * r, samples, seed)) {
    const double n2 = w.squaredNorm();
    if (n2 == 0.0) continue;
    const double model = -w[0].real() + n2;
    worst = std::max(worst, std::abs(normalized(w) - model) / n2);
  }
  return worst;
}

NormalForm convex_normal_form(const DefiningFunction& rho, const CVec& p, const LeviOptions& opts) {
  LeviReport levi = levi_classify(rho, p, opts);
  if (levi.classification != LeviClass::StronglyPseudoconvex) {
    throw Error(ErrorKind::NotStronglyPseudoconvex,
                std::string("classification is ") + to_string(levi.classification));
  }
  if (!rho.has_holomorphic_hessian()) {
    throw Error(ErrorKind::Unsupported, "normal form needs the holomorphic hessian");
  }
  const int d = rho.dim();
  const int n = d - 1;
  const CVec g = levi.gradient;
  const double gn = g.norm();
  const double scale = 2.0 * gn;

  CMat u(d, d);
  u.col(0) = -g.conjugate() / gn;
  u.rightCols(n) = levi.tangent_basis;

  const CMat herm = u.transpose() * rho.hessian(p) * u.conjugate() / scale;
  const CMat holo = u.transpose() * rho.holomorphic_hessian(p) * u / scale;

  const CMat ctt = herm.bottomRightCorner(n, n);
  const CMat c0t = herm.topRightCorner(1, n);
  const CMat ct0 = herm.bottomLeftCorner(n, 1);
  Eigen::LLT<CMat> llt(0.5 * (ctt + ctt.adjoint()));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::NotStronglyPseudoconvex, "tangential Hessian block is not positive definite");
  }
  const CMat ctt_inv = llt.solve(CMat::Identity(n, n));
  const double schur = (herm(0, 0) - (c0t * ctt_inv * ct0)(0, 0)).real();
  const double weight = 2.0 * (1.0 - schur);

  const CMat beta = -(c0t * ctt_inv).transpose();  // n x 1
  const CMat lower = llt.matrixL();
  const CMat m = lower.inverse().transpose();

  CMat dmat = CMat::Zero(d, d);
  dmat(0, 0) = 1.0;
  dmat.bottomLeftCorner(n, 1) = beta;
  dmat.bottomRightCorner(n, n) = m;

  CMat holo_shift = holo;
  holo_shift(0, 0) += 0.5 * weight;
  CMat quad = dmat.transpose() * holo_shift * dmat;
  quad = 0.5 * (quad + quad.transpose());

  // eta(w) = (w0 + w^T quad w, beta w0 + M w'), z = p + U eta.
  std::vector<HoloPoly> eta;
  {
    CVec lin = CVec::Zero(d);
    lin[0] = 1.0;
    eta.push_back(HoloPoly::quadratic(0.0, lin, quad));
    for (int a = 0; a < n; ++a) {
      CVec row = dmat.row(a + 1).transpose();
      eta.push_back(HoloPoly::quadratic(0.0, row, CMat::Zero(d, d)));
    }
  }
  std::vector<HoloPoly> chart_polys;
  for (int i = 0; i < d; ++i) {
    HoloPoly zi = HoloPoly::constant(d, p[i]);
    for (int a = 0; a < d; ++a) zi += u(i, a) * eta[static_cast<std::size_t>(a)];
    chart_polys.push_back(std::move(zi));
  }
  std::vector<std::vector<HoloPoly>> chart_grad(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) chart_grad[static_cast<std::size_t>(i)].push_back(chart_polys[static_cast<std::size_t>(i)].derivative(j));

  NormalForm nf;
  nf.base_point = p;
  nf.chart.dim = d;
  nf.chart.tag = "normal_form_chart";
  nf.chart.eval = [chart_polys, d](const CVec& w) {
    CVec z(d);
    for (int i = 0; i < d; ++i) z[i] = chart_polys[static_cast<std::size_t>(i)](w);
    return z;
  };
  nf.chart.jacobian = [chart_grad, d](const CVec& w) {
    CMat j(d, d);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k) j(i, k) = chart_grad[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)](w);
    return j;
  };
  nf.chart_polys = chart_polys;
  nf.chart_linear = AffineMap(u * dmat, p, "normal-form linear chart");
  nf.psi_affine = nf.chart_linear.inverse();
  nf.quadratic = quad;
  nf.rescale = scale;
  nf.square_weight = weight;

  if (const RealPoly* poly = rho.polynomial()) {
    RealPoly r1 = (1.0 / scale) * poly->compose(chart_polys);
    RealPoly r2 = r1 + weight * (r1 * r1);
    r2.prune(1e-15);
    nf.normalized = DefiningFunction::from_polynomial(std::move(r2), rho.tag() + "_normal_form", rho.params());
  } else {
    DefiningFunction base = pullback(rho, nf.chart);
    DefiningFunction::Evaluators ev;
    ev.value = [base, scale, weight](const CVec& w) {
      const double v = base(w) / scale;
      return v + weight * v * v;
    };
    ev.gradient = [base, scale, weight](const CVec& w) {
      const double v = base(w) / scale;
      return CVec((1.0 + 2.0 * weight * v) * base.gradient(w) / scale);
    };
    ev.hessian = [base, scale, weight](const CVec& w) {
      const double v = base(w) / scale;
      CVec gr = base.gradient(w) / scale;
      return CMat((1.0 + 2.0 * weight * v) * base.hessian(w) / scale + 2.0 * weight * gr * gr.adjoint());
    };
    nf.normalized = DefiningFunction::from_evaluators(d, std::move(ev), rho.tag() + "_normal_form", rho.params());
  }

  for (double r = 0.5; r >= 1e-6; r *= 0.5) {
    const double ratio = normal_form_residual_ratio(nf.normalized, r);
    if (ratio <= 0.25) {
      nf.radius = r;
      nf.max_residual_ratio = ratio;
      return nf;
    }
  }
  throw Error(ErrorKind::SearchFailed, "residual bound fails for every radius down to 1e-6");
}

// ---------------------------------------------------------- order of contact

CurveJet contact_jet(const DefiningFunction& rho, const CVec& p, const ContactCurve& curve, int order) {
  const RealPoly* poly = rho.polynomial();
  if (!poly) throw Error(ErrorKind::Unsupported, "order of contact needs a polynomial defining function");
  std::vector<std::vector<cd>> comps(2);
  comps[0].assign(static_cast<std::size_t>(std::max(curve.p, 0) + 1), cd(0.0));
  comps[1].assign(static_cast<std::size_t>(std::max(curve.q, 0) + 1), cd(0.0));
  comps[0][0] += p[0];
  comps[1][0] += p[1];
  if (curve.p > 0) comps[0][static_cast<std::size_t>(curve.p)] += curve.a;
  if (curve.q > 0) comps[1][static_cast<std::size_t>(curve.q)] += curve.b;
  return poly->along_curve(comps, order);
}

ContactReport order_of_contact(const DefiningFunction& rho, const CVec& p, const ContactSearch& search,
                               double boundary_tol) {
  if (rho.dim() != 2) throw Error(ErrorKind::InvalidArgument, "order of contact is implemented for d = 2");
  require_point(p, 2, "boundary point");
  if (search.max_p < 1 || search.max_q < 1 || search.max_p > 16 || search.max_q > 16) {
    throw Error(ErrorKind::InvalidArgument, "search bounds must lie in [1, 16]");
  }
  if (search.phases < 1) throw Error(ErrorKind::InvalidArgument, "phase count must be positive");
  if (std::abs(rho(p)) > boundary_tol) throw Error(ErrorKind::NotOnBoundary, "p is not a boundary point");
  if (!rho.polynomial()) throw Error(ErrorKind::Unsupported, "order of contact needs a polynomial defining function");

  ContactReport rep;
  rep.point = p;
  rep.search = search;
  rep.jet_order = search.jet_order > 0 ? search.jet_order : 4 * std::max(search.max_p, search.max_q) + 8;
  rep.limitation =
      "monomial curves p + (a t^P, b t^Q) with |a| = |b| = 1 on a phase grid and smallest positive "
      "exponent 1; exponent 0 holds the coordinate fixed";

  std::vector<cd> phases;
  for (int j = 0; j < search.phases; ++j) phases.push_back(std::polar(1.0, 2.0 * kPi * j / search.phases));

  bool infinite = false;
  int best = 0;
  for (int pe = 0; pe <= search.max_p; ++pe) {
    for (int qe = 0; qe <= search.max_q; ++qe) {
      if (pe == 0 && qe == 0) continue;
      const int lowest = (pe == 0) ? qe : (qe == 0 ? pe : std::min(pe, qe));
      if (lowest != 1) continue;
      const std::vector<cd> as = pe == 0 ? std::vector<cd>{cd(0.0)} : phases;
      const std::vector<cd> bs = qe == 0 ? std::vector<cd>{cd(0.0)} : phases;
      for (cd a : as) {
        for (cd b : bs) {
          ContactCurve c{pe, qe, a, b};
          CurveJet jet = contact_jet(rho, p, c, rep.jet_order);
          ++rep.curves_tested;
          const double scale = std::max(1.0, jet.coeff.cwiseAbs().maxCoeff());
          const int k = jet.vanishing_order(search.coefficient_tol * scale);
          if (k > best) {
            best = k;
            rep.best = c;
          }
          if (k > rep.jet_order) infinite = true;
        }
      }
    }
  }
  rep.vanishing_order = best;
  if (!infinite) rep.finite_type = best;
  return rep;
}

// --------------------------------------------------------------- reports

nlohmann::json complex_to_json(const CVec& v) {
  auto arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back({v[i].real(), v[i].imag()});
  return arr;
}

nlohmann::json complex_to_json(const CMat& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    CVec row = m.row(i).transpose();
    rows.push_back(complex_to_json(row));
  }
  return rows;
}

nlohmann::json to_json(const LeviReport& r) {
  std::vector<double> eig(r.eigenvalues.data(), r.eigenvalues.data() + r.eigenvalues.size());
  return {{"point", complex_to_json(r.point)},
          {"gradient", complex_to_json(r.gradient)},
          {"levi_eigenvalues", eig},
          {"classification", to_string(r.classification)},
          {"tangent_basis", complex_to_json(r.tangent_basis)},
          {"levi_matrix", complex_to_json(r.levi_matrix)},
          {"normalized", r.normalized},
          {"normalization", r.normalization}};
}

nlohmann::json to_json(const ContactReport& r) {
  nlohmann::json j = {{"point", complex_to_json(r.point)},
                      {"vanishing_order", r.vanishing_order},
                      {"jet_order", r.jet_order},
                      {"curves_tested", r.curves_tested},
                      {"search", {{"max_p", r.search.max_p}, {"max_q", r.search.max_q}, {"phases", r.search.phases}}},
                      {"best_curve",
                       {{"p", r.best.p}, {"q", r.best.q},
                        {"a", {r.best.a.real(), r.best.a.imag()}},
                        {"b", {r.best.b.real(), r.best.b.imag()}}}},
                      {"limitation", r.limitation}};
  if (r.finite_type) {
    j["finite_type"] = *r.finite_type;
  } else {
    j["finite_type"] = "exceeds search bound";
  }
  return j;
}

}  // namespace cscale
