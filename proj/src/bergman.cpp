#include "cscale/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cscale/error.hpp"
#include "cscale/geometry.hpp"
#include "cscale/invmetrics.hpp"
#include "cscale/quadrature.hpp"

namespace cscale {

namespace {

void validate(const BergmanDomain& d) {
  if (d.tag == "disc") {
    if (d.dim != 1) throw Error(ErrorKind::InvalidArgument, "disc has dimension 1");
  } else if (d.tag == "ball" || d.tag == "bidisc") {
    if (d.dim < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  } else if (d.tag == "egg") {
    if (d.dim != 2) throw Error(ErrorKind::InvalidArgument, "egg has dimension 2");
    if (d.k < 1) throw Error(ErrorKind::InvalidArgument, "egg exponent must be >= 1");
  } else {
    throw Error(ErrorKind::Unsupported, "no monomial basis for '" + d.tag + "' (not a catalog Reinhardt domain)");
  }
  if (!(d.radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "radius must be positive");
}

// (2pi)^d * nested radial integral over the ball of radius R; innermost
// coordinate analytic, the others by composite Gauss-Legendre with `panels`.
double ball_radial(const std::vector<int>& a, double r2, std::size_t j, int panels) {
  const int aj = a[j];
  if (j + 1 == a.size()) return std::pow(std::max(r2, 0.0), aj + 1) / (2.0 * aj + 2.0);
  const double top = std::sqrt(std::max(r2, 0.0));
  return gauss_panels([&](double r) { return std::pow(r, 2 * aj + 1) * ball_radial(a, r2 - r * r, j + 1, panels); },
                      0.0, top, panels);
}

double norm_for(const BergmanDomain& d, const std::vector<int>& a, double rel_tol, int& panels_used) {
  const double two_pi = 2.0 * kPi;
  const double big_r = d.radius;
  if (d.tag == "disc" || d.tag == "bidisc") {
    double c = 1.0;
    for (int aj : a) c *= kPi * std::pow(big_r, 2 * aj + 2) / (aj + 1.0);
    return c;
  }
  if (d.tag == "ball") {
    if (a.size() == 1) return two_pi * std::pow(big_r, 2 * a[0] + 2) / (2.0 * a[0] + 2.0);
    int panels = 2;
    double prev = ball_radial(a, big_r * big_r, 0, panels);
    for (;;) {
      panels *= 2;
      const double cur = ball_radial(a, big_r * big_r, 0, panels);
      if (std::abs(cur - prev) <= rel_tol * std::abs(cur)) {
        panels_used = std::max(panels_used, panels);
        return std::pow(two_pi, static_cast<double>(a.size())) * cur;
      }
      if (panels > 4096) throw Error(ErrorKind::Truncation, "radial quadrature did not converge");
      prev = cur;
    }
  }
  // egg: r0^2 + r1^(2k) < 1, r0 analytic
  const int a0 = a[0], a1 = a[1], k = d.k;
  auto f = [&](double r) {
    const double inner = std::pow(std::max(0.0, 1.0 - std::pow(r, 2 * k)), a0 + 1) / (2.0 * a0 + 2.0);
    return std::pow(r, 2 * a1 + 1) * inner;
  };
  const QuadResult q = integrate_doubling(f, 0.0, 1.0, rel_tol);
  panels_used = std::max(panels_used, q.panels);
  return two_pi * two_pi * q.value;
}

// powers[j][n] = z_j^n
std::vector<std::vector<cd>> power_table(const CVec& z, int n) {
  std::vector<std::vector<cd>> p(static_cast<std::size_t>(z.size()), std::vector<cd>(static_cast<std::size_t>(n + 1)));
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    auto& row = p[static_cast<std::size_t>(j)];
    row[0] = 1.0;
    for (int e = 1; e <= n; ++e) row[static_cast<std::size_t>(e)] = row[static_cast<std::size_t>(e - 1)] * z[j];
  }
  return p;
}

cd monomial(const std::vector<std::vector<cd>>& pw, const std::vector<int>& a) {
  cd v = 1.0;
  for (std::size_t j = 0; j < a.size(); ++j) v *= pw[j][static_cast<std::size_t>(a[j])];
  return v;
}

int max_index(const std::vector<int>& a) { return *std::max_element(a.begin(), a.end()); }

}  // namespace

MonomialKernel monomial_norms(const BergmanDomain& domain, int trunc, double rel_tol) {
  validate(domain);
  if (trunc < 0 || trunc > 64) throw Error(ErrorKind::InvalidArgument, "truncation must lie in [0, 64]");
  MonomialKernel k;
  k.domain = domain;
  k.trunc = trunc;
  k.rel_tol = rel_tol;
  const int d = domain.dim;
  std::vector<int> a(static_cast<std::size_t>(d), 0);
  for (;;) {
    k.alphas.push_back(a);
    k.norms.push_back(norm_for(domain, a, rel_tol, k.max_panels));
    int j = d - 1;
    while (j >= 0 && a[static_cast<std::size_t>(j)] == trunc) a[static_cast<std::size_t>(j--)] = 0;
    if (j < 0) break;
    ++a[static_cast<std::size_t>(j)];
  }
  k.volume = k.norms.front();
  return k;
}

std::string MonomialKernel::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "alpha,c_alpha\n";
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    std::string s;
    for (std::size_t j = 0; j < alphas[i].size(); ++j) s += (j ? " " : "") + std::to_string(alphas[i][j]);
    out << s << ',' << norms[i] << '\n';
  }
  return out.str();
}

bool bergman_domain_contains(const BergmanDomain& d, const CVec& z) {
  if (d.tag == "disc" || d.tag == "ball") return z.norm() < d.radius;
  if (d.tag == "bidisc") return z.cwiseAbs().maxCoeff() < d.radius;
  if (d.tag == "egg") return std::norm(z[0]) + std::pow(std::abs(z[1]), 2 * d.k) < 1.0;
  return false;
}

namespace {

double shell_tail(const MonomialKernel& kern, const std::vector<double>& shells, double total) {
  const int n = kern.trunc;
  if (n == 0 || shells[static_cast<std::size_t>(n)] == 0.0) return 0.0;
  const double last = shells[static_cast<std::size_t>(n)];
  const double before = shells[static_cast<std::size_t>(n - 1)];
  if (before == 0.0) return std::numeric_limits<double>::infinity();
  const double r = last / before;
  if (r >= 1.0) return std::numeric_limits<double>::infinity();
  return last * r / (1.0 - r) / std::max(total, 1e-300);
}

void check_point(const MonomialKernel& kern, const CVec& z) {
  require_point(z, kern.domain.dim, "point");
  if (!bergman_domain_contains(kern.domain, z)) throw Error(ErrorKind::NotInterior, "point is not interior");
}

}  // namespace

KernelValue bergman_kernel_checked(const MonomialKernel& kern, const CVec& z, const CVec& w, double tail_tol) {
  check_point(kern, z);
  check_point(kern, w);
  const auto pz = power_table(z, kern.trunc);
  const auto pw = power_table(w, kern.trunc);
  std::vector<double> shells(static_cast<std::size_t>(kern.trunc + 1), 0.0);
  KernelValue kv{0.0, 0.0};
  double abs_sum = 0.0;
  for (std::size_t i = 0; i < kern.size(); ++i) {
    const cd term = monomial(pz, kern.alphas[i]) * std::conj(monomial(pw, kern.alphas[i])) / kern.norms[i];
    kv.value += term;
    abs_sum += std::abs(term);
    shells[static_cast<std::size_t>(max_index(kern.alphas[i]))] += std::abs(term);
  }
  kv.tail = shell_tail(kern, shells, abs_sum);
  if (kv.tail > tail_tol) {
    char msg[96];
    std::snprintf(msg, sizeof msg, "kernel tail estimate %.3g exceeds tolerance %.3g", kv.tail, tail_tol);
    throw Error(ErrorKind::Truncation, msg);
  }
  return kv;
}

cd bergman_kernel(const MonomialKernel& kern, const CVec& z, const CVec& w, double tail_tol) {
  return bergman_kernel_checked(kern, z, w, tail_tol).value;
}

// ------------------------------------------------------------ curvature

namespace {

/// Truncated series in (h, conj h) with holomorphic and antiholomorphic
/// degrees at most 2 each.
class BiJet {
 public:
  explicit BiJet(int dim) : dim_(dim) {
    std::vector<int> e(static_cast<std::size_t>(dim), 0);
    index_.push_back(e);
    for (int j = 0; j < dim; ++j) {
      e.assign(static_cast<std::size_t>(dim), 0);
      e[static_cast<std::size_t>(j)] = 1;
      index_.push_back(e);
    }
    for (int j = 0; j < dim; ++j) {
      for (int l = j; l < dim; ++l) {
        e.assign(static_cast<std::size_t>(dim), 0);
        ++e[static_cast<std::size_t>(j)];
        ++e[static_cast<std::size_t>(l)];
        index_.push_back(e);
      }
    }
    const std::size_t n = index_.size();
    add_.assign(n * n, -1);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        std::vector<int> s(static_cast<std::size_t>(dim));
        for (int j = 0; j < dim; ++j) s[static_cast<std::size_t>(j)] = index_[a][static_cast<std::size_t>(j)] + index_[b][static_cast<std::size_t>(j)];
        add_[a * n + b] = find(s);
      }
    }
    coeff = CMat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  }

  std::size_t size() const { return index_.size(); }
  const std::vector<int>& multi(std::size_t i) const { return index_[i]; }

  int find(const std::vector<int>& e) const {
    for (std::size_t i = 0; i < index_.size(); ++i)
      if (index_[i] == e) return static_cast<int>(i);
    return -1;
  }
  int unit(int j) const { return 1 + j; }
  int pair(int j, int l) const {
    std::vector<int> e(static_cast<std::size_t>(dim_), 0);
    ++e[static_cast<std::size_t>(j)];
    ++e[static_cast<std::size_t>(l)];
    return find(e);
  }

  BiJet operator*(const BiJet& o) const {
    BiJet r(dim_);
    const std::size_t n = size();
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        const cd x = coeff(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        if (x == 0.0) continue;
        for (std::size_t c = 0; c < n; ++c) {
          const int hc = add_[a * n + c];
          if (hc < 0) continue;
          for (std::size_t e = 0; e < n; ++e) {
            const int ae = add_[b * n + e];
            if (ae < 0) continue;
            r.coeff(hc, ae) += x * o.coeff(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(e));
          }
        }
      }
    return r;
  }

  CMat coeff;

 private:
  int dim_;
  std::vector<std::vector<int>> index_;
  std::vector<int> add_;
};

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

struct JetResult {
  BiJet jet;
  double tail;
};

/// Bi-jet of K(q + h, q + h) over alphas with |alpha|_inf <= limit.
JetResult kernel_bijet(const MonomialKernel& kern, const CVec& q, int limit) {
  const int d = kern.domain.dim;
  BiJet jet(d);
  const auto pw = power_table(q, kern.trunc);
  const std::size_t n = jet.size();
  std::vector<cd> dvals(n);
  std::vector<double> shells(static_cast<std::size_t>(kern.trunc + 1), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < kern.size(); ++i) {
    const auto& a = kern.alphas[i];
    if (max_index(a) > limit) continue;
    for (std::size_t b = 0; b < n; ++b) {
      const auto& beta = jet.multi(b);
      cd v = 1.0;
      for (int j = 0; j < d; ++j) {
        const int aj = a[static_cast<std::size_t>(j)], bj = beta[static_cast<std::size_t>(j)];
        if (bj > aj) {
          v = 0.0;
          break;
        }
        v *= binom(aj, bj) * pw[static_cast<std::size_t>(j)][static_cast<std::size_t>(aj - bj)];
      }
      dvals[b] = v;
    }
    const double w = 1.0 / kern.norms[i];
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        jet.coeff(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(c)) += dvals[b] * std::conj(dvals[c]) * w;
    const double mag = std::norm(dvals[0]) * w;
    shells[static_cast<std::size_t>(max_index(a))] += mag;
    total += mag;
  }
  MonomialKernel view;
  view.trunc = limit;
  return {jet, shell_tail(view, shells, total)};
}

BiJet log_jet(const BiJet& k) {
  const cd k00 = k.coeff(0, 0);
  if (!(k00.real() > 0.0)) throw Error(ErrorKind::Truncation, "kernel value is not positive");
  BiJet x = k;
  x.coeff /= k00;
  x.coeff(0, 0) = 0.0;
  BiJet out = x;
  BiJet power = x;
  for (int m = 2; m <= 4; ++m) {
    power = power * x;
    out.coeff += ((m % 2 == 0) ? -1.0 : 1.0) / m * power.coeff;
  }
  out.coeff(0, 0) = std::log(k00.real());
  return out;
}

struct Geometry {
  CMat g;
  double curvature;
  double metric_value;
};

Geometry curvature_from_log(const BiJet& lj, int d, const CVec& xi) {
  auto fact = [](int j, int l) { return j == l ? 2.0 : 1.0; };
  CMat g(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) g(j, k) = lj.coeff(lj.unit(j), lj.unit(k));
  // dg[l](j, k) = d_l g_{j kbar}
  cd a_term = 0.0;
  CVec avec = CVec::Zero(d);
  for (int j = 0; j < d; ++j)
    for (int l = 0; l < d; ++l) {
      const cd xx = xi[j] * xi[l];
      for (int q = 0; q < d; ++q) avec[q] += lj.coeff(lj.pair(j, l), lj.unit(q)) * fact(j, l) * xx;
      for (int k = 0; k < d; ++k)
        for (int m = 0; m < d; ++m) {
          a_term += lj.coeff(lj.pair(j, l), lj.pair(k, m)) * fact(j, l) * fact(k, m) * xx *
                    std::conj(xi[k] * xi[m]);
        }
    }
  const CMat gh = 0.5 * (g + g.adjoint());
  Eigen::LLT<CMat> llt(gh);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::Truncation, "Bergman metric is not positive definite (truncation too small)");
  }
  const CVec ca = avec.conjugate();
  const cd second = (ca.adjoint() * llt.solve(ca))(0);
  const double r = -a_term.real() + second.real();
  const double gx = (xi.transpose() * gh * xi.conjugate())(0).real();
  return {gh, 2.0 * r / (gx * gx), gx};
}

}  // namespace

CMat bergman_metric(const MonomialKernel& kern, const CVec& q, double tail_tol) {
  check_point(kern, q);
  const JetResult jr = kernel_bijet(kern, q, kern.trunc);
  if (jr.tail > tail_tol) throw Error(ErrorKind::Truncation, "kernel tail estimate exceeds tolerance");
  const BiJet lj = log_jet(jr.jet);
  const int d = kern.domain.dim;
  CMat g(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) g(j, k) = lj.coeff(lj.unit(j), lj.unit(k));
  g = 0.5 * (g + g.adjoint());
  Eigen::LLT<CMat> llt(g);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::Truncation, "Bergman metric is not positive definite (truncation too small)");
  }
  return g;
}

CurvatureReport sectional_curvature(const MonomialKernel& kern, const CVec& q, const CVec& xi,
                                    const CurvatureOptions& opts) {
  check_point(kern, q);
  require_point(xi, kern.domain.dim, "direction");
  if (xi.norm() == 0.0) throw Error(ErrorKind::InvalidArgument, "direction must be nonzero");
  const int d = kern.domain.dim;
  CurvatureReport rep;
  rep.point = q;
  rep.direction = xi;
  rep.trunc = kern.trunc;
  const JetResult full = kernel_bijet(kern, q, kern.trunc);
  const Geometry gf = curvature_from_log(log_jet(full.jet), d, xi);
  rep.metric_value = gf.metric_value;
  rep.curvature = gf.curvature;
  const int lower = kern.trunc - opts.sensitivity_step;
  if (lower >= 2) {
    const JetResult part = kernel_bijet(kern, q, lower);
    rep.curvature_lower_trunc = curvature_from_log(log_jet(part.jet), d, xi).curvature;
    rep.sensitivity = std::abs(rep.curvature - rep.curvature_lower_trunc);
  } else {
    rep.curvature_lower_trunc = std::numeric_limits<double>::quiet_NaN();
    rep.sensitivity = std::numeric_limits<double>::infinity();
  }
  rep.accepted = rep.sensitivity < opts.sensitivity_tol;
  if (opts.enforce && !rep.accepted) {
    throw Error(ErrorKind::Truncation,
                "curvature truncation sensitivity " + std::to_string(rep.sensitivity) + " exceeds tolerance");
  }
  return rep;
}

nlohmann::json to_json(const CurvatureReport& r) {
  return {{"point", complex_to_json(r.point)},
          {"direction", complex_to_json(r.direction)},
          {"metric_value", r.metric_value},
          {"curvature", r.curvature},
          {"curvature_lower_trunc", r.curvature_lower_trunc},
          {"trunc", r.trunc},
          {"sensitivity", r.sensitivity},
          {"accepted", r.accepted}};
}

// ------------------------------------------------------------ Klembeck

KlembeckReport klembeck_harness(const BergmanDomain& domain, const CVec& p, const std::vector<double>& t_list,
                                const CVec& xi, int trunc, double tolerance, const CurvatureOptions& opts) {
  if (t_list.empty()) throw Error(ErrorKind::InvalidArgument, "empty t list");
  validate(domain);
  if (domain.tag == "bidisc") throw Error(ErrorKind::Unsupported, "bidisc boundary is not smooth");
  CatalogParams cp;
  cp.dim = domain.dim;
  cp.k = domain.k;
  cp.radius = domain.radius;
  const DefiningFunction rho = make_catalog_domain(domain.tag == "disc" ? "disc" : domain.tag, cp);
  require_point(p, domain.dim, "boundary point");
  if (std::abs(rho(p)) > 1e-10) throw Error(ErrorKind::NotOnBoundary, "p is not a boundary point");
  if (domain.dim >= 2) {
    const LeviReport lr = levi_classify(rho, p);
    if (lr.classification != LeviClass::StronglyPseudoconvex) {
      throw Error(ErrorKind::NotStronglyPseudoconvex, "p is not strongly pseudoconvex");
    }
  }
  const CVec n = rho.outward_normal(p);
  const MonomialKernel kern = monomial_norms(domain, trunc);

  KlembeckReport rep;
  rep.domain = domain;
  rep.boundary_point = p;
  rep.direction = xi;
  rep.trunc = trunc;
  rep.target = -4.0 / (domain.dim + 1.0);
  rep.tolerance = tolerance;
  std::vector<double> ts = t_list;
  std::sort(ts.begin(), ts.end(), std::greater<>());
  std::vector<double> tv, sv;
  CurvatureOptions o = opts;
  o.enforce = false;
  for (double t : ts) {
    KlembeckRow row;
    row.t = t;
    row.point = p - t * n;
    try {
      const CurvatureReport cr = sectional_curvature(kern, row.point, xi, o);
      row.curvature = cr.curvature;
      row.sensitivity = cr.sensitivity;
      row.accepted = cr.accepted;
      if (!row.accepted) row.note = "truncation sensitivity above tolerance";
    } catch (const Error& e) {
      row.curvature = std::numeric_limits<double>::quiet_NaN();
      row.sensitivity = std::numeric_limits<double>::infinity();
      row.note = e.what();
    }
    if (row.accepted) {
      tv.push_back(t);
      sv.push_back(row.curvature);
    }
    rep.rows.push_back(row);
  }
  if (tv.empty()) {
    rep.fitted_limit = std::numeric_limits<double>::quiet_NaN();
    rep.pass = false;
    return rep;
  }
  rep.fitted_limit = richardson_limit(tv, sv, 2);
  rep.pass = std::abs(rep.fitted_limit - rep.target) <= tolerance;
  return rep;
}

std::string KlembeckReport::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "t,curvature,sensitivity,accepted\n";
  for (const auto& r : rows) out << r.t << ',' << r.curvature << ',' << r.sensitivity << ',' << (r.accepted ? 1 : 0) << '\n';
  return out.str();
}

nlohmann::json to_json(const KlembeckReport& r) {
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json j = {{"t", row.t},
                        {"point", complex_to_json(row.point)},
                        {"curvature", row.curvature},
                        {"sensitivity", row.sensitivity},
                        {"accepted", row.accepted}};
    if (!row.note.empty()) j["note"] = row.note;
    rows.push_back(j);
  }
  return {{"domain", {{"tag", r.domain.tag}, {"dim", r.domain.dim}, {"k", r.domain.k}, {"radius", r.domain.radius}}},
          {"boundary_point", complex_to_json(r.boundary_point)},
          {"direction", complex_to_json(r.direction)},
          {"trunc", r.trunc},
          {"rows", rows},
          {"target", r.target},
          {"fitted_limit", r.fitted_limit},
          {"tolerance", r.tolerance},
          {"verdict", r.verdict()}};
}

}  // namespace cscale
